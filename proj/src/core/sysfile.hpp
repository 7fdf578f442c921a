#pragma once

#include <string>

#include "core/system.hpp"

namespace cms {

// JSON system description:
//   {
//     "space":       {"backend":"euclid","dim":1,"box":[[lo,hi],...]}
//                  | {"backend":"word","capacity":32},
//     "vertices":    [{"id":1,"region":"(x0 >= 0) && ..."} ...]       (word: "auto")
//     "edges":       [{"id":0,"source":1,"target":1,
//                      "map":{"kind":"affine","matrix":[[...]],"offset":[...]}
//                          | {"kind":"expr","coords":["...", ...]}
//                          | {"kind":"append"},
//                      "prob":"..."} ...],
//     "base_points": [{"vertex":1,"point":[...]} | {"vertex":1,"word":"0-2"} ...],
//     "params":      {"delta":0.3, "claimed_rate":0.97, ...}
//   }
// Params beyond delta/claimed_rate are carried through untouched.  Emission
// reuses the stored expression texts, so parse -> emit is idempotent.
System parse_system_text(const std::string& text);
System parse_system_file(const std::string& path);

ojson system_to_json(const System& sys);
std::string emit_system_text(const System& sys);  // 2-space dump + newline
void write_system_file(const System& sys, const std::string& path);

// Start-point CLI spec: "vertex:3" picks the base point of vertex 3;
// "0.25,1.5" parses Euclid coordinates; "0-1-2" parses a word.
Point parse_start_spec(const System& sys, const std::string& spec);

}  // namespace cms
