// System-file JSON: emit -> parse -> emit is byte-stable, and malformed
// inputs fail with the right error class.

#include <string>

#include "core/error.hpp"
#include "core/fixtures.hpp"
#include "core/sysfile.hpp"
#include "core/util.hpp"
#include "doctest.h"

using cms::Error;
using cms::ErrorCode;
using cms::System;

namespace {

cms::ojson fc3_json() { return cms::ojson::parse(cms::emit_system_text(cms::make_fc3())); }
cms::ojson golden_json() {
  return cms::ojson::parse(cms::emit_system_text(cms::make_gm_golden()));
}

template <class Mut>
ErrorCode code_after(cms::ojson j, Mut mutate) {
  mutate(j);
  try {
    cms::parse_system_text(j.dump());
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected the mutated system text to be rejected");
  return ErrorCode::IoError;  // unreachable
}

}  // namespace

TEST_CASE("emit -> parse -> emit reproduces every fixture byte for byte") {
  for (const auto& info : cms::fixture_catalog()) {
    CAPTURE(info.name);
    System sys = cms::make_fixture(info.name);
    std::string text1 = cms::emit_system_text(sys);
    System back = cms::parse_system_text(text1);
    std::string text2 = cms::emit_system_text(back);
    CHECK(text1 == text2);
    CHECK(back.graph().vertex_count() == sys.graph().vertex_count());
    CHECK(back.graph().edges().size() == sys.graph().edges().size());
    CHECK(back.delta() == sys.delta());
  }
}

TEST_CASE("file round trip through disk") {
  const std::string path = "/tmp/cms_sysfile_roundtrip.json";
  System sys = cms::make_sincos();
  cms::write_system_file(sys, path);
  System back = cms::parse_system_file(path);
  CHECK(cms::emit_system_text(back) == cms::emit_system_text(sys));
  CHECK(cms::read_text_file(path) == cms::emit_system_text(sys));
}

TEST_CASE("extra params survive a round trip unchanged") {
  cms::ojson j = fc3_json();
  j["params"]["note"] = "kept";
  j["params"]["quoted_rate"] = 0.25;
  System sys = cms::parse_system_text(j.dump());
  CHECK(sys.extra().contains("note"));
  std::string text = cms::emit_system_text(sys);
  CHECK(cms::emit_system_text(cms::parse_system_text(text)) == text);
  CHECK(text.find("\"note\": \"kept\"") != std::string::npos);
}

TEST_CASE("structurally broken JSON is a parse error") {
  CHECK(code_after(cms::ojson::parse("[1,2]"), [](cms::ojson&) {}) == ErrorCode::ParseError);
  CHECK_THROWS_AS(cms::parse_system_text("{nope"), Error);

  auto parse_err = [&](auto mutate) { CHECK(code_after(fc3_json(), mutate) == ErrorCode::ParseError); };
  parse_err([](cms::ojson& j) { j.erase("space"); });
  parse_err([](cms::ojson& j) { j["space"]["backend"] = "banach"; });
  parse_err([](cms::ojson& j) { j["space"]["box"] = cms::ojson::array(); });
  parse_err([](cms::ojson& j) { j["space"].erase("dim"); });
  parse_err([](cms::ojson& j) { j["vertices"][0]["id"] = 7; });
  parse_err([](cms::ojson& j) { j["vertices"][1]["region"] = "x0 >="; });
  parse_err([](cms::ojson& j) { j["edges"][1]["id"] = 5; });
  parse_err([](cms::ojson& j) { j["edges"][2].erase("prob"); });
  parse_err([](cms::ojson& j) { j["edges"][0]["map"]["kind"] = "frob"; });
  parse_err([](cms::ojson& j) { j["base_points"].erase(2); });
  parse_err([](cms::ojson& j) { j["base_points"][1]["vertex"] = 1; });
  parse_err([](cms::ojson& j) { j["base_points"][0]["point"] = {0.5, 0.5}; });
  parse_err([](cms::ojson& j) { j["params"].erase("delta"); });
  parse_err([](cms::ojson& j) { j["params"]["claimed_rate"] = "fast"; });
}

TEST_CASE("semantic violations surface as invalid arguments") {
  auto invalid = [&](auto mutate) {
    CHECK(code_after(fc3_json(), mutate) == ErrorCode::InvalidArgument);
  };
  invalid([](cms::ojson& j) { j["params"]["delta"] = 1.5; });
  invalid([](cms::ojson& j) { j["params"]["delta"] = 0.0; });
  invalid([](cms::ojson& j) { j["edges"][0]["source"] = 9; });
  invalid([](cms::ojson& j) { j["params"]["claimed_rate"] = -0.5; });

  // Word systems: regions must be "auto" and base words admissible paths.
  CHECK(code_after(golden_json(), [](cms::ojson& j) { j["vertices"][0]["region"] = "s0 > 0"; }) ==
        ErrorCode::ParseError);
  CHECK(code_after(golden_json(), [](cms::ojson& j) { j["base_points"][1]["word"] = "0-2"; }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("missing files are I/O errors, not parse errors") {
  try {
    cms::parse_system_file("/tmp/definitely-not-here-8841.json");
    FAIL("expected an I/O failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
  }
}
