#pragma once

#include <string>
#include <vector>

#include "core/graph.hpp"

namespace cms {

// A state-space point.  Exactly one representation is active, chosen by the
// system backend: Euclid coordinates, or a bounded buffer of edge symbols
// with the most recent symbol last (a truncated one-sided itinerary).
struct Point {
  enum class Kind { Euclid, Word };
  Kind kind = Kind::Euclid;
  std::vector<double> coords;
  std::vector<EdgeId> symbols;

  static Point euclid(std::vector<double> xs) {
    Point p;
    p.kind = Kind::Euclid;
    p.coords = std::move(xs);
    return p;
  }
  static Point word(std::vector<EdgeId> symbols) {
    Point p;
    p.kind = Kind::Word;
    p.symbols = std::move(symbols);
    return p;
  }
};

// Euclidean metric on coordinates; 2^-k on words where k counts trailing
// symbol agreement (identical buffers have distance 0, so the space is the
// set of length-<=L words).  Appending one shared symbol at least halves the
// word distance, which is what makes symbol-append maps 1/2-Lipschitz.
double distance(const Point& a, const Point& b);

// Append a symbol to a word point, dropping the oldest symbol beyond
// `capacity`.
Point append_symbol(const Point& p, EdgeId e, int capacity);

// "0-1-4" style rendering of a word buffer, oldest symbol first.
std::string format_word(const std::vector<EdgeId>& symbols);
std::vector<EdgeId> parse_word(const std::string& text);

std::string format_point(const Point& p);

}  // namespace cms
