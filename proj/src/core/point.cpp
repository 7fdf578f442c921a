#include "core/point.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "core/error.hpp"

namespace cms {

double distance(const Point& a, const Point& b) {
  if (a.kind != b.kind) fail(ErrorCode::InvalidArgument, "distance between mixed point kinds");
  if (a.kind == Point::Kind::Euclid) {
    if (a.coords.size() != b.coords.size())
      fail(ErrorCode::InvalidArgument, "distance between points of different dimension");
    double sum = 0.0;
    for (size_t i = 0; i < a.coords.size(); ++i) {
      double d = a.coords[i] - b.coords[i];
      sum += d * d;
    }
    return std::sqrt(sum);
  }
  const auto& s = a.symbols;
  const auto& t = b.symbols;
  size_t shorter = std::min(s.size(), t.size());
  size_t agree = 0;
  while (agree < shorter && s[s.size() - 1 - agree] == t[t.size() - 1 - agree]) ++agree;
  if (agree == s.size() && agree == t.size()) return 0.0;
  return std::ldexp(1.0, -static_cast<int>(agree));
}

Point append_symbol(const Point& p, EdgeId e, int capacity) {
  if (p.kind != Point::Kind::Word)
    fail(ErrorCode::InvalidArgument, "append_symbol needs a word point");
  if (capacity < 1) fail(ErrorCode::InvalidArgument, "word capacity must be positive");
  Point q = p;
  q.symbols.push_back(e);
  if (q.symbols.size() > static_cast<size_t>(capacity))
    q.symbols.erase(q.symbols.begin(),
                    q.symbols.begin() + static_cast<long>(q.symbols.size()) - capacity);
  return q;
}

std::string format_word(const std::vector<EdgeId>& symbols) {
  std::string out;
  for (size_t i = 0; i < symbols.size(); ++i) {
    if (i > 0) out += '-';
    out += std::to_string(symbols[i]);
  }
  return out;
}

std::vector<EdgeId> parse_word(const std::string& text) {
  std::vector<EdgeId> out;
  if (text.empty()) return out;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t dash = text.find_first_of("-,", pos);  // either separator works
    std::string item = text.substr(pos, dash == std::string::npos ? dash : dash - pos);
    if (item.empty()) fail(ErrorCode::ParseError, "malformed word \"" + text + "\"");
    char* end = nullptr;
    long v = std::strtol(item.c_str(), &end, 10);
    if (end == item.c_str() || *end != '\0')
      fail(ErrorCode::ParseError, "malformed word symbol \"" + item + "\"");
    out.push_back(static_cast<EdgeId>(v));
    if (dash == std::string::npos) break;
    pos = dash + 1;
  }
  return out;
}

std::string format_point(const Point& p) {
  if (p.kind == Point::Kind::Word) return format_word(p.symbols);
  std::string out = "(";
  char buf[40];
  for (size_t i = 0; i < p.coords.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", p.coords[i]);
    if (i > 0) out += ", ";
    out += buf;
  }
  out += ")";
  return out;
}

}  // namespace cms
