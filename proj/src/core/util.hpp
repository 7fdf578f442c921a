#pragma once

#include <cmath>
#include <string>

namespace cms {

// Neumaier compensated summation; keeps long weight totals accurate to a few
// ulps so "weights sum to 1 within 1e-12" holds at large particle counts.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// Shortest decimal form that round-trips the double (%.17g).
std::string format_double(double v);

std::string read_text_file(const std::string& path);   // throws Error{IoError}
void write_text_file(const std::string& path, const std::string& content);

}  // namespace cms
