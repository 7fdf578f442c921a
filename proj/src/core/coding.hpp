#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/measure.hpp"
#include "core/system.hpp"

namespace cms {

// Throws Error{InvalidArgument} unless word is a path: every edge id valid
// and the target of each edge equal to the source of the next.
void validate_word_path(const System& sys, std::span<const EdgeId> word);

// Replay the word's maps from the base point of its first source vertex:
// the depth-|word| coded point, without increment bookkeeping.
Point code_point_fast(const System& sys, std::span<const EdgeId> word);

struct CodingOptions {
  // Average contraction rate a used for the tail bound; falls back to the
  // system's claimed rate.  The bound needs both a and the prefactor C.
  std::optional<double> rate;
  std::optional<double> prefactor;
};

struct CodingResult {
  Point point;                     // deepest approximation Y_n
  VertexId vertex = 1;             // region tag: target of the last edge
  std::vector<double> increments;  // d(Y_k, Y_{k-1}) for k = 1..n
  std::optional<double> tail_bound;  // C / (1 - sqrt(a)) * a^(n/2)
};

// Successive approximations of the coded point of a word (e_1 .. e_n): Y_k
// replays the last k symbols starting from the base point of the suffix's
// first source vertex, so Y_0 is the base point of the terminal vertex and
// Y_n uses the whole word.  Mean increments d(Y_k, Y_{k-1}) decay like a^k;
// the almost-sure tail certificate is the weaker C / (1 - sqrt(a)) * a^(n/2).
CodingResult code_point(const System& sys, std::span<const EdgeId> word,
                        const CodingOptions& opt = {});

// Mean increment size by depth over words sampled by running the chain from
// atoms of `start`, plus a least-squares slope of log(mean) against depth.
struct DecayTable {
  std::vector<int> depths;
  std::vector<double> mean_increments;
  long words = 0;
  double fitted_slope = 0.0;   // d log(mean increment) / d depth
  bool slope_defined = false;  // needs >= 2 depths with positive means
  std::optional<double> claimed_log_rate;  // log(claimed rate): expected slope scale
  double max_first_increment = 0.0;        // sup estimate of d(Y_1, Y_0)
};
DecayTable coding_convergence_report(const System& sys, const ParticleMeasure& start,
                                     std::span<const int> depths, long n_words,
                                     std::uint64_t seed, int threads = 0);

// Run the chain `depth` steps from atoms of `start`; compare the endpoint
// ensemble with the coded-word ensemble, both as measures (weak-star) and
// pathwise (drift between the two endpoints of the same word).  When `start`
// approximates an invariant measure, weakstar_vs_start estimates how far the
// coded ensemble is from it.
struct PushforwardReport {
  int depth = 0;
  long samples = 0;
  double weakstar = 0.0;           // coded ensemble vs chain-endpoint ensemble
  double weakstar_vs_start = 0.0;  // coded ensemble vs the start measure
  double mean_drift = 0.0;
  double max_drift = 0.0;
};
PushforwardReport pushforward_check(const System& sys, const ParticleMeasure& start, int depth,
                                    long n_samples, std::uint64_t seed, int threads = 0);

struct ImageParams {
  int width = 256;
  int height = 256;
  double x0 = 0.0, x1 = 1.0;  // left/right of the viewport
  double y0 = 0.0, y1 = 1.0;  // bottom/top (2-d only)
};

// Histogram of coded points of sampled words (1-d or 2-d Euclid backends).
// Words are sampled by running the chain from `start` atoms (or from the
// base points, vertex chosen uniformly, when start is null).  For 1-d
// systems the histogram has a single row.
struct RenderResult {
  int width = 0, height = 0;
  long points = 0;  // words sampled
  long hits = 0;    // coded points inside the viewport
  std::vector<long> counts;  // row-major, top row first
};
RenderResult render_attractor(const System& sys, const ParticleMeasure* start, long n_points,
                              int depth, std::uint64_t seed, const ImageParams& img,
                              int threads = 0);

// Nonzero cells as "c0,c1,count" rows (cell centers; c1 = 0 for 1-d).
void write_points_csv(const RenderResult& r, const ImageParams& img, const std::string& path);

// 8-bit binary PGM, log-scaled counts on black.
void write_pgm(const RenderResult& r, const std::string& path);

}  // namespace cms
