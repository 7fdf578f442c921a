#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/graph.hpp"
#include "core/measure.hpp"
#include "core/system.hpp"

namespace cms {

// Probability of taking edge e from x (tagged vertex v); zero when e does not
// leave v (the zero extension used by cylinder weights).
double edge_prob_at(const System& sys, EdgeId e, const Point& x, VertexId v);

// Mass the generalized Markov measure built over `m` gives the cylinder of
// `word`: integral of the product of step probabilities along the word,
// started from the atoms of m (atoms off the word's first vertex contribute
// zero).  std_error is the weighted sampling error of that integral.
struct CylinderEstimate {
  std::vector<EdgeId> word;
  double mass = 0.0;
  double std_error = 0.0;
};
CylinderEstimate cylinder_mass(const System& sys, const ParticleMeasure& m,
                               std::span<const EdgeId> word);

// Finite-additivity and stationarity diagnostics over all admissible words up
// to max_len.  Additivity residuals are computed on shared per-atom samples
// (children reuse the parent's integrand), so they isolate probability
// normalization error instead of re-summation noise.
struct CylinderConsistency {
  int max_len = 0;
  long nodes_checked = 0;
  double max_abs_residual = 0.0;      // |sum_e mass(w e) - mass(w)|, shared samples
  long stationarity_words = 0;
  double max_stationarity_gap = 0.0;  // |sum_e mass(e w) - mass(w)|
};
CylinderConsistency cylinder_consistency(const System& sys, const ParticleMeasure& m,
                                         int max_len);

// Entropy of the generalized Markov measure over m:
// -sum_atoms w * sum_edges p log p.
double entropy_estimate(const System& sys, const ParticleMeasure& m);

// Compare empirical next-edge conditionals of sampled length-`word_len`
// cylinders against the edge probabilities at the coded word point.  Words
// whose cylinder mass is statistically indistinguishable from zero
// (mass < 10 * std_error) are skipped, not failed.
struct ConditionalReport {
  int word_len = 0;
  long words_requested = 0;
  long words_used = 0;
  long words_skipped = 0;
  double mean_abs_dev = 0.0;
  double max_abs_dev = 0.0;
};
ConditionalReport conditional_edge_check(const System& sys, const ParticleMeasure& m,
                                         int word_len, long n_words, std::uint64_t seed,
                                         int threads = 0);

// log probability of the word's last edge evaluated at the coded point of
// the preceding prefix; -infinity when the word is not a path.  This is the
// energy-function value of the cylinder word.
double energy_eval(const System& sys, std::span<const EdgeId> word);

// Independent stationary law of a Markov g-function given by the
// edge-to-edge matrix q: damped power iteration to the stationary edge
// vector, entropy, and the integral of log g against the stationary measure
// (accumulated in a different order, so `residual` genuinely tests the
// entropy identity h = -integral of log g).
struct GMeasureOracle {
  std::vector<double> stationary;  // one entry per edge
  double entropy = 0.0;
  double integral_log_g = 0.0;
  double residual = 0.0;  // |entropy + integral_log_g|
  long iterations = 0;
};
GMeasureOracle gmeasure_markov_oracle(const Digraph& g,
                                      const std::vector<std::vector<double>>& q);

// Word-backend identity: the Markov operator of an append system equals the
// transfer operator with potential g.  Both sides are evaluated through
// separate code paths at sampled words for each test function.
struct RuelleReport {
  long points = 0;
  int functions = 0;
  double max_abs_dev = 0.0;
};
RuelleReport ruelle_identity_check(const System& sys, const std::vector<std::string>& phi_texts,
                                   long n_points, std::uint64_t seed, int threads = 0);

// For word backends: the mass the *particle words themselves* give a
// suffix cylinder should match the integral form used by cylinder_mass.
struct ExtensionRow {
  std::vector<EdgeId> word;
  double suffix_mass = 0.0;
  double cylinder = 0.0;
  double combined_se = 0.0;
};
struct ExtensionReport {
  int max_len = 0;
  long words = 0;
  double max_abs_dev = 0.0;
  double max_sigma = 0.0;  // max |suffix - cylinder| / combined_se
  std::vector<ExtensionRow> rows;  // capped sample of rows, lexicographic
};
ExtensionReport natural_extension_check(const System& sys, const ParticleMeasure& m,
                                        int max_len);

}  // namespace cms
