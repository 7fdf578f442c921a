#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "core/expr.hpp"
#include "core/graph.hpp"
#include "core/point.hpp"
#include "core/rng.hpp"

namespace cms {

using ojson = nlohmann::ordered_json;

struct Backend {
  enum class Kind { Euclid, Word };
  Kind kind = Kind::Euclid;
  // Euclid: dimension and per-coordinate sampling box (also the box used by
  // validation, contraction sampling and the default panel).
  int dim = 1;
  std::vector<std::array<double, 2>> box;
  // Word: buffer capacity L.
  int word_capacity = 32;
};

// Vertex membership predicate.  Euclid regions evaluate an expression
// (truthy = member); Word regions are implicit: a word belongs to the
// terminal vertex of its last symbol ("auto").
struct Region {
  std::string text;
  std::optional<Expr> pred;
};

inline Region euclid_region(std::string text) {
  Region r;
  r.pred = Expr::parse(text);
  r.text = std::move(text);
  return r;
}
inline Region word_region() { return Region{"auto", std::nullopt}; }

struct AffineMap {
  std::vector<double> matrix;  // dim x dim, row-major
  std::vector<double> offset;  // dim
};
struct ExprMap {
  std::vector<Expr> coords;  // one expression per output coordinate
};
struct AppendMap {};  // word backend: append this edge's symbol

using MapSpec = std::variant<AffineMap, ExprMap, AppendMap>;

// Probability of taking an edge, as a function of the current point.
// Euclid backend: evaluated on the coordinates of x.  Word backend: evaluated
// on the word AFTER appending the candidate edge (s0 = candidate edge,
// s1 = previous last symbol, ...), so a single function g of the extended
// word specifies all edge probabilities at once; symbols beyond the current
// length read as -1.
struct ProbSpec {
  Expr expr;
};

// Immutable specification of a contractive Markov system: directed multigraph,
// state-space backend, vertex regions, edge maps, edge probability functions,
// designated base point per vertex, probability floor delta, and an optional
// claimed average contraction rate.  `extra` carries free-form fixture
// parameters that reports echo verbatim.
class System {
 public:
  System(Digraph graph, Backend backend, std::vector<Region> regions,
         std::vector<MapSpec> maps, std::vector<ProbSpec> probs,
         std::vector<Point> base_points, double delta, std::optional<double> claimed_rate,
         ojson extra = ojson::object());

  const Digraph& graph() const { return graph_; }
  const Backend& backend() const { return backend_; }
  const Region& region(VertexId v) const { return regions_[static_cast<size_t>(v - 1)]; }
  const MapSpec& map(EdgeId e) const { return maps_[static_cast<size_t>(e)]; }
  const ProbSpec& prob(EdgeId e) const { return probs_[static_cast<size_t>(e)]; }
  const std::vector<Point>& base_points() const { return base_points_; }
  const Point& base_point(VertexId v) const { return base_points_[static_cast<size_t>(v - 1)]; }
  double delta() const { return delta_; }
  std::optional<double> claimed_rate() const { return claimed_rate_; }
  const ojson& extra() const { return extra_; }

  bool is_euclid() const { return backend_.kind == Backend::Kind::Euclid; }

 private:
  Digraph graph_;
  Backend backend_;
  std::vector<Region> regions_;
  std::vector<MapSpec> maps_;
  std::vector<ProbSpec> probs_;
  std::vector<Point> base_points_;
  double delta_;
  std::optional<double> claimed_rate_;
  ojson extra_;
};

inline constexpr double kProbNormTolerance = 1e-9;
inline constexpr double kProbFloorSlack = 1e-12;

// Region membership; evaluation failures count as non-membership.
bool region_contains(const System& sys, VertexId v, const Point& x);

// Number of regions containing x; `first` receives the lowest matching vertex.
int count_regions(const System& sys, const Point& x, VertexId* first = nullptr);

// The unique region of x; throws Error{DomainError} unless exactly one matches.
VertexId require_vertex(const System& sys, const Point& x);

// Apply edge map without checking the source region (callers that track
// vertex tags use this).  Throws Error{DomainError} if a map expression fails
// or, for word maps, if the edge does not extend the word admissibly.
Point apply_map(const System& sys, EdgeId e, const Point& x);

// Checked variant: verifies x lies in the source region of e first.
Point eval_map(const System& sys, EdgeId e, const Point& x);

// Probability values for the outgoing edges of v at x, aligned with
// graph().out_edges(v).  Throws Error{DomainError} on expression failure.
// No positivity / normalization enforcement -- see eval_probs.
std::vector<double> eval_probs_raw(const System& sys, VertexId v, const Point& x);

// Word point as an expression-variable vector: s0 = most recent symbol,
// sk = k symbols back, -1 beyond the stored length; always `word_capacity`
// entries long.
std::vector<double> word_variables(const System& sys, const Point& x);

struct ProbCheckResult {
  double min_value = 0.0;
  double sum = 0.0;
  bool positivity_ok = true;
  bool normalization_ok = true;
  bool ok() const { return positivity_ok && normalization_ok; }
};
ProbCheckResult check_prob_values(const System& sys, std::span<const double> values);

// Checked probabilities at x: each >= delta (within a small slack), summing to
// one within kProbNormTolerance.  Throws Error{ValidationError} otherwise.
std::vector<std::pair<EdgeId, double>> eval_probs(const System& sys, const Point& x);

// eval_probs_raw plus the floor/normalization checks, for a point whose
// vertex is already known; throws Error{ValidationError} when they fail.
std::vector<double> eval_probs_checked(const System& sys, VertexId v, const Point& x);

// Draw a point of region v: rejection sampling of the working box (Euclid) or
// a backward walk through incoming edges (Word).  Deterministic given rng.
Point sample_region_point(const System& sys, VertexId v, RngStream& rng, int max_tries = 10000);

// Structural digraph checks plus statistical checks on n_samples points per
// vertex: regions are non-empty and pairwise disjoint, box samples fall in
// exactly one region (Euclid), maps land in their target region, probability
// functions respect the floor and normalize.
ValidationReport validate_system(const System& sys, long n_samples, std::uint64_t seed);

struct ContractionWitness {
  VertexId vertex = 0;
  Point x, y;
  double value = 0.0;
};

struct ContractionReport {
  long pairs_requested = 0;
  long degenerate_pairs = 0;  // identical sample pairs, skipped
  double sup_estimate = 0.0;
  std::vector<double> per_vertex_max;  // index v-1
  std::optional<ContractionWitness> worst;
  bool contractive() const { return sup_estimate < 1.0; }
};

// Monte Carlo estimate of the average contraction number: the max over
// sampled same-vertex pairs (x, y) of sum_e p_e(x) d(w_e x, w_e y) / d(x, y).
// Pair k is generated from RngStream::derive(seed, k), so estimates are
// monotone under extension of n_pairs at fixed seed and independent of the
// thread count.
ContractionReport estimate_contraction_rate(const System& sys, long n_pairs,
                                            std::uint64_t seed, int threads = 0);

}  // namespace cms
