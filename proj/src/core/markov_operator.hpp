#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/measure.hpp"
#include "core/panel.hpp"
#include "core/system.hpp"

namespace cms {

// (Uf)(x) = sum over outgoing edges of p_e(x) f(w_e x), evaluated in edge-id
// order.  Throws if x lies in no (or several) regions or probabilities fail
// validation at x.
double apply_U(const System& sys,
               const std::function<double(const Point&, VertexId)>& f, const Point& x);

// How the adjoint update keeps the particle count bounded.
//  Split:    push every atom through every outgoing edge (weight times edge
//            probability); if the children exceed `budget`, systematically
//            resample down to `budget` equal-weight atoms.
//  Resample: draw `budget` children directly (parent by weight, edge by its
//            probability at the parent), each with weight 1/budget.
enum class UStarPolicy { Split, Resample };

struct UStarOptions {
  UStarPolicy policy = UStarPolicy::Split;
  long budget = 1000;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = all hardware threads
};

// One adjoint-operator step nu -> U* nu on particle measures.  Weights are
// renormalized to total 1 (edge probabilities only sum to 1 within the
// validation tolerance).  Randomized choices draw from streams derived from
// (seed, work item, generation), never from per-thread state, so the result
// is byte-identical for every thread count.  The output generation is the
// input generation + 1.
ParticleMeasure apply_U_star(const System& sys, const ParticleMeasure& m,
                             const UStarOptions& opt);

struct InvariantOptions {
  long particles = 1000;
  int iterations = 50;
  std::uint64_t seed = 0;
  int threads = 0;
  UStarPolicy policy = UStarPolicy::Split;
};

// Per-iteration diagnostics recorded while iterating U*.
struct ConvergenceTrace {
  std::vector<std::string> panel_names;
  std::vector<std::vector<double>> integrals;  // panel integrals after each step
  std::vector<double> moments;                 // moment_about_bases after each step
  std::vector<double> changes;                 // weak-star distance between steps
};

struct InvariantResult {
  ParticleMeasure measure;
  ConvergenceTrace trace;
};

// Iterate U* from the uniform base-point measure.  The trace records panel
// integrals (default panel when `panel` is null), the first moment about the
// base points, and the weak-star change per iteration.
InvariantResult estimate_invariant(const System& sys, const InvariantOptions& opt,
                                   const Panel* panel = nullptr);

}  // namespace cms
