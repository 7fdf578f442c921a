#include "core/markov_operator.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/util.hpp"

namespace cms {
namespace {

// Stream salt for the single systematic-resampling offset of a Split update.
constexpr std::uint64_t kResampleTag = 0x52d31c9b04a7e615ULL;

void divide_weights(std::vector<Particle>& ps) {
  KahanSum total;
  for (const Particle& p : ps) total.add(p.weight);
  double w = total.value();
  if (!(w > 0.0)) fail(ErrorCode::DomainError, "measure update lost all mass");
  for (Particle& p : ps) p.weight /= w;
}

// Classic systematic (comb) resampling at positions (k + offset) / budget of
// the cumulative weight; weights must already be normalized.
std::vector<Particle> systematic_resample(const std::vector<Particle>& children, long budget,
                                          double offset) {
  std::vector<Particle> out;
  out.reserve(static_cast<std::size_t>(budget));
  std::size_t idx = 0;
  double cum = children[0].weight;
  const double w = 1.0 / static_cast<double>(budget);
  for (long k = 0; k < budget; ++k) {
    double pos = (static_cast<double>(k) + offset) / static_cast<double>(budget);
    while (cum < pos && idx + 1 < children.size()) cum += children[++idx].weight;
    out.push_back({children[idx].point, children[idx].vertex, w});
  }
  return out;
}

}  // namespace

double apply_U(const System& sys, const std::function<double(const Point&, VertexId)>& f,
               const Point& x) {
  double acc = 0.0;
  for (const auto& [e, p] : eval_probs(sys, x))
    acc += p * f(apply_map(sys, e, x), sys.graph().edges()[static_cast<std::size_t>(e)].target);
  return acc;
}

ParticleMeasure apply_U_star(const System& sys, const ParticleMeasure& m,
                             const UStarOptions& opt) {
  if (opt.budget < 1) fail(ErrorCode::InvalidArgument, "budget must be at least 1");
  const auto& parents = m.particles();
  const long n = static_cast<long>(parents.size());
  const int generation = m.generation();
  std::vector<Particle> children;

  if (opt.policy == UStarPolicy::Split) {
    // Child slots are laid out per parent so parallel workers never contend.
    std::vector<std::size_t> offset(parents.size() + 1, 0);
    for (std::size_t i = 0; i < parents.size(); ++i)
      offset[i + 1] = offset[i] + sys.graph().out_edges(parents[i].vertex).size();
    children.resize(offset.back());
    parallel_for(n, opt.threads, [&](long i) {
      const Particle& p = parents[static_cast<std::size_t>(i)];
      std::vector<double> probs = eval_probs_checked(sys, p.vertex, p.point);
      auto out = sys.graph().out_edges(p.vertex);
      for (std::size_t j = 0; j < out.size(); ++j) {
        EdgeId e = out[j];
        children[offset[static_cast<std::size_t>(i)] + j] = {
            apply_map(sys, e, p.point),
            sys.graph().edges()[static_cast<std::size_t>(e)].target, p.weight * probs[j]};
      }
    });
    divide_weights(children);
    if (static_cast<long>(children.size()) > opt.budget) {
      RngStream rng =
          RngStream::derive(opt.seed, kResampleTag ^ static_cast<std::uint64_t>(generation));
      // Shuffle before the comb: with near-equal weights the comb stride
      // aligns with the parent-major child layout and would keep picking the
      // same out-edge index of every parent, collapsing the support.
      for (std::size_t i = children.size() - 1; i > 0; --i)
        std::swap(children[i], children[rng.next_below(i + 1)]);
      children = systematic_resample(children, opt.budget, rng.next_unit());
    }
  } else {
    children.resize(static_cast<std::size_t>(opt.budget));
    const double w = 1.0 / static_cast<double>(opt.budget);
    parallel_for(opt.budget, opt.threads, [&](long k) {
      // One stream per output slot; the generation keeps streams fresh
      // across iterations.
      RngStream rng = RngStream::derive(
          opt.seed, (static_cast<std::uint64_t>(generation + 1) << 32) ^
                        static_cast<std::uint64_t>(k));
      const Particle& parent = parents[m.index_for_unit(rng.next_unit())];
      std::vector<double> probs = eval_probs_checked(sys, parent.vertex, parent.point);
      auto out = sys.graph().out_edges(parent.vertex);
      double u = rng.next_unit();
      std::size_t pick = out.size() - 1;
      double cum = 0.0;
      for (std::size_t j = 0; j < out.size(); ++j) {
        cum += probs[j];
        if (u < cum) {
          pick = j;
          break;
        }
      }
      EdgeId e = out[pick];
      children[static_cast<std::size_t>(k)] = {
          apply_map(sys, e, parent.point),
          sys.graph().edges()[static_cast<std::size_t>(e)].target, w};
    });
  }

  ParticleMeasure result = ParticleMeasure::from_particles(sys, std::move(children));
  result.set_generation(generation + 1);
  return result;
}

InvariantResult estimate_invariant(const System& sys, const InvariantOptions& opt,
                                   const Panel* panel) {
  if (opt.iterations < 0) fail(ErrorCode::InvalidArgument, "iterations must be nonnegative");
  Panel fallback;
  if (panel == nullptr) {
    fallback = default_panel(sys);
    panel = &fallback;
  }

  InvariantResult res{ParticleMeasure::from_base_points(sys), {}};
  for (const PanelFunction& f : *panel) res.trace.panel_names.push_back(f.name);

  UStarOptions step{opt.policy, opt.particles, opt.seed, opt.threads};
  for (int it = 0; it < opt.iterations; ++it) {
    ParticleMeasure next = apply_U_star(sys, res.measure, step);
    res.trace.integrals.push_back(panel_integrals(*panel, next));
    res.trace.moments.push_back(moment_about_bases(sys, next));
    res.trace.changes.push_back(weakstar_distance(sys, res.measure, next, DistanceMode::Auto, panel));
    res.measure = std::move(next);
  }
  return res;
}

}  // namespace cms
