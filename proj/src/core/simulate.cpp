#include "core/simulate.hpp"

#include <cmath>
#include <sstream>

#include "core/error.hpp"
#include "core/util.hpp"

namespace cms {

StepResult step(const System& sys, const Point& x, VertexId v, RngStream& rng) {
  std::vector<double> probs = eval_probs_checked(sys, v, x);
  auto out = sys.graph().out_edges(v);
  const double u = rng.next_unit();
  std::size_t pick = out.size() - 1;  // u beyond the last cumulative bin (sum < 1 by rounding)
  double cum = 0.0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    cum += probs[j];
    if (u < cum) {
      pick = j;
      break;
    }
  }
  StepResult r;
  r.edge = out[pick];
  r.prob = probs[pick];
  r.next = apply_map(sys, r.edge, x);
  r.next_vertex = sys.graph().edges()[static_cast<std::size_t>(r.edge)].target;
  return r;
}

Trajectory simulate(const System& sys, const Point& start, long steps, std::uint64_t seed) {
  if (steps < 0) fail(ErrorCode::InvalidArgument, "steps must be nonnegative");
  Trajectory t;
  t.seed = seed;
  t.vertices.push_back(require_vertex(sys, start));
  t.states.push_back(start);
  RngStream rng = RngStream::derive(seed, 0);
  for (long k = 0; k < steps; ++k) {
    StepResult r = step(sys, t.states.back(), t.vertices.back(), rng);
    t.edges.push_back(r.edge);
    t.step_probs.push_back(r.prob);
    t.states.push_back(std::move(r.next));
    t.vertices.push_back(r.next_vertex);
  }
  return t;
}

std::vector<EdgeId> sample_word(const System& sys, const ParticleMeasure& start, int depth,
                                RngStream& rng) {
  const Particle& p0 = start.particles()[start.index_for_unit(rng.next_unit())];
  Point x = p0.point;
  VertexId v = p0.vertex;
  std::vector<EdgeId> word;
  word.reserve(static_cast<std::size_t>(depth));
  for (int k = 0; k < depth; ++k) {
    StepResult r = step(sys, x, v, rng);
    word.push_back(r.edge);
    x = std::move(r.next);
    v = r.next_vertex;
  }
  return word;
}

double birkhoff_average(const Trajectory& t,
                        const std::function<double(const Point&, VertexId)>& f, long burn_in) {
  const long n = static_cast<long>(t.states.size());
  if (burn_in < 0 || burn_in >= n)
    fail(ErrorCode::InvalidArgument, "burn_in must leave at least one state");
  KahanSum acc;
  for (long k = burn_in; k < n; ++k)
    acc.add(f(t.states[static_cast<std::size_t>(k)], t.vertices[static_cast<std::size_t>(k)]));
  return acc.value() / static_cast<double>(n - burn_in);
}

ParticleMeasure empirical_measure(const System& sys, const Trajectory& t, long burn_in) {
  const long n = static_cast<long>(t.states.size());
  if (burn_in < 0 || burn_in >= n)
    fail(ErrorCode::InvalidArgument, "burn_in must leave at least one state");
  std::vector<Particle> ps;
  ps.reserve(static_cast<std::size_t>(n - burn_in));
  const double w = 1.0 / static_cast<double>(n - burn_in);
  for (long k = burn_in; k < n; ++k)
    ps.push_back({t.states[static_cast<std::size_t>(k)], t.vertices[static_cast<std::size_t>(k)], w});
  return ParticleMeasure::from_particles(sys, std::move(ps));
}

double log_cylinder_rate(const Trajectory& t) {
  if (t.edges.empty()) fail(ErrorCode::InvalidArgument, "empty trajectory has no rate");
  KahanSum acc;
  for (double p : t.step_probs) acc.add(std::log(p));
  return acc.value() / static_cast<double>(t.step_probs.size());
}

void write_trajectory_csv(const System& sys, const Trajectory& t, const std::string& path) {
  std::ostringstream out;
  out << "k,vertex,edge,prob";
  if (sys.is_euclid())
    for (int j = 0; j < sys.backend().dim; ++j) out << ",c" << j;
  else
    out << ",word";
  out << "\n";
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    out << k << ',' << t.vertices[k] << ',' << (k == 0 ? -1 : t.edges[k - 1]) << ','
        << (k == 0 ? "1" : format_double(t.step_probs[k - 1]));
    if (sys.is_euclid())
      for (double c : t.states[k].coords) out << ',' << format_double(c);
    else
      out << ',' << format_word(t.states[k].symbols);
    out << "\n";
  }
  write_text_file(path, out.str());
}

}  // namespace cms
