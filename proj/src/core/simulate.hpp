#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/measure.hpp"
#include "core/rng.hpp"
#include "core/system.hpp"

namespace cms {

struct StepResult {
  EdgeId edge = -1;
  double prob = 1.0;  // probability the chosen edge had at the current point
  Point next;
  VertexId next_vertex = 1;
};

// One chain step from x (whose vertex tag is v): validate the edge
// probabilities at x, pick an edge by inverse-CDF sampling in edge-id order,
// apply its map.
StepResult step(const System& sys, const Point& x, VertexId v, RngStream& rng);

// A sampled chain path.  states/vertices have length n+1, edges/step_probs
// length n; edges[k] moved states[k] to states[k+1].
struct Trajectory {
  std::uint64_t seed = 0;
  std::vector<VertexId> vertices;
  std::vector<Point> states;
  std::vector<EdgeId> edges;
  std::vector<double> step_probs;
  long length() const { return static_cast<long>(edges.size()); }
};

Trajectory simulate(const System& sys, const Point& start, long steps, std::uint64_t seed);

// Edge word of length `depth` traced by running the chain from an atom of
// `start` drawn with `rng` (one draw for the atom, one per step).
std::vector<EdgeId> sample_word(const System& sys, const ParticleMeasure& start, int depth,
                                RngStream& rng);

// Mean of f over the visited states with indices >= burn_in.
double birkhoff_average(const Trajectory& t,
                        const std::function<double(const Point&, VertexId)>& f,
                        long burn_in = 0);

// Equal-weight atoms at the visited states with indices >= burn_in.
ParticleMeasure empirical_measure(const System& sys, const Trajectory& t, long burn_in = 0);

// (1/n) * sum of log step probabilities: the empirical exponential decay rate
// of the cylinder the path traces out.
double log_cylinder_rate(const Trajectory& t);

// CSV rows k,vertex,edge,prob,state...; row 0 carries edge -1 and prob 1.
void write_trajectory_csv(const System& sys, const Trajectory& t, const std::string& path);

}  // namespace cms
