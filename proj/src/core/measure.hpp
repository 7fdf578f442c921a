#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/point.hpp"
#include "core/rng.hpp"
#include "core/system.hpp"

namespace cms {

struct Particle {
  Point point;
  VertexId vertex = 1;
  double weight = 0.0;
};

// Max |total weight - 1| accepted when constructing a measure.
inline constexpr double kWeightTolerance = 1e-12;

// A finitely supported probability measure on the state space, each atom
// tagged with the vertex whose region contains it.  Construction validates
// the tags, the weights and the representation, so a ParticleMeasure in hand
// is always well-formed.  `generation` is a runtime iteration counter used to
// decorrelate RNG streams across operator applications; it is not persisted.
class ParticleMeasure {
 public:
  // Uniform weights on the designated base points, one per vertex.
  static ParticleMeasure from_base_points(const System& sys);
  static ParticleMeasure from_particles(const System& sys, std::vector<Particle> particles);

  const std::vector<Particle>& particles() const { return particles_; }
  std::size_t size() const { return particles_.size(); }
  double total_weight() const { return total_; }
  int generation() const { return generation_; }
  void set_generation(int g) { generation_ = g; }

  // Index of the atom containing cumulative position u*total, u in [0,1).
  std::size_t index_for_unit(double u) const;
  std::size_t sample_index(RngStream& rng) const { return index_for_unit(rng.next_unit()); }

  void write_csv(const System& sys, const std::string& path) const;
  static ParticleMeasure read_csv(const System& sys, const std::string& path);

 private:
  ParticleMeasure() = default;
  std::vector<Particle> particles_;
  std::vector<double> cumulative_;  // prefix sums of weights
  double total_ = 0.0;
  int generation_ = 0;
};

// First moment about the designated base points: sum of w * d(x, base(tag)).
// A cheap scalar that tracks how spread out the measure is; reported in
// convergence traces.
double moment_about_bases(const System& sys, const ParticleMeasure& m);

}  // namespace cms
