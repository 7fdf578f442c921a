#pragma once

#include <functional>
#include <string>
#include <vector>

#include "core/measure.hpp"
#include "core/system.hpp"

namespace cms {

// A named bounded observable f(point, vertex-tag).  Panels of observables
// stand in for "all bounded continuous functions" when comparing measures in
// the weak-star sense.
struct PanelFunction {
  std::string name;
  std::function<double(const Point&, VertexId)> fn;
};

using Panel = std::vector<PanelFunction>;

// Built-in panel.  Euclid: per-coordinate box-clipped identity, four tent
// functions per coordinate (bump resolution inside the box), and one
// indicator per vertex tag.  Word: vertex indicators plus indicators of the
// last and second-to-last symbols (depth-2 cylinder resolution).
Panel default_panel(const System& sys);

// Integrals of every panel function against the measure, in panel order.
std::vector<double> panel_integrals(const Panel& panel, const ParticleMeasure& m);

enum class DistanceMode { Auto, Panel, Wasserstein1d };

// Weak-star distance between two particle measures.  Wasserstein1d (the exact
// integral of |CDF_a - CDF_b|) applies to 1-d Euclid backends; Panel uses
// max_f |integral difference| over `panel` (or the default panel when null).
// Auto picks Wasserstein1d when available.
double weakstar_distance(const System& sys, const ParticleMeasure& a, const ParticleMeasure& b,
                         DistanceMode mode = DistanceMode::Auto, const Panel* panel = nullptr);

}  // namespace cms
