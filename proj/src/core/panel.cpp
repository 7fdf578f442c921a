#include "core/panel.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace cms {

Panel default_panel(const System& sys) {
  Panel panel;
  if (sys.is_euclid()) {
    const auto& box = sys.backend().box;
    for (int j = 0; j < sys.backend().dim; ++j) {
      const double lo = box[static_cast<size_t>(j)][0];
      const double hi = box[static_cast<size_t>(j)][1];
      panel.push_back({"coord" + std::to_string(j), [j, lo, hi](const Point& p, VertexId) {
                         return std::clamp(p.coords[static_cast<size_t>(j)], lo, hi);
                       }});
      for (int m = 0; m < 4; ++m) {
        const double c = lo + (2 * m + 1) / 8.0 * (hi - lo);
        const double h = (hi - lo) / 8.0;
        panel.push_back({"tent" + std::to_string(j) + "_" + std::to_string(m),
                         [j, c, h](const Point& p, VertexId) {
                           return std::max(0.0,
                                           1.0 - std::abs(p.coords[static_cast<size_t>(j)] - c) / h);
                         }});
      }
    }
  } else {
    for (const Edge& e : sys.graph().edges()) {
      panel.push_back({"last" + std::to_string(e.id), [id = e.id](const Point& p, VertexId) {
                         return !p.symbols.empty() && p.symbols.back() == id ? 1.0 : 0.0;
                       }});
      panel.push_back({"prev" + std::to_string(e.id), [id = e.id](const Point& p, VertexId) {
                         return p.symbols.size() >= 2 && p.symbols[p.symbols.size() - 2] == id
                                    ? 1.0
                                    : 0.0;
                       }});
    }
  }
  for (int v = 1; v <= sys.graph().vertex_count(); ++v)
    panel.push_back({"vertex" + std::to_string(v),
                     [v](const Point&, VertexId tag) { return tag == v ? 1.0 : 0.0; }});
  return panel;
}

std::vector<double> panel_integrals(const Panel& panel, const ParticleMeasure& m) {
  std::vector<double> out(panel.size(), 0.0);
  for (std::size_t i = 0; i < panel.size(); ++i) {
    double acc = 0.0;
    for (const Particle& p : m.particles()) acc += p.weight * panel[i].fn(p.point, p.vertex);
    out[i] = acc;
  }
  return out;
}

namespace {

// Exact first Wasserstein distance between two finitely supported measures on
// the line: integral of the absolute CDF difference.
double wasserstein_1d(const ParticleMeasure& a, const ParticleMeasure& b) {
  struct Step {
    double x;
    double dw;
  };
  std::vector<Step> steps;
  steps.reserve(a.size() + b.size());
  for (const Particle& p : a.particles()) steps.push_back({p.point.coords[0], p.weight});
  for (const Particle& p : b.particles()) steps.push_back({p.point.coords[0], -p.weight});
  std::sort(steps.begin(), steps.end(), [](const Step& l, const Step& r) {
    return l.x != r.x ? l.x < r.x : l.dw < r.dw;
  });
  double dist = 0.0, f = 0.0;
  for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
    f += steps[i].dw;
    dist += std::abs(f) * (steps[i + 1].x - steps[i].x);
  }
  return dist;
}

}  // namespace

double weakstar_distance(const System& sys, const ParticleMeasure& a, const ParticleMeasure& b,
                         DistanceMode mode, const Panel* panel) {
  const bool w1_ok = sys.is_euclid() && sys.backend().dim == 1;
  if (mode == DistanceMode::Auto) mode = w1_ok ? DistanceMode::Wasserstein1d : DistanceMode::Panel;
  if (mode == DistanceMode::Wasserstein1d) {
    if (!w1_ok)
      fail(ErrorCode::InvalidArgument, "Wasserstein1d distance needs a 1-d euclid backend");
    return wasserstein_1d(a, b);
  }
  Panel fallback;
  if (panel == nullptr) {
    fallback = default_panel(sys);
    panel = &fallback;
  }
  auto ia = panel_integrals(*panel, a);
  auto ib = panel_integrals(*panel, b);
  double sup = 0.0;
  for (std::size_t i = 0; i < ia.size(); ++i) sup = std::max(sup, std::abs(ia[i] - ib[i]));
  return sup;
}

}  // namespace cms
