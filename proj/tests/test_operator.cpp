// Markov operator and its adjoint: the duality identity, an exact
// matrix-power oracle on the finite chain, budget/resampling behavior and
// convergence of the invariant-measure iteration.

#include <cmath>
#include <functional>
#include <vector>

#include "core/fixtures.hpp"
#include "core/markov_operator.hpp"
#include "core/measure.hpp"
#include "core/panel.hpp"
#include "core/util.hpp"
#include "doctest.h"

using cms::ParticleMeasure;
using cms::Point;
using cms::System;
using cms::UStarOptions;
using cms::UStarPolicy;
using cms::VertexId;

namespace {

double integrate(const std::function<double(const Point&, VertexId)>& f,
                 const ParticleMeasure& m) {
  cms::KahanSum acc;
  for (const auto& p : m.particles()) acc.add(p.weight * f(p.point, p.vertex));
  return acc.value();
}

}  // namespace

TEST_CASE("duality: integral of Uf d(nu) equals integral of f d(U* nu)") {
  // Split policy with a budget large enough to avoid resampling makes U*
  // exact, so duality must hold to accumulation error.
  struct Case {
    System sys;
    std::function<double(const Point&, VertexId)> f;
  };
  std::vector<Case> cases;
  cases.push_back({cms::make_sincos(),
                   [](const Point& x, VertexId) { return std::sin(0.3 * x.coords[0]); }});
  cases.push_back({cms::make_fc3(), [](const Point& x, VertexId v) {
                     return x.coords[0] * x.coords[0] + 2.0 * v;
                   }});
  cases.push_back({cms::make_gm_golden(), [](const Point& w, VertexId) {
                     return w.symbols.empty() ? 0.0 : 1.0 / (1.0 + w.symbols.back());
                   }});
  for (auto& c : cases) {
    ParticleMeasure nu = ParticleMeasure::from_base_points(c.sys);
    // two exact steps
    UStarOptions opt;
    opt.policy = UStarPolicy::Split;
    opt.budget = 1 << 20;
    opt.seed = 1;
    for (int step = 0; step < 2; ++step) {
      double lhs = integrate(
          [&](const Point& x, VertexId) { return cms::apply_U(c.sys, c.f, x); }, nu);
      ParticleMeasure next = cms::apply_U_star(c.sys, nu, opt);
      double rhs = integrate(c.f, next);
      CHECK(std::abs(lhs - rhs) <= 1e-12);
      nu = std::move(next);
    }
  }
}

TEST_CASE("fc3 exact pushforward reproduces matrix powers to 1e-10") {
  System sys = cms::make_fc3();
  const std::vector<std::vector<double>> P = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
  std::vector<double> pi = {1.0 / 3, 1.0 / 3, 1.0 / 3};

  ParticleMeasure m = ParticleMeasure::from_base_points(sys);
  UStarOptions opt;
  opt.policy = UStarPolicy::Split;
  opt.budget = 1 << 20;  // 3 * 2^k children at step k: never resample here
  for (int k = 1; k <= 8; ++k) {
    m = cms::apply_U_star(sys, m, opt);
    std::vector<double> next(3, 0.0);
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) next[j] += pi[i] * P[i][j];
    pi = next;
    std::vector<double> mass(3, 0.0);
    for (const auto& p : m.particles()) mass[static_cast<std::size_t>(p.vertex - 1)] += p.weight;
    for (int j = 0; j < 3; ++j) CHECK(std::abs(mass[j] - pi[j]) <= 1e-10);
  }
}

TEST_CASE("split resampling respects the budget and keeps weights normalized") {
  System sys = cms::make_fc3();
  ParticleMeasure m = ParticleMeasure::from_base_points(sys);
  UStarOptions opt;
  opt.policy = UStarPolicy::Split;
  opt.budget = 500;
  opt.seed = 11;
  for (int k = 0; k < 12; ++k) {
    m = cms::apply_U_star(sys, m, opt);
    CHECK(m.size() <= 500);
    CHECK(std::abs(m.total_weight() - 1.0) <= cms::kWeightTolerance);
    CHECK(m.generation() == k + 1);
  }
  // After many iterations the vertex masses hover near the uniform
  // stationary vector instead of collapsing onto one vertex.
  std::vector<double> mass(3, 0.0);
  for (const auto& p : m.particles()) mass[static_cast<std::size_t>(p.vertex - 1)] += p.weight;
  for (int j = 0; j < 3; ++j) CHECK(std::abs(mass[j] - 1.0 / 3) < 0.15);
}

TEST_CASE("resample policy draws the budgeted number of equal-weight children") {
  System sys = cms::make_fc3();
  ParticleMeasure m = ParticleMeasure::from_base_points(sys);
  UStarOptions opt;
  opt.policy = UStarPolicy::Resample;
  opt.budget = 4000;
  opt.seed = 5;
  for (int k = 0; k < 20; ++k) m = cms::apply_U_star(sys, m, opt);
  REQUIRE(m.size() == 4000);
  for (const auto& p : m.particles()) CHECK(p.weight == 1.0 / 4000);
  std::vector<double> mass(3, 0.0);
  for (const auto& p : m.particles()) mass[static_cast<std::size_t>(p.vertex - 1)] += p.weight;
  for (int j = 0; j < 3; ++j) CHECK(std::abs(mass[j] - 1.0 / 3) < 0.05);
}

TEST_CASE("identical seeds give identical measures, different seeds differ") {
  System sys = cms::make_sincos();
  UStarOptions opt;
  opt.budget = 200;
  opt.seed = 42;
  ParticleMeasure m0 = ParticleMeasure::from_base_points(sys);
  // Grow past the budget so the seeded resampler actually runs.
  ParticleMeasure a = m0, b = m0;
  for (int k = 0; k < 9; ++k) {
    a = cms::apply_U_star(sys, a, opt);
    b = cms::apply_U_star(sys, b, opt);
  }
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.particles()[i].point.coords[0] == b.particles()[i].point.coords[0]);
    CHECK(a.particles()[i].weight == b.particles()[i].weight);
  }
  UStarOptions other = opt;
  other.seed = 43;
  ParticleMeasure c = m0;
  for (int k = 0; k < 9; ++k) c = cms::apply_U_star(sys, c, other);
  CHECK(cms::weakstar_distance(sys, a, c) > 0.0);
}

TEST_CASE("thread count never changes the result") {
  System sys = cms::make_sincos();
  ParticleMeasure m = ParticleMeasure::from_base_points(sys);
  UStarOptions one;
  one.budget = 300;
  one.seed = 9;
  one.threads = 1;
  UStarOptions many = one;
  many.threads = 8;
  ParticleMeasure a = m, b = m;
  for (int k = 0; k < 10; ++k) {
    a = cms::apply_U_star(sys, a, one);
    b = cms::apply_U_star(sys, b, many);
  }
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a.particles()[i].point.coords[0] == b.particles()[i].point.coords[0]);
}

TEST_CASE("invariant iteration converges on the finite chain") {
  System sys = cms::make_fc3();
  cms::InvariantOptions opt;
  opt.particles = 3000;
  opt.iterations = 40;
  opt.seed = 77;
  cms::InvariantResult res = cms::estimate_invariant(sys, opt);
  REQUIRE(res.trace.changes.size() == 40);
  REQUIRE(res.trace.integrals.size() == 40);
  CHECK(res.trace.panel_names.size() == res.trace.integrals.back().size());
  // Vertex masses approach the uniform stationary vector.
  std::vector<double> mass(3, 0.0);
  for (const auto& p : res.measure.particles())
    mass[static_cast<std::size_t>(p.vertex - 1)] += p.weight;
  for (int j = 0; j < 3; ++j) CHECK(std::abs(mass[j] - 1.0 / 3) < 0.05);
  // All atoms sit exactly on the three base points (constant maps).
  CHECK(cms::moment_about_bases(sys, res.measure) == 0.0);
}

TEST_CASE("invariant iteration contracts toward the sincos point mass") {
  System sys = cms::make_sincos();
  cms::InvariantOptions opt;
  opt.particles = 2000;
  opt.iterations = 80;
  opt.seed = 3;
  cms::InvariantResult res = cms::estimate_invariant(sys, opt);
  // The unique invariant measure is the point mass at the common fixed
  // point 0 of both maps, at distance 1 from the base point.
  CHECK(res.trace.moments.front() > 0.1);
  CHECK(res.trace.moments.back() == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(res.trace.changes.back() < 1e-4);
  double mass_far = 0.0;  // weighted first moment about 0
  for (const auto& p : res.measure.particles()) mass_far += p.weight * std::abs(p.point.coords[0]);
  CHECK(mass_far < 1e-3);
}
