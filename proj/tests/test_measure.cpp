// Particle measures: construction invariants, sampling index, CSV round
// trips, moments and weak-star distances.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/fixtures.hpp"
#include "core/measure.hpp"
#include "core/panel.hpp"
#include "core/util.hpp"
#include "doctest.h"

using cms::Particle;
using cms::ParticleMeasure;
using cms::Point;
using cms::System;

namespace {
std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}
}  // namespace

TEST_CASE("base-point measure is uniform over vertices") {
  System sys = cms::make_fc3();
  ParticleMeasure m = ParticleMeasure::from_base_points(sys);
  REQUIRE(m.size() == 3);
  CHECK(m.total_weight() == doctest::Approx(1.0).epsilon(1e-15));
  for (const Particle& p : m.particles()) CHECK(p.weight == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(cms::moment_about_bases(sys, m) == 0.0);
}

TEST_CASE("construction validates tags, weights and representation") {
  System sys = cms::make_fc3();
  SUBCASE("atom outside its tagged region") {
    std::vector<Particle> ps = {{Point::euclid({1.0}), 2, 1.0}};
    CHECK_THROWS_AS(ParticleMeasure::from_particles(sys, ps), cms::Error);
  }
  SUBCASE("weights must total one within 1e-12") {
    std::vector<Particle> ps = {{Point::euclid({1.0}), 1, 0.5},
                                {Point::euclid({2.0}), 2, 0.4999}};
    CHECK_THROWS_AS(ParticleMeasure::from_particles(sys, ps), cms::Error);
  }
  SUBCASE("negative weights are rejected") {
    std::vector<Particle> ps = {{Point::euclid({1.0}), 1, 1.5},
                                {Point::euclid({2.0}), 2, -0.5}};
    CHECK_THROWS_AS(ParticleMeasure::from_particles(sys, ps), cms::Error);
  }
  SUBCASE("wrong representation kind") {
    std::vector<Particle> ps = {{Point::word({0}), 1, 1.0}};
    CHECK_THROWS_AS(ParticleMeasure::from_particles(sys, ps), cms::Error);
  }
  SUBCASE("a million equal weights still pass the 1e-12 total check") {
    std::vector<Particle> ps(1000000, Particle{Point::euclid({1.0}), 1, 1e-6});
    ParticleMeasure m = ParticleMeasure::from_particles(sys, std::move(ps));
    CHECK(m.size() == 1000000);
  }
}

TEST_CASE("index_for_unit walks the cumulative weights") {
  System sys = cms::make_fc3();
  std::vector<Particle> ps = {{Point::euclid({1.0}), 1, 0.25},
                              {Point::euclid({2.0}), 2, 0.25},
                              {Point::euclid({3.0}), 3, 0.5}};
  ParticleMeasure m = ParticleMeasure::from_particles(sys, ps);
  CHECK(m.index_for_unit(0.0) == 0);
  CHECK(m.index_for_unit(0.24) == 0);
  CHECK(m.index_for_unit(0.25) == 1);
  CHECK(m.index_for_unit(0.49) == 1);
  CHECK(m.index_for_unit(0.5) == 2);
  CHECK(m.index_for_unit(0.999999) == 2);
}

TEST_CASE("euclid CSV round trip is byte-stable") {
  System sys = cms::make_fc3();
  std::vector<Particle> ps = {{Point::euclid({1.0}), 1, 0.125},
                              {Point::euclid({2.0}), 2, 0.375},
                              {Point::euclid({3.0}), 3, 0.5}};
  ParticleMeasure m = ParticleMeasure::from_particles(sys, ps);
  const std::string p1 = temp_path("cms_measure_rt1.csv");
  const std::string p2 = temp_path("cms_measure_rt2.csv");
  m.write_csv(sys, p1);
  ParticleMeasure back = ParticleMeasure::read_csv(sys, p1);
  REQUIRE(back.size() == m.size());
  back.write_csv(sys, p2);
  CHECK(cms::read_text_file(p1) == cms::read_text_file(p2));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("word CSV round trip keeps symbols") {
  System sys = cms::make_gm_golden();
  std::vector<Particle> ps = {{Point::word({0}), 1, 0.5}, {Point::word({1, 2}), 1, 0.5}};
  ParticleMeasure m = ParticleMeasure::from_particles(sys, ps);
  const std::string p1 = temp_path("cms_measure_word.csv");
  m.write_csv(sys, p1);
  ParticleMeasure back = ParticleMeasure::read_csv(sys, p1);
  REQUIRE(back.size() == 2);
  CHECK(back.particles()[1].point.symbols == std::vector<cms::EdgeId>{1, 2});
  std::remove(p1.c_str());
}

TEST_CASE("1-d Wasserstein distance matches hand values") {
  System sys = cms::make_halfmap();
  auto dirac = [&](double x, double w) { return Particle{Point::euclid({x}), 1, w}; };
  ParticleMeasure a = ParticleMeasure::from_particles(sys, {dirac(0.0, 1.0)});
  ParticleMeasure b = ParticleMeasure::from_particles(sys, {dirac(1.0, 1.0)});
  CHECK(cms::weakstar_distance(sys, a, b) == doctest::Approx(1.0).epsilon(1e-15));

  // Half the mass moved by 1: W1 = 0.5.
  ParticleMeasure c = ParticleMeasure::from_particles(sys, {dirac(0.0, 0.5), dirac(1.0, 0.5)});
  CHECK(cms::weakstar_distance(sys, a, c) == doctest::Approx(0.5).epsilon(1e-15));

  // Quantile transport: half the mass moves 0.25 up, half 0.25 down.
  ParticleMeasure d =
      ParticleMeasure::from_particles(sys, {dirac(0.25, 0.5), dirac(0.75, 0.5)});
  CHECK(cms::weakstar_distance(sys, c, d) == doctest::Approx(0.25).epsilon(1e-15));

  // Identical measures built in different atom order are at distance zero.
  ParticleMeasure e =
      ParticleMeasure::from_particles(sys, {dirac(0.75, 0.5), dirac(0.25, 0.5)});
  CHECK(cms::weakstar_distance(sys, d, e) == 0.0);

  CHECK(cms::weakstar_distance(sys, a, b) == cms::weakstar_distance(sys, b, a));
}

TEST_CASE("panel distance separates measures on 2-d and word backends") {
  System sier = cms::make_sierpinski();
  ParticleMeasure base = ParticleMeasure::from_base_points(sier);
  CHECK(cms::weakstar_distance(sier, base, base) == 0.0);
  std::vector<Particle> moved;
  for (const Particle& p : base.particles()) {
    Particle q = p;
    q.point.coords[0] += 0.05;
    moved.push_back(q);
  }
  ParticleMeasure shifted = ParticleMeasure::from_particles(sier, std::move(moved));
  CHECK(cms::weakstar_distance(sier, base, shifted) > 0.0);

  System golden = cms::make_gm_golden();
  ParticleMeasure g1 = ParticleMeasure::from_particles(golden, {{Point::word({0}), 1, 1.0}});
  ParticleMeasure g2 = ParticleMeasure::from_particles(golden, {{Point::word({1, 2}), 1, 1.0}});
  CHECK(cms::weakstar_distance(golden, g1, g2) > 0.0);
}

TEST_CASE("panel integrals: vertex indicators recover vertex masses") {
  System sys = cms::make_fc3();
  ParticleMeasure m = ParticleMeasure::from_base_points(sys);
  cms::Panel panel = cms::default_panel(sys);
  auto vals = cms::panel_integrals(panel, m);
  REQUIRE(vals.size() == panel.size());
  for (std::size_t i = 0; i < panel.size(); ++i) {
    if (panel[i].name.rfind("vertex", 0) == 0)
      CHECK(vals[i] == doctest::Approx(1.0 / 3).epsilon(1e-15));
  }
}
