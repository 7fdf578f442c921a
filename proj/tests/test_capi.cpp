// Exercises the shared-library C interface end to end: lifecycle, report
// envelopes, and the error-status mapping.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "cms/cms.h"
#include "doctest.h"

using json = nlohmann::json;

namespace {

struct SysFree {
  void operator()(cms_system* s) const { cms_system_free(s); }
};
struct MeasFree {
  void operator()(cms_measure* m) const { cms_measure_free(m); }
};
struct TrajFree {
  void operator()(cms_trajectory* t) const { cms_trajectory_free(t); }
};
using SysPtr = std::unique_ptr<cms_system, SysFree>;
using MeasPtr = std::unique_ptr<cms_measure, MeasFree>;
using TrajPtr = std::unique_ptr<cms_trajectory, TrajFree>;

SysPtr fixture(const char* name, const char* params = nullptr) {
  cms_system* s = nullptr;
  REQUIRE(cms_system_fixture(name, params, &s) == CMS_OK);
  return SysPtr(s);
}

std::string take(char* s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  cms_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("version and fixture catalog") {
  const char* v = cms_version();
  REQUIRE(v != nullptr);
  CHECK(std::string(v).find('.') != std::string::npos);

  char* listing = nullptr;
  REQUIRE(cms_fixture_list(&listing) == CMS_OK);
  json j = json::parse(take(listing));
  REQUIRE(j.is_array());
  bool has_fc3 = false;
  for (const auto& row : j) has_fc3 = has_fc3 || row.at("name") == "fc3";
  CHECK(has_fc3);
  CHECK(j.size() >= 6);
}

TEST_CASE("system lifecycle: fixture -> emit -> from_text round trip") {
  SysPtr sys = fixture("fc3");
  char* text1 = nullptr;
  REQUIRE(cms_system_emit(sys.get(), &text1) == CMS_OK);
  std::string t1 = take(text1);

  cms_system* back = nullptr;
  REQUIRE(cms_system_from_text(t1.c_str(), &back) == CMS_OK);
  SysPtr back_p(back);
  char* text2 = nullptr;
  REQUIRE(cms_system_emit(back, &text2) == CMS_OK);
  CHECK(take(text2) == t1);

  // Through a file as well.
  const char* path = "/tmp/cms_capi_sys.json";
  {
    std::ofstream out(path);
    out << t1;
  }
  cms_system* from_file = nullptr;
  REQUIRE(cms_system_from_file(path, &from_file) == CMS_OK);
  SysPtr ff(from_file);
  char* text3 = nullptr;
  REQUIRE(cms_system_emit(from_file, &text3) == CMS_OK);
  CHECK(take(text3) == t1);
}

TEST_CASE("failure statuses and cms_last_error") {
  cms_system* out = nullptr;
  CHECK(cms_system_fixture("no-such-fixture", nullptr, &out) == CMS_ERR_INVALID_ARGUMENT);
  CHECK(out == nullptr);
  REQUIRE(cms_last_error() != nullptr);
  CHECK(std::string(cms_last_error()).find("no-such-fixture") != std::string::npos);

  CHECK(cms_system_from_text("{nope", &out) == CMS_ERR_PARSE);
  CHECK(std::string(cms_last_error()).size() > 0);
  CHECK(cms_system_from_file("/tmp/cms-missing-9321.json", &out) == CMS_ERR_IO);
  CHECK(cms_system_from_text(nullptr, &out) == CMS_ERR_INVALID_ARGUMENT);
  CHECK(cms_system_emit(nullptr, nullptr) == CMS_ERR_INVALID_ARGUMENT);

  SysPtr sys = fixture("fc3");
  double x = 0.0;
  CHECK(cms_energy_eval(sys.get(), "5-0-zz", &x) == CMS_ERR_PARSE);
  CHECK(cms_weakstar_distance(sys.get(), nullptr, nullptr, "auto", &x) ==
        CMS_ERR_INVALID_ARGUMENT);

  // Bad enum strings are invalid arguments, not crashes.
  MeasPtr base;
  {
    cms_measure* m = nullptr;
    REQUIRE(cms_measure_from_base_points(sys.get(), &m) == CMS_OK);
    base.reset(m);
  }
  cms_measure* stepped = nullptr;
  CHECK(cms_apply_u_star(sys.get(), base.get(), "bogus", 100, 1, 0, &stepped) ==
        CMS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("validation report carries the envelope and echoes params") {
  SysPtr sys = fixture("sincos");
  int ok = 0;
  char* rep = nullptr;
  REQUIRE(cms_system_validate(sys.get(), 150, 99, &ok, &rep) == CMS_OK);
  CHECK(ok == 1);
  json j = json::parse(take(rep));
  CHECK(j.at("tool").at("name") == "cms");
  CHECK(j.at("tool").at("version") == std::string(cms_version()));
  CHECK(j.at("operation") == "validate");
  CHECK(j.at("params").at("samples") == 150);
  CHECK(j.at("params").at("seed") == 99);
  CHECK(j.at("system").at("vertices") == 1);
  CHECK(j.at("ok") == true);
  CHECK(j.at("violations").empty());
}

TEST_CASE("contraction estimate through the C layer") {
  SysPtr sys = fixture("sincos");
  double sup = 0.0;
  char* rep = nullptr;
  REQUIRE(cms_contraction_estimate(sys.get(), 20000, 42, 0, &sup, &rep) == CMS_OK);
  json j = json::parse(take(rep));
  CHECK(sup > 0.9);
  CHECK(sup <= 45.0 / 48.0 + 1e-9);
  CHECK(j.at("contraction").at("sup_estimate") == doctest::Approx(sup).epsilon(1e-15));
  CHECK(j.at("contraction").at("contractive") == true);
}

TEST_CASE("measures: base points, CSV round trip, adjoint step, entropy") {
  SysPtr sys = fixture("fc3");
  cms_measure* m0 = nullptr;
  REQUIRE(cms_measure_from_base_points(sys.get(), &m0) == CMS_OK);
  MeasPtr base(m0);
  CHECK(cms_measure_size(base.get()) == 3);

  const char* csv = "/tmp/cms_capi_measure.csv";
  REQUIRE(cms_measure_write_csv(sys.get(), base.get(), csv) == CMS_OK);
  cms_measure* back = nullptr;
  REQUIRE(cms_measure_read_csv(sys.get(), csv, &back) == CMS_OK);
  MeasPtr back_p(back);
  CHECK(cms_measure_size(back) == 3);
  double dist = -1.0;
  REQUIRE(cms_weakstar_distance(sys.get(), base.get(), back, "auto", &dist) == CMS_OK);
  CHECK(dist == 0.0);

  // One exact splitting step: every fc3 vertex has two out-edges.
  cms_measure* stepped = nullptr;
  REQUIRE(cms_apply_u_star(sys.get(), base.get(), "split", 1000, 7, 0, &stepped) == CMS_OK);
  MeasPtr stepped_p(stepped);
  CHECK(cms_measure_size(stepped) == 6);

  double h = 0.0;
  REQUIRE(cms_entropy(sys.get(), base.get(), &h) == CMS_OK);
  CHECK(h == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("invariant estimation emits trace and measure") {
  SysPtr sys = fixture("fc3");
  cms_measure* m = nullptr;
  char* rep = nullptr;
  REQUIRE(cms_estimate_invariant(sys.get(), 600, 25, "split", 11, 0, &m, &rep) == CMS_OK);
  MeasPtr inv(m);
  json j = json::parse(take(rep));
  CHECK(j.at("operation") == "invariant");
  CHECK(j.at("params").at("particles") == 600);
  CHECK(j.at("final_particles") == cms_measure_size(inv.get()));
  CHECK(j.at("trace").at("moments").size() == 25);
  CHECK(j.at("final_moment") == 0.0);  // constant maps sit on the base points
  double h = 0.0;
  REQUIRE(cms_entropy(sys.get(), inv.get(), &h) == CMS_OK);
  CHECK(h == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("trajectories: length, csv, log-cylinder rate, empirical measure") {
  SysPtr sys = fixture("fc3");
  cms_trajectory* t = nullptr;
  REQUIRE(cms_simulate(sys.get(), "vertex:1", 400, 13, &t) == CMS_OK);
  TrajPtr traj(t);
  CHECK(cms_trajectory_length(t) == 400);

  double rate = 0.0;
  REQUIRE(cms_trajectory_log_cylinder_rate(t, &rate) == CMS_OK);
  CHECK(rate == doctest::Approx(-std::log(2.0)).epsilon(1e-12));

  const char* csv = "/tmp/cms_capi_traj.csv";
  REQUIRE(cms_trajectory_write_csv(sys.get(), t, csv) == CMS_OK);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "k,vertex,edge,prob,c0");

  cms_measure* emp = nullptr;
  REQUIRE(cms_trajectory_empirical(sys.get(), t, 100, &emp) == CMS_OK);
  MeasPtr emp_p(emp);
  CHECK(cms_measure_size(emp) == 301);

  CHECK(cms_simulate(sys.get(), "vertex:9", 5, 1, &t) == CMS_ERR_INVALID_ARGUMENT);
  CHECK(cms_simulate(sys.get(), "zzz", 5, 1, &t) == CMS_ERR_PARSE);
}

TEST_CASE("coding reports through the C layer") {
  SysPtr sys = fixture("halfmap");
  char* rep = nullptr;
  REQUIRE(cms_code_word(sys.get(), "0-0-0", 0.5, 2.0, &rep) == CMS_OK);
  json j = json::parse(take(rep));
  CHECK(j.at("operation") == "code");
  CHECK(j.at("depth") == 3);
  REQUIRE(j.at("increments").size() == 3);
  CHECK(j.at("increments")[0].get<double>() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(j.at("point")[0].get<double>() == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(j.contains("tail_bound"));

  MeasPtr base;
  {
    cms_measure* m = nullptr;
    REQUIRE(cms_measure_from_base_points(sys.get(), &m) == CMS_OK);
    base.reset(m);
  }
  const int depths[3] = {2, 4, 8};
  REQUIRE(cms_decay_report(sys.get(), base.get(), depths, 3, 50, 3, 0, &rep) == CMS_OK);
  json dj = json::parse(take(rep));
  CHECK(dj.at("decay").at("fitted_slope").get<double>() ==
        doctest::Approx(std::log(0.5)).epsilon(1e-9));

  REQUIRE(cms_pushforward_check(sys.get(), base.get(), 20, 200, 5, 0, &rep) == CMS_OK);
  json pj = json::parse(take(rep));
  CHECK(pj.at("pushforward").at("weakstar").get<double>() < 1e-4);
}

TEST_CASE("render writes image and csv and reports the hit count") {
  SysPtr sys = fixture("sierpinski");
  char* rep = nullptr;
  const char* pgm = "/tmp/cms_capi_render.pgm";
  const char* csv = "/tmp/cms_capi_render.csv";
  REQUIRE(cms_render(sys.get(), nullptr, 3000, 12, 99, 48, 48, 0.0, 1.0, 0.0, 0.87, pgm, csv,
                     &rep) == CMS_OK);
  json j = json::parse(take(rep));
  CHECK(j.at("hits") == 3000);
  CHECK(j.at("nonzero_cells").get<long>() > 10);
  std::ifstream img(pgm);
  std::string magic;
  img >> magic;
  CHECK(magic == "P5");
  std::ifstream pts(csv);
  std::string header;
  std::getline(pts, header);
  CHECK(header == "c0,c1,count");
}

TEST_CASE("cylinder functionals and the g-measure oracle") {
  SysPtr fc3 = fixture("fc3");
  MeasPtr base;
  {
    cms_measure* m = nullptr;
    REQUIRE(cms_measure_from_base_points(fc3.get(), &m) == CMS_OK);
    base.reset(m);
  }
  char* rep = nullptr;
  REQUIRE(cms_cylinder_mass(fc3.get(), base.get(), "1-3-4", &rep) == CMS_OK);
  json j = json::parse(take(rep));
  CHECK(j.at("cylinder").at("mass").get<double>() ==
        doctest::Approx(0.125 / 3.0).epsilon(1e-12));

  REQUIRE(cms_cylinder_consistency(fc3.get(), base.get(), 4, &rep) == CMS_OK);
  CHECK(json::parse(take(rep)).at("consistency").at("max_abs_residual").get<double>() <= 1e-12);

  REQUIRE(cms_conditional_check(fc3.get(), base.get(), 3, 100, 17, 0, &rep) == CMS_OK);
  CHECK(json::parse(take(rep)).at("conditional").at("max_abs_dev").get<double>() <= 1e-12);

  double e = 0.0;
  REQUIRE(cms_energy_eval(fc3.get(), "1-3", &e) == CMS_OK);
  CHECK(e == doctest::Approx(std::log(0.5)).epsilon(1e-12));
  REQUIRE(cms_energy_eval(fc3.get(), "0-2", &e) == CMS_OK);
  CHECK(std::isinf(e));

  // Embedded q parameter on the golden fixture.
  SysPtr golden = fixture("gm-golden");
  REQUIRE(cms_gmeasure_oracle(golden.get(), nullptr, &rep) == CMS_OK);
  json g = json::parse(take(rep));
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  CHECK(g.at("oracle").at("entropy").get<double>() == doctest::Approx(std::log(phi)).epsilon(1e-6));
  CHECK(g.at("oracle").at("residual").get<double>() <= 1e-10);

  // Explicit q from CSV on the Bernoulli fixture (which embeds none).
  SysPtr bern = fixture("gm-bernoulli");
  CHECK(cms_gmeasure_oracle(bern.get(), nullptr, &rep) == CMS_ERR_INVALID_ARGUMENT);
  const char* qcsv = "/tmp/cms_capi_q.csv";
  {
    std::ofstream out(qcsv);
    out << "0.5,0.5\n0.5,0.5\n";
  }
  REQUIRE(cms_gmeasure_oracle(bern.get(), qcsv, &rep) == CMS_OK);
  json b = json::parse(take(rep));
  CHECK(b.at("oracle").at("entropy").get<double>() ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  const char* phis[2] = {"s0", "s0 * s1 + 0.25"};
  REQUIRE(cms_ruelle_check(bern.get(), phis, 2, 300, 21, 0, &rep) == CMS_OK);
  CHECK(json::parse(take(rep)).at("ruelle").at("max_abs_dev").get<double>() <= 1e-12);

  cms_measure* bm = nullptr;
  REQUIRE(cms_estimate_invariant(bern.get(), 2000, 30, "split", 9, 0, &bm, nullptr) == CMS_OK);
  MeasPtr bmp(bm);
  REQUIRE(cms_natural_extension_check(bern.get(), bm, 3, &rep) == CMS_OK);
  json ext = json::parse(take(rep));
  CHECK(ext.at("extension").at("words") == 14);
  CHECK(ext.at("extension").at("max_sigma").get<double>() < 5.0);
}
