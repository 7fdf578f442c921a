// cms-cli: drives the C API.  Every subcommand prints a JSON report to
// stdout; artifacts (CSV, PGM) go to the paths given by flags.  Errors are
// one JSON object on stderr.  Exit codes: 0 ok, 1 validation / runtime
// failure, 2 usage error, 3 I/O error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cms/cms.h"
#include <nlohmann/json.hpp>

namespace {

using ojson = nlohmann::ordered_json;

struct ApiError {
  cms_status status;
  std::string message;
};

int exit_code_for(cms_status s) {
  switch (s) {
    case CMS_OK: return 0;
    case CMS_ERR_INVALID_ARGUMENT:
    case CMS_ERR_PARSE: return 2;
    case CMS_ERR_IO: return 3;
    default: return 1;
  }
}

const char* status_name(cms_status s) {
  switch (s) {
    case CMS_OK: return "ok";
    case CMS_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case CMS_ERR_PARSE: return "parse";
    case CMS_ERR_DOMAIN: return "domain";
    case CMS_ERR_VALIDATION: return "validation";
    case CMS_ERR_RESOURCE_LIMIT: return "resource_limit";
    case CMS_ERR_IO: return "io";
    default: return "internal";
  }
}

void check(cms_status s) {
  if (s != CMS_OK) throw ApiError{s, cms_last_error()};
}

struct SystemDeleter {
  void operator()(cms_system* p) const { cms_system_free(p); }
};
struct MeasureDeleter {
  void operator()(cms_measure* p) const { cms_measure_free(p); }
};
struct TrajectoryDeleter {
  void operator()(cms_trajectory* p) const { cms_trajectory_free(p); }
};
struct StringDeleter {
  void operator()(char* p) const { cms_string_free(p); }
};
using SystemPtr = std::unique_ptr<cms_system, SystemDeleter>;
using MeasurePtr = std::unique_ptr<cms_measure, MeasureDeleter>;
using TrajectoryPtr = std::unique_ptr<cms_trajectory, TrajectoryDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

SystemPtr load_system(const std::string& path) {
  cms_system* sys = nullptr;
  check(cms_system_from_file(path.c_str(), &sys));
  return SystemPtr(sys);
}

MeasurePtr load_measure(const cms_system* sys, const std::string& path) {
  cms_measure* m = nullptr;
  check(cms_measure_read_csv(sys, path.c_str(), &m));
  return MeasurePtr(m);
}

MeasurePtr base_measure(const cms_system* sys) {
  cms_measure* m = nullptr;
  check(cms_measure_from_base_points(sys, &m));
  return MeasurePtr(m);
}

// Start measure for sampling-type subcommands: the measure file if given,
// the uniform base-point measure otherwise.
MeasurePtr start_measure(const cms_system* sys, const std::string& measure_path) {
  return measure_path.empty() ? base_measure(sys) : load_measure(sys, measure_path);
}

void print_report(const char* report) {
  if (report) std::fputs(report, stdout);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Per-iteration trace as CSV, flattened from the invariant report JSON.
void write_trace_csv(const ojson& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ApiError{CMS_ERR_IO, "cannot open " + path};
  out << "iteration,moment,change";
  for (const auto& name : trace["panel"]) out << "," << name.get<std::string>();
  out << "\n";
  const auto& integrals = trace["integrals"];
  const auto& moments = trace["moments"];
  const auto& changes = trace["changes"];
  for (std::size_t i = 0; i < integrals.size(); ++i) {
    out << (i + 1) << "," << fmt(moments[i].get<double>()) << ","
        << fmt(changes[i].get<double>());
    for (const auto& v : integrals[i]) out << "," << fmt(v.get<double>());
    out << "\n";
  }
  if (!out.flush()) throw ApiError{CMS_ERR_IO, "short write to " + path};
}

// Viewport fallback for `code --image/--out`: the system file's working box.
bool viewport_from_file(const std::string& path, double* x0, double* x1, double* y0,
                        double* y1) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  ojson j;
  try {
    j = ojson::parse(in);
  } catch (const std::exception&) {
    return false;
  }
  if (!j.contains("space") || !j["space"].contains("box")) return false;
  const ojson& box = j["space"]["box"];
  if (!box.is_array() || box.empty() || box[0].size() != 2) return false;
  *x0 = box[0][0].get<double>();
  *x1 = box[0][1].get<double>();
  if (box.size() > 1) {
    *y0 = box[1][0].get<double>();
    *y1 = box[1][1].get<double>();
  } else {
    *y0 = 0.0;
    *y1 = 1.0;
  }
  return true;
}

ojson own_report(const std::string& operation, ojson params) {
  ojson j;
  j["tool"] = {{"name", "cms"}, {"version", cms_version()}};
  j["operation"] = operation;
  j["params"] = std::move(params);
  return j;
}

void print_own(const ojson& j) {
  std::fputs(j.dump(2).c_str(), stdout);
  std::fputs("\n", stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contractive Markov systems: simulation, invariant measures, coding, "
               "cylinder/thermodynamic checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", []() { return std::string(cms_version()); });

  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = all cores; results never depend on this)")
      ->capture_default_str();

  int rc = 0;  // exit code decided by handlers

  // validate <file> [--samples N --seed S]
  auto* c_validate = app.add_subcommand("validate", "check structure, regions, maps and probabilities");
  std::string v_file;
  long v_samples = 0;
  std::uint64_t v_seed = 0;
  c_validate->add_option("file", v_file, "system JSON file")->required();
  c_validate->add_option("--samples", v_samples, "sample points per vertex (0 = structural only)")
      ->capture_default_str();
  auto* v_seed_opt = c_validate->add_option("--seed", v_seed, "RNG seed (required when sampling)");
  c_validate->callback([&] {
    if (v_samples > 0 && v_seed_opt->count() == 0)
      throw CLI::RequiredError("--seed (with --samples > 0)");
    SystemPtr sys = load_system(v_file);
    int ok = 0;
    StringPtr report;
    char* raw = nullptr;
    check(cms_system_validate(sys.get(), v_samples, v_seed, &ok, &raw));
    report.reset(raw);
    print_report(report.get());
    rc = ok ? 0 : 1;
  });

  // contraction <file> --pairs N --seed S
  auto* c_contraction = app.add_subcommand("contraction", "Monte Carlo contraction-on-average estimate");
  std::string k_file;
  long k_pairs = 0;
  std::uint64_t k_seed = 0;
  c_contraction->add_option("file", k_file, "system JSON file")->required();
  c_contraction->add_option("--pairs", k_pairs, "sampled same-vertex pairs")->required();
  c_contraction->add_option("--seed", k_seed, "RNG seed")->required();
  c_contraction->callback([&] {
    SystemPtr sys = load_system(k_file);
    double sup = 0.0;
    char* raw = nullptr;
    check(cms_contraction_estimate(sys.get(), k_pairs, k_seed, threads, &sup, &raw));
    StringPtr report(raw);
    print_report(report.get());
    rc = sup < 1.0 ? 0 : 1;
  });

  // simulate <file> --start SPEC --steps N --seed S --out traj.csv
  auto* c_simulate = app.add_subcommand("simulate", "run the chain and write the trajectory");
  std::string s_file, s_start, s_out, s_empirical;
  long s_steps = 0, s_burn = 0;
  std::uint64_t s_seed = 0;
  c_simulate->add_option("file", s_file, "system JSON file")->required();
  c_simulate->add_option("--start", s_start,
                         "start point: \"vertex:K\" (base point), coords \"0.1,0.2\", or a word \"0-2-1\"")
      ->required();
  c_simulate->add_option("--steps", s_steps, "number of chain steps")->required();
  c_simulate->add_option("--seed", s_seed, "RNG seed")->required();
  c_simulate->add_option("--out", s_out, "trajectory CSV path")->required();
  c_simulate->add_option("--empirical", s_empirical, "also write the empirical measure CSV here");
  c_simulate->add_option("--burn-in", s_burn, "steps discarded by --empirical")->capture_default_str();
  c_simulate->callback([&] {
    SystemPtr sys = load_system(s_file);
    cms_trajectory* traw = nullptr;
    check(cms_simulate(sys.get(), s_start.c_str(), s_steps, s_seed, &traw));
    TrajectoryPtr traj(traw);
    check(cms_trajectory_write_csv(sys.get(), traj.get(), s_out.c_str()));
    double rate = 0.0;
    check(cms_trajectory_log_cylinder_rate(traj.get(), &rate));
    ojson j = own_report("simulate", {{"start", s_start},
                                      {"steps", s_steps},
                                      {"seed", s_seed},
                                      {"out", s_out}});
    j["length"] = cms_trajectory_length(traj.get());
    j["log_cylinder_rate"] = rate;
    if (!s_empirical.empty()) {
      cms_measure* mraw = nullptr;
      check(cms_trajectory_empirical(sys.get(), traj.get(), s_burn, &mraw));
      MeasurePtr emp(mraw);
      check(cms_measure_write_csv(sys.get(), emp.get(), s_empirical.c_str()));
      j["params"]["burn_in"] = s_burn;
      j["params"]["empirical"] = s_empirical;
      j["empirical_particles"] = cms_measure_size(emp.get());
    }
    print_own(j);
  });

  // invariant <file> --particles P --iters T --seed S --out measure.csv [--trace trace.csv]
  auto* c_invariant = app.add_subcommand("invariant", "iterate the adjoint operator to an invariant measure");
  std::string i_file, i_out, i_trace, i_policy = "split";
  long i_particles = 0;
  int i_iters = 0;
  std::uint64_t i_seed = 0;
  c_invariant->add_option("file", i_file, "system JSON file")->required();
  c_invariant->add_option("--particles", i_particles, "particle budget")->required();
  c_invariant->add_option("--iters,--iterations", i_iters, "operator iterations")->required();
  c_invariant->add_option("--seed", i_seed, "RNG seed")->required();
  c_invariant->add_option("--out", i_out, "invariant measure CSV path")->required();
  c_invariant->add_option("--trace", i_trace, "per-iteration trace CSV path");
  c_invariant->add_option("--policy", i_policy, "\"split\" (exact pushforward + resample) or \"resample\"")
      ->capture_default_str();
  c_invariant->callback([&] {
    SystemPtr sys = load_system(i_file);
    cms_measure* mraw = nullptr;
    char* rraw = nullptr;
    check(cms_estimate_invariant(sys.get(), i_particles, i_iters, i_policy.c_str(), i_seed,
                                 threads, &mraw, &rraw));
    MeasurePtr measure(mraw);
    StringPtr report(rraw);
    check(cms_measure_write_csv(sys.get(), measure.get(), i_out.c_str()));
    if (!i_trace.empty()) write_trace_csv(ojson::parse(report.get())["trace"], i_trace);
    print_report(report.get());
  });

  // entropy <file> --measure m.csv [--cross-steps N --seed S [--start SPEC]]
  auto* c_entropy = app.add_subcommand("entropy", "entropy of the generalized Markov measure");
  std::string e_file, e_measure, e_start = "vertex:1";
  long e_cross = 0;
  std::uint64_t e_seed = 0;
  c_entropy->add_option("file", e_file, "system JSON file")->required();
  c_entropy->add_option("--measure", e_measure, "invariant measure CSV")->required();
  c_entropy->add_option("--cross-steps", e_cross,
                        "also simulate this many steps and report the log-cylinder cross-estimate");
  auto* e_seed_opt = c_entropy->add_option("--seed", e_seed, "RNG seed (required with --cross-steps)");
  c_entropy->add_option("--start", e_start, "start spec for the cross-estimate chain")
      ->capture_default_str();
  c_entropy->callback([&] {
    if (e_cross > 0 && e_seed_opt->count() == 0)
      throw CLI::RequiredError("--seed (with --cross-steps)");
    SystemPtr sys = load_system(e_file);
    MeasurePtr m = load_measure(sys.get(), e_measure);
    double h = 0.0;
    check(cms_entropy(sys.get(), m.get(), &h));
    ojson params = {{"measure", e_measure}};
    if (e_cross > 0) {
      params["cross_steps"] = e_cross;
      params["seed"] = e_seed;
      params["start"] = e_start;
    }
    ojson j = own_report("entropy", std::move(params));
    j["entropy"] = h;
    if (e_cross > 0) {
      cms_trajectory* traw = nullptr;
      check(cms_simulate(sys.get(), e_start.c_str(), e_cross, e_seed, &traw));
      TrajectoryPtr traj(traw);
      double rate = 0.0;
      check(cms_trajectory_log_cylinder_rate(traj.get(), &rate));
      j["log_cylinder_rate"] = rate;
      j["cross_estimate"] = -rate;
      j["relative_gap"] = h != 0.0 ? (-rate - h) / h : -rate - h;
    }
    print_own(j);
  });

  // code <file> (--word W | --depth D --samples N --seed S [--out pts.csv --image img.pgm ...])
  auto* c_code = app.add_subcommand("code", "backward coding: one word, or a sampled attractor render");
  std::string o_file, o_word, o_measure, o_out, o_image, o_viewport;
  double o_rate = -1.0, o_prefactor = -1.0;
  int o_depth = 0, o_width = 256, o_height = 256;
  long o_samples = 0;
  std::uint64_t o_seed = 0;
  c_code->add_option("file", o_file, "system JSON file")->required();
  c_code->add_option("--word", o_word, "single word to code, e.g. \"0-2-1\" or \"0,2,1\"");
  c_code->add_option("--rate", o_rate, "contraction rate for the tail certificate (with --word)");
  c_code->add_option("--prefactor", o_prefactor, "tail-certificate prefactor (with --word)");
  c_code->add_option("--measure", o_measure, "start measure CSV (default: base points)");
  c_code->add_option("--depth", o_depth, "word length for sampling");
  c_code->add_option("--samples", o_samples, "number of sampled words");
  auto* o_seed_opt = c_code->add_option("--seed", o_seed, "RNG seed");
  c_code->add_option("--out", o_out, "coded-point cell CSV path");
  c_code->add_option("--image", o_image, "PGM histogram image path");
  c_code->add_option("--width", o_width, "image width")->capture_default_str();
  c_code->add_option("--height", o_height, "image height")->capture_default_str();
  c_code->add_option("--viewport", o_viewport, "x0,y0,x1,y1 (default: the system working box)");
  c_code->callback([&] {
    SystemPtr sys = load_system(o_file);
    if (!o_word.empty()) {
      char* raw = nullptr;
      check(cms_code_word(sys.get(), o_word.c_str(), o_rate, o_prefactor, &raw));
      StringPtr report(raw);
      print_report(report.get());
      return;
    }
    if (o_depth <= 0 || o_samples <= 0) throw CLI::RequiredError("--word, or --depth and --samples");
    if (o_seed_opt->count() == 0) throw CLI::RequiredError("--seed (when sampling)");
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    if (!o_viewport.empty()) {
      std::istringstream vp(o_viewport);
      char c1, c2, c3;
      if (!(vp >> x0 >> c1 >> y0 >> c2 >> x1 >> c3 >> y1) || c1 != ',' || c2 != ',' || c3 != ',')
        throw CLI::ValidationError("--viewport", "expected x0,y0,x1,y1");
    } else if (!viewport_from_file(o_file, &x0, &x1, &y0, &y1)) {
      throw CLI::RequiredError("--viewport (no working box in the system file)");
    }
    MeasurePtr start;
    if (!o_measure.empty()) start = load_measure(sys.get(), o_measure);
    char* raw = nullptr;
    check(cms_render(sys.get(), start.get(), o_samples, o_depth, o_seed, o_width, o_height, x0,
                     x1, y0, y1, o_image.empty() ? nullptr : o_image.c_str(),
                     o_out.empty() ? nullptr : o_out.c_str(), &raw));
    StringPtr report(raw);
    print_report(report.get());
  });

  // check {cylinders, conditional, pushforward, decay, extension}
  auto* c_check = app.add_subcommand("check", "statistical and algebraic identity checks");
  c_check->require_subcommand(1);

  auto* c_cyl = c_check->add_subcommand("cylinders", "additivity and stationarity of cylinder masses");
  std::string cy_file, cy_measure;
  int cy_maxlen = 5;
  c_cyl->add_option("file", cy_file, "system JSON file")->required();
  c_cyl->add_option("--measure", cy_measure, "measure CSV")->required();
  c_cyl->add_option("--max-len", cy_maxlen, "maximum word length")->capture_default_str();
  c_cyl->callback([&] {
    SystemPtr sys = load_system(cy_file);
    MeasurePtr m = load_measure(sys.get(), cy_measure);
    char* raw = nullptr;
    check(cms_cylinder_consistency(sys.get(), m.get(), cy_maxlen, &raw));
    StringPtr report(raw);
    print_report(report.get());
  });

  auto* c_cond = c_check->add_subcommand("conditional", "empirical next-edge conditionals vs probabilities");
  std::string cd_file, cd_measure;
  int cd_wordlen = 0;
  long cd_words = 0;
  std::uint64_t cd_seed = 0;
  c_cond->add_option("file", cd_file, "system JSON file")->required();
  c_cond->add_option("--measure", cd_measure, "measure CSV")->required();
  c_cond->add_option("--word-len", cd_wordlen, "cylinder word length")->required();
  c_cond->add_option("--words", cd_words, "sampled words")->required();
  c_cond->add_option("--seed", cd_seed, "RNG seed")->required();
  c_cond->callback([&] {
    SystemPtr sys = load_system(cd_file);
    MeasurePtr m = load_measure(sys.get(), cd_measure);
    char* raw = nullptr;
    check(cms_conditional_check(sys.get(), m.get(), cd_wordlen, cd_words, cd_seed, threads, &raw));
    StringPtr report(raw);
    print_report(report.get());
  });

  auto* c_push = c_check->add_subcommand("pushforward", "chain endpoints vs coded words from the same draws");
  std::string pf_file, pf_measure;
  int pf_depth = 0;
  long pf_samples = 0;
  std::uint64_t pf_seed = 0;
  c_push->add_option("file", pf_file, "system JSON file")->required();
  c_push->add_option("--measure", pf_measure, "start measure CSV (default: base points)");
  c_push->add_option("--depth", pf_depth, "word length")->required();
  c_push->add_option("--samples", pf_samples, "sampled words")->required();
  c_push->add_option("--seed", pf_seed, "RNG seed")->required();
  c_push->callback([&] {
    SystemPtr sys = load_system(pf_file);
    MeasurePtr start = start_measure(sys.get(), pf_measure);
    char* raw = nullptr;
    check(cms_pushforward_check(sys.get(), start.get(), pf_depth, pf_samples, pf_seed, threads, &raw));
    StringPtr report(raw);
    print_report(report.get());
  });

  auto* c_decay = c_check->add_subcommand("decay", "mean coding increments by depth with a fitted slope");
  std::string dc_file, dc_measure, dc_depths = "5,10,20,40";
  long dc_words = 0;
  std::uint64_t dc_seed = 0;
  c_decay->add_option("file", dc_file, "system JSON file")->required();
  c_decay->add_option("--measure", dc_measure, "start measure CSV (default: base points)");
  c_decay->add_option("--depths", dc_depths, "comma-separated depths")->capture_default_str();
  c_decay->add_option("--words", dc_words, "sampled words per table")->required();
  c_decay->add_option("--seed", dc_seed, "RNG seed")->required();
  c_decay->callback([&] {
    SystemPtr sys = load_system(dc_file);
    MeasurePtr start = start_measure(sys.get(), dc_measure);
    std::vector<int> depths;
    std::istringstream ds(dc_depths);
    std::string tok;
    while (std::getline(ds, tok, ',')) {
      try {
        depths.push_back(std::stoi(tok));
      } catch (const std::exception&) {
        throw CLI::ValidationError("--depths", "expected comma-separated integers");
      }
    }
    if (depths.empty()) throw CLI::ValidationError("--depths", "need at least one depth");
    char* raw = nullptr;
    check(cms_decay_report(sys.get(), start.get(), depths.data(), static_cast<int>(depths.size()),
                           dc_words, dc_seed, threads, &raw));
    StringPtr report(raw);
    print_report(report.get());
  });

  auto* c_ext = c_check->add_subcommand("extension", "suffix-cylinder masses of word atoms vs integrals");
  std::string x_file, x_measure;
  int x_maxlen = 3;
  c_ext->add_option("file", x_file, "system JSON file")->required();
  c_ext->add_option("--measure", x_measure, "measure CSV")->required();
  c_ext->add_option("--max-len", x_maxlen, "maximum suffix length")->capture_default_str();
  c_ext->callback([&] {
    SystemPtr sys = load_system(x_file);
    MeasurePtr m = load_measure(sys.get(), x_measure);
    char* raw = nullptr;
    check(cms_natural_extension_check(sys.get(), m.get(), x_maxlen, &raw));
    StringPtr report(raw);
    print_report(report.get());
  });

  // gmeasure {oracle, check}
  auto* c_gm = app.add_subcommand("gmeasure", "g-measure oracles and operator identities");
  c_gm->require_subcommand(1);

  auto* c_oracle = c_gm->add_subcommand("oracle", "stationary distribution and entropy of a Markov g");
  std::string g_file, g_q;
  c_oracle->add_option("--graph", g_file, "system JSON file supplying the digraph")->required();
  c_oracle->add_option("--q", g_q, "edge-to-edge stochastic matrix CSV (default: the system's q parameter)");
  c_oracle->callback([&] {
    SystemPtr sys = load_system(g_file);
    char* raw = nullptr;
    check(cms_gmeasure_oracle(sys.get(), g_q.empty() ? nullptr : g_q.c_str(), &raw));
    StringPtr report(raw);
    print_report(report.get());
  });

  auto* c_ruelle = c_gm->add_subcommand("check", "transfer operator vs Markov operator on sampled words");
  std::string r_file;
  std::vector<std::string> r_phis;
  long r_points = 0;
  std::uint64_t r_seed = 0;
  c_ruelle->add_option("file", r_file, "system JSON file (word backend)")->required();
  c_ruelle->add_option("--phi", r_phis, "test function over s0..s{L-1} (repeatable)")->required();
  c_ruelle->add_option("--points", r_points, "sampled word points")->required();
  c_ruelle->add_option("--seed", r_seed, "RNG seed")->required();
  c_ruelle->callback([&] {
    SystemPtr sys = load_system(r_file);
    std::vector<const char*> phis;
    phis.reserve(r_phis.size());
    for (const std::string& p : r_phis) phis.push_back(p.c_str());
    char* raw = nullptr;
    check(cms_ruelle_check(sys.get(), phis.data(), static_cast<int>(phis.size()), r_points,
                           r_seed, threads, &raw));
    StringPtr report(raw);
    print_report(report.get());
  });

  // fixtures {list, emit}
  auto* c_fixtures = app.add_subcommand("fixtures", "built-in example systems");
  c_fixtures->require_subcommand(1);

  auto* c_list = c_fixtures->add_subcommand("list", "list fixture names");
  c_list->callback([&] {
    char* raw = nullptr;
    check(cms_fixture_list(&raw));
    StringPtr report(raw);
    print_report(report.get());
  });

  auto* c_emit = c_fixtures->add_subcommand("emit", "write a fixture as a system JSON file");
  std::string f_name, f_params, f_out;
  c_emit->add_option("name", f_name, "fixture name (see `fixtures list`)")->required();
  c_emit->add_option("--params", f_params, "JSON object of fixture parameters");
  c_emit->add_option("--out", f_out, "output path (default: stdout)");
  c_emit->callback([&] {
    cms_system* sraw = nullptr;
    check(cms_system_fixture(f_name.c_str(), f_params.empty() ? nullptr : f_params.c_str(), &sraw));
    SystemPtr sys(sraw);
    char* raw = nullptr;
    check(cms_system_emit(sys.get(), &raw));
    StringPtr text(raw);
    if (f_out.empty()) {
      print_report(text.get());
    } else {
      std::ofstream out(f_out, std::ios::binary);
      if (!out) throw ApiError{CMS_ERR_IO, "cannot open " + f_out};
      out << text.get();
      if (!out.flush()) throw ApiError{CMS_ERR_IO, "short write to " + f_out};
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    ojson err = {{"error", {{"status", "usage"}, {"message", e.what()}}}};
    std::fputs(err.dump(2).c_str(), stderr);
    std::fputs("\n", stderr);
    return 2;
  } catch (const ApiError& e) {
    ojson err = {{"error", {{"status", status_name(e.status)}, {"message", e.message}}}};
    std::fputs(err.dump(2).c_str(), stderr);
    std::fputs("\n", stderr);
    return exit_code_for(e.status);
  }
  return rc;
}
