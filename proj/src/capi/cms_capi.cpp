// C ABI wrapper over the core library: opaque handles, status codes, JSON
// report strings.  All C++ exceptions stop here.

#include "cms/cms.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include "core/coding.hpp"
#include "core/error.hpp"
#include "core/fixtures.hpp"
#include "core/markov_operator.hpp"
#include "core/measure.hpp"
#include "core/panel.hpp"
#include "core/report.hpp"
#include "core/simulate.hpp"
#include "core/sysfile.hpp"
#include "core/system.hpp"
#include "core/thermo.hpp"
#include "core/util.hpp"
#include "core/version.hpp"

struct cms_system {
  cms::System impl;
};
struct cms_measure {
  cms::ParticleMeasure impl;
};
struct cms_trajectory {
  cms::Trajectory impl;
};

namespace {

thread_local std::string t_last_error;

cms_status status_of(cms::ErrorCode code) {
  switch (code) {
    case cms::ErrorCode::InvalidArgument: return CMS_ERR_INVALID_ARGUMENT;
    case cms::ErrorCode::ParseError: return CMS_ERR_PARSE;
    case cms::ErrorCode::DomainError: return CMS_ERR_DOMAIN;
    case cms::ErrorCode::ValidationError: return CMS_ERR_VALIDATION;
    case cms::ErrorCode::ResourceLimit: return CMS_ERR_RESOURCE_LIMIT;
    case cms::ErrorCode::IoError: return CMS_ERR_IO;
  }
  return CMS_ERR_INTERNAL;
}

template <typename Fn>
cms_status guarded(Fn&& fn) {
  try {
    fn();
    return CMS_OK;
  } catch (const cms::Error& e) {
    t_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return CMS_ERR_INTERNAL;
  } catch (...) {
    t_last_error = "unknown error";
    return CMS_ERR_INTERNAL;
  }
}

cms_status null_argument() {
  t_last_error = "null argument";
  return CMS_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit_report(char** report_out, const cms::ojson& j) {
  if (report_out) *report_out = dup_string(cms::dump_report(j));
}

cms::UStarPolicy parse_policy(const char* policy) {
  std::string p = policy ? policy : "split";
  if (p == "split") return cms::UStarPolicy::Split;
  if (p == "resample") return cms::UStarPolicy::Resample;
  cms::fail(cms::ErrorCode::InvalidArgument, "policy must be \"split\" or \"resample\"");
}

cms::DistanceMode parse_mode(const char* mode) {
  std::string m = mode ? mode : "auto";
  if (m == "auto") return cms::DistanceMode::Auto;
  if (m == "panel") return cms::DistanceMode::Panel;
  if (m == "w1") return cms::DistanceMode::Wasserstein1d;
  cms::fail(cms::ErrorCode::InvalidArgument, "mode must be \"auto\", \"panel\" or \"w1\"");
}

std::vector<std::vector<double>> parse_q_csv(const std::string& text) {
  std::vector<std::vector<double>> q;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t eol = text.find('\n', start);
    std::string line = text.substr(start, eol == std::string::npos ? eol : eol - start);
    start = eol == std::string::npos ? text.size() : eol + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t field = 0;
    try {
      while (field <= line.size()) {
        std::size_t pos = line.find(',', field);
        row.push_back(std::stod(line.substr(field, pos - field)));
        if (pos == std::string::npos) break;
        field = pos + 1;
      }
    } catch (const std::exception&) {
      cms::fail(cms::ErrorCode::ParseError, "bad q entry in line \"" + line + "\"");
    }
    q.push_back(std::move(row));
  }
  if (q.empty()) cms::fail(cms::ErrorCode::ParseError, "empty q matrix");
  return q;
}

}  // namespace

extern "C" {

const char* cms_version(void) { return cms::kToolVersion; }

const char* cms_last_error(void) { return t_last_error.c_str(); }

void cms_string_free(char* s) { std::free(s); }

cms_status cms_system_from_file(const char* path, cms_system** out) {
  if (!path || !out) return null_argument();
  return guarded([&] { *out = new cms_system{cms::parse_system_file(path)}; });
}

cms_status cms_system_from_text(const char* json_text, cms_system** out) {
  if (!json_text || !out) return null_argument();
  return guarded([&] { *out = new cms_system{cms::parse_system_text(json_text)}; });
}

cms_status cms_system_fixture(const char* name, const char* params_json, cms_system** out) {
  if (!name || !out) return null_argument();
  return guarded([&] {
    cms::ojson params;
    if (params_json && *params_json) {
      try {
        params = cms::ojson::parse(params_json);
      } catch (const std::exception& e) {
        cms::fail(cms::ErrorCode::ParseError, std::string("bad params JSON: ") + e.what());
      }
      if (!params.is_object())
        cms::fail(cms::ErrorCode::InvalidArgument, "fixture params must be a JSON object");
    }
    const cms::ojson* p = params.is_object() ? &params : nullptr;
    *out = new cms_system{cms::make_fixture(name, p)};
  });
}

void cms_system_free(cms_system* sys) { delete sys; }

cms_status cms_system_emit(const cms_system* sys, char** json_out) {
  if (!sys || !json_out) return null_argument();
  return guarded([&] { *json_out = dup_string(cms::emit_system_text(sys->impl)); });
}

cms_status cms_fixture_list(char** json_out) {
  if (!json_out) return null_argument();
  return guarded([&] {
    cms::ojson arr = cms::ojson::array();
    for (const cms::FixtureInfo& f : cms::fixture_catalog())
      arr.push_back({{"name", f.name}, {"description", f.description}});
    *json_out = dup_string(cms::dump_report(arr));
  });
}

cms_status cms_system_validate(const cms_system* sys, long samples, uint64_t seed, int* ok_out,
                               char** report_out) {
  if (!sys) return null_argument();
  return guarded([&] {
    cms::ValidationReport report = cms::validate_system(sys->impl, samples, seed);
    if (ok_out) *ok_out = report.ok() ? 1 : 0;
    cms::ojson j = cms::report_envelope(
        "validate", {{"samples", samples}, {"seed", seed}});
    j["system"] = cms::system_summary(sys->impl);
    j["ok"] = report.ok();
    j["violations"] = cms::violations_to_json(report);
    emit_report(report_out, j);
  });
}

cms_status cms_contraction_estimate(const cms_system* sys, long pairs, uint64_t seed,
                                    int threads, double* sup_out, char** report_out) {
  if (!sys) return null_argument();
  return guarded([&] {
    cms::ContractionReport report =
        cms::estimate_contraction_rate(sys->impl, pairs, seed, threads);
    if (sup_out) *sup_out = report.sup_estimate;
    cms::ojson j =
        cms::report_envelope("contraction", {{"pairs", pairs}, {"seed", seed}});
    j["system"] = cms::system_summary(sys->impl);
    j["contraction"] = cms::contraction_to_json(sys->impl, report);
    emit_report(report_out, j);
  });
}

cms_status cms_measure_from_base_points(const cms_system* sys, cms_measure** out) {
  if (!sys || !out) return null_argument();
  return guarded(
      [&] { *out = new cms_measure{cms::ParticleMeasure::from_base_points(sys->impl)}; });
}

cms_status cms_measure_read_csv(const cms_system* sys, const char* path, cms_measure** out) {
  if (!sys || !path || !out) return null_argument();
  return guarded(
      [&] { *out = new cms_measure{cms::ParticleMeasure::read_csv(sys->impl, path)}; });
}

cms_status cms_measure_write_csv(const cms_system* sys, const cms_measure* m,
                                 const char* path) {
  if (!sys || !m || !path) return null_argument();
  return guarded([&] { m->impl.write_csv(sys->impl, path); });
}

void cms_measure_free(cms_measure* m) { delete m; }

long cms_measure_size(const cms_measure* m) {
  return m ? static_cast<long>(m->impl.size()) : 0;
}

cms_status cms_apply_u_star(const cms_system* sys, const cms_measure* in, const char* policy,
                            long budget, uint64_t seed, int threads, cms_measure** out) {
  if (!sys || !in || !out) return null_argument();
  return guarded([&] {
    cms::UStarOptions opt{parse_policy(policy), budget, seed, threads};
    *out = new cms_measure{cms::apply_U_star(sys->impl, in->impl, opt)};
  });
}

cms_status cms_estimate_invariant(const cms_system* sys, long particles, int iterations,
                                  const char* policy, uint64_t seed, int threads,
                                  cms_measure** measure_out, char** report_out) {
  if (!sys) return null_argument();
  return guarded([&] {
    cms::InvariantOptions opt{particles, iterations, seed, threads, parse_policy(policy)};
    cms::InvariantResult res = cms::estimate_invariant(sys->impl, opt);
    cms::ojson j = cms::report_envelope("invariant", {{"particles", particles},
                                                      {"iterations", iterations},
                                                      {"policy", policy ? policy : "split"},
                                                      {"seed", seed}});
    j["system"] = cms::system_summary(sys->impl);
    j["trace"] = cms::trace_to_json(res.trace);
    j["final_particles"] = res.measure.size();
    if (!res.trace.moments.empty()) j["final_moment"] = res.trace.moments.back();
    if (!res.trace.changes.empty()) j["final_change"] = res.trace.changes.back();
    emit_report(report_out, j);
    if (measure_out) *measure_out = new cms_measure{std::move(res.measure)};
  });
}

cms_status cms_weakstar_distance(const cms_system* sys, const cms_measure* a,
                                 const cms_measure* b, const char* mode, double* out) {
  if (!sys || !a || !b || !out) return null_argument();
  return guarded(
      [&] { *out = cms::weakstar_distance(sys->impl, a->impl, b->impl, parse_mode(mode)); });
}

cms_status cms_entropy(const cms_system* sys, const cms_measure* m, double* out) {
  if (!sys || !m || !out) return null_argument();
  return guarded([&] { *out = cms::entropy_estimate(sys->impl, m->impl); });
}

cms_status cms_simulate(const cms_system* sys, const char* start_spec, long steps,
                        uint64_t seed, cms_trajectory** out) {
  if (!sys || !start_spec || !out) return null_argument();
  return guarded([&] {
    cms::Point start = cms::parse_start_spec(sys->impl, start_spec);
    *out = new cms_trajectory{cms::simulate(sys->impl, start, steps, seed)};
  });
}

void cms_trajectory_free(cms_trajectory* t) { delete t; }

long cms_trajectory_length(const cms_trajectory* t) { return t ? t->impl.length() : 0; }

cms_status cms_trajectory_write_csv(const cms_system* sys, const cms_trajectory* t,
                                    const char* path) {
  if (!sys || !t || !path) return null_argument();
  return guarded([&] { cms::write_trajectory_csv(sys->impl, t->impl, path); });
}

cms_status cms_trajectory_log_cylinder_rate(const cms_trajectory* t, double* out) {
  if (!t || !out) return null_argument();
  return guarded([&] { *out = cms::log_cylinder_rate(t->impl); });
}

cms_status cms_trajectory_empirical(const cms_system* sys, const cms_trajectory* t,
                                    long burn_in, cms_measure** out) {
  if (!sys || !t || !out) return null_argument();
  return guarded(
      [&] { *out = new cms_measure{cms::empirical_measure(sys->impl, t->impl, burn_in)}; });
}

cms_status cms_code_word(const cms_system* sys, const char* word, double rate,
                         double prefactor, char** report_out) {
  if (!sys || !word) return null_argument();
  return guarded([&] {
    std::vector<cms::EdgeId> w = cms::parse_word(word);
    cms::CodingOptions opt;
    if (rate > 0.0) opt.rate = rate;
    if (prefactor > 0.0) opt.prefactor = prefactor;
    cms::CodingResult res = cms::code_point(sys->impl, w, opt);
    cms::ojson params = {{"word", word}};
    if (opt.rate) params["rate"] = *opt.rate;
    if (opt.prefactor) params["prefactor"] = *opt.prefactor;
    cms::ojson j = cms::report_envelope("code", std::move(params));
    j["system"] = cms::system_summary(sys->impl);
    j["depth"] = w.size();
    j["vertex"] = res.vertex;
    if (sys->impl.is_euclid())
      j["point"] = res.point.coords;
    else
      j["point"] = cms::format_word(res.point.symbols);
    j["increments"] = res.increments;
    if (res.tail_bound) j["tail_bound"] = *res.tail_bound;
    emit_report(report_out, j);
  });
}

cms_status cms_decay_report(const cms_system* sys, const cms_measure* start, const int* depths,
                            int n_depths, long words, uint64_t seed, int threads,
                            char** report_out) {
  if (!sys || !start || !depths || n_depths < 1) return null_argument();
  return guarded([&] {
    std::vector<int> d(depths, depths + n_depths);
    cms::DecayTable table =
        cms::coding_convergence_report(sys->impl, start->impl, d, words, seed, threads);
    cms::ojson j = cms::report_envelope(
        "decay", {{"depths", d}, {"words", words}, {"seed", seed}});
    j["system"] = cms::system_summary(sys->impl);
    j["decay"] = cms::decay_to_json(table);
    emit_report(report_out, j);
  });
}

cms_status cms_pushforward_check(const cms_system* sys, const cms_measure* start, int depth,
                                 long samples, uint64_t seed, int threads, char** report_out) {
  if (!sys || !start) return null_argument();
  return guarded([&] {
    cms::PushforwardReport rep =
        cms::pushforward_check(sys->impl, start->impl, depth, samples, seed, threads);
    cms::ojson j = cms::report_envelope(
        "pushforward", {{"depth", depth}, {"samples", samples}, {"seed", seed}});
    j["system"] = cms::system_summary(sys->impl);
    j["pushforward"] = cms::pushforward_to_json(rep);
    emit_report(report_out, j);
  });
}

cms_status cms_render(const cms_system* sys, const cms_measure* start, long points, int depth,
                      uint64_t seed, int width, int height, double x0, double x1, double y0,
                      double y1, const char* pgm_path, const char* csv_path,
                      char** report_out) {
  if (!sys) return null_argument();
  return guarded([&] {
    cms::ImageParams img{width, height, x0, x1, y0, y1};
    cms::RenderResult res = cms::render_attractor(
        sys->impl, start ? &start->impl : nullptr, points, depth, seed, img);
    if (pgm_path) cms::write_pgm(res, pgm_path);
    if (csv_path) cms::write_points_csv(res, img, csv_path);
    long nonzero = 0;
    for (long c : res.counts)
      if (c > 0) ++nonzero;
    cms::ojson j = cms::report_envelope("render", {{"points", points},
                                                   {"depth", depth},
                                                   {"seed", seed},
                                                   {"width", width},
                                                   {"height", height},
                                                   {"viewport", {x0, x1, y0, y1}}});
    j["system"] = cms::system_summary(sys->impl);
    j["hits"] = res.hits;
    j["nonzero_cells"] = nonzero;
    emit_report(report_out, j);
  });
}

cms_status cms_cylinder_mass(const cms_system* sys, const cms_measure* m, const char* word,
                             char** report_out) {
  if (!sys || !m || !word) return null_argument();
  return guarded([&] {
    cms::CylinderEstimate est = cms::cylinder_mass(sys->impl, m->impl, cms::parse_word(word));
    cms::ojson j = cms::report_envelope("cylinder-mass", {{"word", word}});
    j["system"] = cms::system_summary(sys->impl);
    j["cylinder"] = cms::cylinder_to_json(est);
    emit_report(report_out, j);
  });
}

cms_status cms_cylinder_consistency(const cms_system* sys, const cms_measure* m, int max_len,
                                    char** report_out) {
  if (!sys || !m) return null_argument();
  return guarded([&] {
    cms::CylinderConsistency rep = cms::cylinder_consistency(sys->impl, m->impl, max_len);
    cms::ojson j = cms::report_envelope("cylinder-consistency", {{"max_len", max_len}});
    j["system"] = cms::system_summary(sys->impl);
    j["consistency"] = cms::consistency_to_json(rep);
    emit_report(report_out, j);
  });
}

cms_status cms_conditional_check(const cms_system* sys, const cms_measure* m, int word_len,
                                 long words, uint64_t seed, int threads, char** report_out) {
  if (!sys || !m) return null_argument();
  return guarded([&] {
    cms::ConditionalReport rep =
        cms::conditional_edge_check(sys->impl, m->impl, word_len, words, seed, threads);
    cms::ojson j = cms::report_envelope(
        "conditional", {{"word_len", word_len}, {"words", words}, {"seed", seed}});
    j["system"] = cms::system_summary(sys->impl);
    j["conditional"] = cms::conditional_to_json(rep);
    emit_report(report_out, j);
  });
}

cms_status cms_energy_eval(const cms_system* sys, const char* word, double* out) {
  if (!sys || !word || !out) return null_argument();
  return guarded([&] { *out = cms::energy_eval(sys->impl, cms::parse_word(word)); });
}

cms_status cms_gmeasure_oracle(const cms_system* sys, const char* q_csv_path,
                               char** report_out) {
  if (!sys) return null_argument();
  return guarded([&] {
    std::vector<std::vector<double>> q;
    std::string source;
    if (q_csv_path) {
      q = parse_q_csv(cms::read_text_file(q_csv_path));
      source = q_csv_path;
    } else {
      const cms::ojson& extra = sys->impl.extra();
      if (!extra.contains("q"))
        cms::fail(cms::ErrorCode::InvalidArgument,
                  "no q matrix: pass a CSV or use a system with a \"q\" parameter");
      q = extra["q"].get<std::vector<std::vector<double>>>();
      source = "params.q";
    }
    cms::GMeasureOracle oracle = cms::gmeasure_markov_oracle(sys->impl.graph(), q);
    cms::ojson j = cms::report_envelope("gmeasure-oracle", {{"q_source", source}});
    j["system"] = cms::system_summary(sys->impl);
    j["oracle"] = cms::oracle_to_json(oracle);
    emit_report(report_out, j);
  });
}

cms_status cms_ruelle_check(const cms_system* sys, const char* const* phi_texts, int n_phis,
                            long points, uint64_t seed, int threads, char** report_out) {
  if (!sys || !phi_texts || n_phis < 1) return null_argument();
  return guarded([&] {
    std::vector<std::string> phis;
    for (int i = 0; i < n_phis; ++i) {
      if (!phi_texts[i]) cms::fail(cms::ErrorCode::InvalidArgument, "null test function");
      phis.emplace_back(phi_texts[i]);
    }
    cms::RuelleReport rep = cms::ruelle_identity_check(sys->impl, phis, points, seed, threads);
    cms::ojson j = cms::report_envelope(
        "ruelle", {{"functions", phis}, {"points", points}, {"seed", seed}});
    j["system"] = cms::system_summary(sys->impl);
    j["ruelle"] = cms::ruelle_to_json(rep);
    emit_report(report_out, j);
  });
}

cms_status cms_natural_extension_check(const cms_system* sys, const cms_measure* m,
                                       int max_len, char** report_out) {
  if (!sys || !m) return null_argument();
  return guarded([&] {
    cms::ExtensionReport rep = cms::natural_extension_check(sys->impl, m->impl, max_len);
    cms::ojson j = cms::report_envelope("natural-extension", {{"max_len", max_len}});
    j["system"] = cms::system_summary(sys->impl);
    j["extension"] = cms::extension_to_json(rep);
    emit_report(report_out, j);
  });
}

}  // extern "C"
