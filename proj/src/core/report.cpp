#include "core/report.hpp"

#include "core/version.hpp"

namespace cms {
namespace {

ojson point_to_json(const Point& p) {
  if (p.kind == Point::Kind::Euclid) return p.coords;
  return format_word(p.symbols);
}

ojson word_to_json(const std::vector<EdgeId>& w) { return format_word(w); }

}  // namespace

ojson report_envelope(const std::string& operation, ojson params) {
  ojson j;
  j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  j["operation"] = operation;
  j["params"] = std::move(params);
  return j;
}

ojson system_summary(const System& sys) {
  ojson j;
  j["backend"] = sys.is_euclid() ? "euclid" : "word";
  if (sys.is_euclid())
    j["dim"] = sys.backend().dim;
  else
    j["capacity"] = sys.backend().word_capacity;
  j["vertices"] = sys.graph().vertex_count();
  j["edges"] = sys.graph().edges().size();
  j["delta"] = sys.delta();
  if (sys.claimed_rate()) j["claimed_rate"] = *sys.claimed_rate();
  if (!sys.extra().empty()) j["extra"] = sys.extra();
  return j;
}

ojson violations_to_json(const ValidationReport& report) {
  ojson arr = ojson::array();
  for (const Violation& v : report.violations) {
    ojson item = {{"code", v.code}, {"message", v.message}, {"count", v.count}};
    if (!v.witness.empty()) item["witness"] = v.witness;
    arr.push_back(std::move(item));
  }
  return arr;
}

ojson contraction_to_json(const System& sys, const ContractionReport& report) {
  ojson j;
  j["pairs_requested"] = report.pairs_requested;
  j["degenerate_pairs"] = report.degenerate_pairs;
  j["sup_estimate"] = report.sup_estimate;
  j["contractive"] = report.contractive();
  if (sys.claimed_rate()) {
    j["claimed_rate"] = *sys.claimed_rate();
    j["within_claimed"] = report.sup_estimate <= *sys.claimed_rate() + 1e-12;
  }
  ojson per_vertex = ojson::array();
  for (double v : report.per_vertex_max) per_vertex.push_back(v);
  j["per_vertex_max"] = std::move(per_vertex);
  if (report.worst) {
    j["worst"] = {{"vertex", report.worst->vertex},
                  {"x", point_to_json(report.worst->x)},
                  {"y", point_to_json(report.worst->y)},
                  {"value", report.worst->value}};
  }
  return j;
}

ojson trace_to_json(const ConvergenceTrace& trace) {
  ojson j;
  j["panel"] = trace.panel_names;
  j["integrals"] = trace.integrals;
  j["moments"] = trace.moments;
  j["changes"] = trace.changes;
  return j;
}

ojson decay_to_json(const DecayTable& table) {
  ojson j;
  j["depths"] = table.depths;
  j["mean_increments"] = table.mean_increments;
  j["words"] = table.words;
  if (table.slope_defined) j["fitted_slope"] = table.fitted_slope;
  if (table.claimed_log_rate) j["claimed_log_rate"] = *table.claimed_log_rate;
  j["max_first_increment"] = table.max_first_increment;
  return j;
}

ojson pushforward_to_json(const PushforwardReport& report) {
  return {{"depth", report.depth},
          {"samples", report.samples},
          {"weakstar", report.weakstar},
          {"weakstar_vs_start", report.weakstar_vs_start},
          {"mean_drift", report.mean_drift},
          {"max_drift", report.max_drift}};
}

ojson cylinder_to_json(const CylinderEstimate& est) {
  return {{"word", word_to_json(est.word)}, {"mass", est.mass}, {"std_error", est.std_error}};
}

ojson consistency_to_json(const CylinderConsistency& report) {
  return {{"max_len", report.max_len},
          {"nodes_checked", report.nodes_checked},
          {"max_abs_residual", report.max_abs_residual},
          {"stationarity_words", report.stationarity_words},
          {"max_stationarity_gap", report.max_stationarity_gap}};
}

ojson conditional_to_json(const ConditionalReport& report) {
  return {{"word_len", report.word_len},
          {"words_requested", report.words_requested},
          {"words_used", report.words_used},
          {"words_skipped", report.words_skipped},
          {"mean_abs_dev", report.mean_abs_dev},
          {"max_abs_dev", report.max_abs_dev}};
}

ojson oracle_to_json(const GMeasureOracle& oracle) {
  return {{"stationary", oracle.stationary},
          {"entropy", oracle.entropy},
          {"integral_log_g", oracle.integral_log_g},
          {"residual", oracle.residual},
          {"iterations", oracle.iterations}};
}

ojson ruelle_to_json(const RuelleReport& report) {
  return {{"points", report.points},
          {"functions", report.functions},
          {"max_abs_dev", report.max_abs_dev}};
}

ojson extension_to_json(const ExtensionReport& report) {
  ojson rows = ojson::array();
  for (const ExtensionRow& r : report.rows)
    rows.push_back({{"word", word_to_json(r.word)},
                    {"suffix_mass", r.suffix_mass},
                    {"cylinder", r.cylinder},
                    {"combined_se", r.combined_se}});
  return {{"max_len", report.max_len},
          {"words", report.words},
          {"max_abs_dev", report.max_abs_dev},
          {"max_sigma", report.max_sigma},
          {"rows", std::move(rows)}};
}

std::string dump_report(const ojson& j) { return j.dump(2) + "\n"; }

}  // namespace cms
