#include "core/system.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/parallel.hpp"

namespace cms {

std::vector<double> word_variables(const System& sys, const Point& x) {
  size_t cap = static_cast<size_t>(sys.backend().word_capacity);
  std::vector<double> vars(cap, -1.0);
  size_t len = x.symbols.size();
  for (size_t k = 0; k < len && k < cap; ++k)
    vars[k] = static_cast<double>(x.symbols[len - 1 - k]);
  return vars;
}

System::System(Digraph graph, Backend backend, std::vector<Region> regions,
               std::vector<MapSpec> maps, std::vector<ProbSpec> probs,
               std::vector<Point> base_points, double delta,
               std::optional<double> claimed_rate, ojson extra)
    : graph_(std::move(graph)),
      backend_(std::move(backend)),
      regions_(std::move(regions)),
      maps_(std::move(maps)),
      probs_(std::move(probs)),
      base_points_(std::move(base_points)),
      delta_(delta),
      claimed_rate_(claimed_rate),
      extra_(std::move(extra)) {
  const size_t n_vertices = static_cast<size_t>(graph_.vertex_count());
  const size_t n_edges = graph_.edges().size();
  if (regions_.size() != n_vertices)
    fail(ErrorCode::InvalidArgument, "need one region per vertex");
  if (maps_.size() != n_edges) fail(ErrorCode::InvalidArgument, "need one map per edge");
  if (probs_.size() != n_edges)
    fail(ErrorCode::InvalidArgument, "need one probability function per edge");
  if (base_points_.size() != n_vertices)
    fail(ErrorCode::InvalidArgument, "need one base point per vertex");
  if (!(delta_ > 0.0 && delta_ < 1.0))
    fail(ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
  if (claimed_rate_ && !(*claimed_rate_ > 0.0))
    fail(ErrorCode::InvalidArgument, "claimed_rate must be positive");
  if (!graph_.edge_endpoints_valid())
    fail(ErrorCode::InvalidArgument, "edge endpoints must lie in 1..N");

  if (backend_.kind == Backend::Kind::Euclid) {
    if (backend_.dim < 1) fail(ErrorCode::InvalidArgument, "dimension must be >= 1");
    if (backend_.box.size() != static_cast<size_t>(backend_.dim))
      fail(ErrorCode::InvalidArgument, "working box needs one interval per coordinate");
    for (const auto& iv : backend_.box)
      if (!(iv[0] < iv[1])) fail(ErrorCode::InvalidArgument, "working box intervals must be non-degenerate");
    for (const Region& r : regions_) {
      if (!r.pred) fail(ErrorCode::InvalidArgument, "euclid regions need a predicate expression");
      if (r.pred->var_kind() == 's')
        fail(ErrorCode::InvalidArgument, "euclid region predicates use x-variables");
      if (r.pred->max_var_index() >= backend_.dim)
        fail(ErrorCode::InvalidArgument, "region predicate references a missing coordinate");
    }
  } else {
    if (backend_.word_capacity < 1)
      fail(ErrorCode::InvalidArgument, "word capacity must be >= 1");
    for (const Region& r : regions_)
      if (r.pred) fail(ErrorCode::InvalidArgument, "word regions are implicit ('auto')");
  }

  for (size_t i = 0; i < maps_.size(); ++i) {
    const MapSpec& m = maps_[i];
    if (backend_.kind == Backend::Kind::Word) {
      if (!std::holds_alternative<AppendMap>(m))
        fail(ErrorCode::InvalidArgument, "word backend edges use append maps");
      continue;
    }
    if (std::holds_alternative<AppendMap>(m))
      fail(ErrorCode::InvalidArgument, "append maps need the word backend");
    if (const auto* affine = std::get_if<AffineMap>(&m)) {
      size_t d = static_cast<size_t>(backend_.dim);
      if (affine->matrix.size() != d * d || affine->offset.size() != d)
        fail(ErrorCode::InvalidArgument, "affine map has wrong dimensions");
    } else {
      const auto& em = std::get<ExprMap>(m);
      if (em.coords.size() != static_cast<size_t>(backend_.dim))
        fail(ErrorCode::InvalidArgument, "expression map needs one expression per coordinate");
      for (const Expr& ex : em.coords) {
        if (ex.var_kind() == 's')
          fail(ErrorCode::InvalidArgument, "euclid maps use x-variables");
        if (ex.max_var_index() >= backend_.dim)
          fail(ErrorCode::InvalidArgument, "map expression references a missing coordinate");
      }
    }
  }

  for (const ProbSpec& p : probs_) {
    if (p.expr.empty()) fail(ErrorCode::InvalidArgument, "probability expression missing");
    if (backend_.kind == Backend::Kind::Euclid) {
      if (p.expr.var_kind() == 's')
        fail(ErrorCode::InvalidArgument, "euclid probabilities use x-variables");
      if (p.expr.max_var_index() >= backend_.dim)
        fail(ErrorCode::InvalidArgument, "probability expression references a missing coordinate");
    } else {
      if (p.expr.var_kind() == 'x')
        fail(ErrorCode::InvalidArgument, "word probabilities use s-variables");
      if (p.expr.max_var_index() >= backend_.word_capacity)
        fail(ErrorCode::InvalidArgument, "probability expression looks past the word capacity");
    }
  }

  for (VertexId v = 1; v <= graph_.vertex_count(); ++v) {
    const Point& b = base_points_[static_cast<size_t>(v - 1)];
    if (backend_.kind == Backend::Kind::Euclid) {
      if (b.kind != Point::Kind::Euclid || b.coords.size() != static_cast<size_t>(backend_.dim))
        fail(ErrorCode::InvalidArgument, "base point has wrong representation");
    } else {
      if (b.kind != Point::Kind::Word || b.symbols.empty() ||
          b.symbols.size() > static_cast<size_t>(backend_.word_capacity))
        fail(ErrorCode::InvalidArgument, "base point has wrong representation");
      for (size_t k = 0; k < b.symbols.size(); ++k) {
        EdgeId e = b.symbols[k];
        if (e < 0 || static_cast<size_t>(e) >= graph_.edges().size())
          fail(ErrorCode::InvalidArgument, "base word uses an unknown edge");
        if (k + 1 < b.symbols.size() &&
            graph_.edge(e).target != graph_.edge(b.symbols[k + 1]).source)
          fail(ErrorCode::InvalidArgument, "base word is not an admissible path");
      }
    }
    if (!region_contains(*this, v, b))
      fail(ErrorCode::InvalidArgument,
           "base point of vertex " + std::to_string(v) + " is outside its region");
  }
}

bool region_contains(const System& sys, VertexId v, const Point& x) {
  if (v < 1 || v > sys.graph().vertex_count()) return false;
  if (sys.backend().kind == Backend::Kind::Word) {
    if (x.kind != Point::Kind::Word || x.symbols.empty()) return false;
    EdgeId last = x.symbols.back();
    if (last < 0 || static_cast<size_t>(last) >= sys.graph().edges().size()) return false;
    return sys.graph().edge(last).target == v;
  }
  if (x.kind != Point::Kind::Euclid) return false;
  const Region& r = sys.region(v);
  auto value = r.pred->eval(x.coords);
  return value && *value != 0.0;
}

int count_regions(const System& sys, const Point& x, VertexId* first) {
  if (sys.backend().kind == Backend::Kind::Word) {
    if (x.kind != Point::Kind::Word || x.symbols.empty()) return 0;
    EdgeId last = x.symbols.back();
    if (last < 0 || static_cast<size_t>(last) >= sys.graph().edges().size()) return 0;
    if (first) *first = sys.graph().edge(last).target;
    return 1;
  }
  int count = 0;
  for (VertexId v = 1; v <= sys.graph().vertex_count(); ++v) {
    if (region_contains(sys, v, x)) {
      if (count == 0 && first) *first = v;
      ++count;
    }
  }
  return count;
}

VertexId require_vertex(const System& sys, const Point& x) {
  VertexId v = 0;
  int count = count_regions(sys, x, &v);
  if (count != 1)
    fail(ErrorCode::DomainError, "point " + format_point(x) + " lies in " +
                                     std::to_string(count) + " regions (expected exactly 1)");
  return v;
}

Point apply_map(const System& sys, EdgeId e, const Point& x) {
  if (e < 0 || static_cast<size_t>(e) >= sys.graph().edges().size())
    fail(ErrorCode::InvalidArgument, "edge id out of range");
  const MapSpec& m = sys.map(e);
  if (const auto* affine = std::get_if<AffineMap>(&m)) {
    size_t d = static_cast<size_t>(sys.backend().dim);
    std::vector<double> out(d, 0.0);
    for (size_t i = 0; i < d; ++i) {
      double acc = affine->offset[i];
      for (size_t j = 0; j < d; ++j) acc += affine->matrix[i * d + j] * x.coords[j];
      out[i] = acc;
    }
    return Point::euclid(std::move(out));
  }
  if (const auto* em = std::get_if<ExprMap>(&m)) {
    std::vector<double> out;
    out.reserve(em->coords.size());
    for (const Expr& ex : em->coords) {
      auto value = ex.eval(x.coords);
      if (!value)
        fail(ErrorCode::DomainError,
             "map of edge " + std::to_string(e) + " failed at " + format_point(x));
      out.push_back(*value);
    }
    return Point::euclid(std::move(out));
  }
  // Append map.
  if (!x.symbols.empty()) {
    EdgeId last = x.symbols.back();
    if (sys.graph().edge(last).target != sys.graph().edge(e).source)
      fail(ErrorCode::DomainError, "edge " + std::to_string(e) +
                                       " does not extend word " + format_word(x.symbols));
  }
  return append_symbol(x, e, sys.backend().word_capacity);
}

Point eval_map(const System& sys, EdgeId e, const Point& x) {
  if (e < 0 || static_cast<size_t>(e) >= sys.graph().edges().size())
    fail(ErrorCode::InvalidArgument, "edge id out of range");
  VertexId source = sys.graph().edge(e).source;
  if (!region_contains(sys, source, x))
    fail(ErrorCode::DomainError, "point " + format_point(x) +
                                     " is outside the source region of edge " + std::to_string(e));
  return apply_map(sys, e, x);
}

std::vector<double> eval_probs_raw(const System& sys, VertexId v, const Point& x) {
  auto out = sys.graph().out_edges(v);
  std::vector<double> values;
  values.reserve(out.size());
  if (sys.backend().kind == Backend::Kind::Euclid) {
    for (EdgeId e : out) {
      auto value = sys.prob(e).expr.eval(x.coords);
      if (!value)
        fail(ErrorCode::DomainError, "probability of edge " + std::to_string(e) +
                                         " failed at " + format_point(x));
      values.push_back(*value);
    }
  } else {
    for (EdgeId e : out) {
      Point appended = append_symbol(x, e, sys.backend().word_capacity);
      std::vector<double> vars = word_variables(sys, appended);
      auto value = sys.prob(e).expr.eval(vars);
      if (!value)
        fail(ErrorCode::DomainError, "probability of edge " + std::to_string(e) +
                                         " failed at word " + format_word(x.symbols));
      values.push_back(*value);
    }
  }
  return values;
}

ProbCheckResult check_prob_values(const System& sys, std::span<const double> values) {
  ProbCheckResult r;
  r.min_value = values.empty() ? 0.0 : values[0];
  for (double v : values) {
    r.min_value = std::min(r.min_value, v);
    r.sum += v;
  }
  r.positivity_ok = r.min_value >= sys.delta() - kProbFloorSlack;
  r.normalization_ok = std::fabs(r.sum - 1.0) <= kProbNormTolerance;
  return r;
}

std::vector<double> eval_probs_checked(const System& sys, VertexId v, const Point& x) {
  std::vector<double> values = eval_probs_raw(sys, v, x);
  ProbCheckResult check = check_prob_values(sys, values);
  if (!check.positivity_ok)
    fail(ErrorCode::ValidationError,
         "probability " + std::to_string(check.min_value) + " at " + format_point(x) +
             " falls below the floor delta=" + std::to_string(sys.delta()));
  if (!check.normalization_ok)
    fail(ErrorCode::ValidationError, "probabilities at " + format_point(x) + " sum to " +
                                         std::to_string(check.sum) + ", expected 1");
  return values;
}

std::vector<std::pair<EdgeId, double>> eval_probs(const System& sys, const Point& x) {
  VertexId v = require_vertex(sys, x);
  std::vector<double> values = eval_probs_checked(sys, v, x);
  auto out = sys.graph().out_edges(v);
  std::vector<std::pair<EdgeId, double>> result;
  result.reserve(out.size());
  for (size_t i = 0; i < out.size(); ++i) result.emplace_back(out[i], values[i]);
  return result;
}

Point sample_region_point(const System& sys, VertexId v, RngStream& rng, int max_tries) {
  if (v < 1 || v > sys.graph().vertex_count())
    fail(ErrorCode::InvalidArgument, "vertex out of range");
  if (sys.backend().kind == Backend::Kind::Word) {
    // Backward walk: repeatedly prepend a uniformly chosen incoming edge.
    int len = sys.backend().word_capacity;
    std::vector<EdgeId> reversed;
    reversed.reserve(static_cast<size_t>(len));
    VertexId at = v;
    for (int k = 0; k < len; ++k) {
      auto in = sys.graph().in_edges(at);
      if (in.empty()) {
        if (reversed.empty())
          fail(ErrorCode::ResourceLimit,
               "vertex " + std::to_string(v) + " has no incoming edge to sample a word from");
        break;
      }
      EdgeId e = in[static_cast<size_t>(rng.next_below(in.size()))];
      reversed.push_back(e);
      at = sys.graph().edge(e).source;
    }
    std::vector<EdgeId> symbols(reversed.rbegin(), reversed.rend());
    return Point::word(std::move(symbols));
  }
  const auto& box = sys.backend().box;
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    std::vector<double> xs(static_cast<size_t>(sys.backend().dim));
    for (size_t j = 0; j < xs.size(); ++j) xs[j] = rng.uniform(box[j][0], box[j][1]);
    Point p = Point::euclid(std::move(xs));
    if (region_contains(sys, v, p)) return p;
  }
  fail(ErrorCode::ResourceLimit, "could not hit region of vertex " + std::to_string(v) +
                                     " in " + std::to_string(max_tries) + " box samples");
}

ValidationReport validate_system(const System& sys, long n_samples, std::uint64_t seed) {
  ValidationReport report = validate_digraph(sys.graph());
  if (n_samples <= 0) return report;

  const Digraph& g = sys.graph();
  struct Tally {
    long count = 0;
    std::string witness;
    void hit(const std::string& w) {
      if (count == 0) witness = w;
      ++count;
    }
  };
  Tally overlap, gap, map_escape, map_error, prob_floor, prob_norm, prob_error, sampling;

  std::uint64_t stream = 0;
  for (VertexId v = 1; v <= g.vertex_count(); ++v) {
    RngStream rng = RngStream::derive(seed, 1000003ULL * static_cast<std::uint64_t>(v));
    for (long i = 0; i < n_samples; ++i) {
      Point x;
      try {
        x = sample_region_point(sys, v, rng);
      } catch (const Error& e) {
        sampling.hit("vertex " + std::to_string(v) + ": " + e.what());
        break;  // further draws for this vertex would fail the same way
      }
      std::string where = "vertex " + std::to_string(v) + " at " + format_point(x);
      if (count_regions(sys, x) > 1) overlap.hit(where);

      std::vector<double> probs;
      bool probs_ok = false;
      try {
        probs = eval_probs_raw(sys, v, x);
        probs_ok = true;
      } catch (const Error& e) {
        prob_error.hit(e.what());
      }
      if (probs_ok) {
        ProbCheckResult check = check_prob_values(sys, probs);
        if (!check.positivity_ok)
          prob_floor.hit(where + ": min " + std::to_string(check.min_value));
        if (!check.normalization_ok) prob_norm.hit(where + ": sum " + std::to_string(check.sum));
      }

      for (EdgeId e : g.out_edges(v)) {
        try {
          Point y = apply_map(sys, e, x);
          VertexId target = g.edge(e).target;
          VertexId found = 0;
          int matches = count_regions(sys, y, &found);
          if (matches != 1 || found != target)
            map_escape.hit("edge " + std::to_string(e) + " sends " + format_point(x) + " to " +
                           format_point(y));
        } catch (const Error& err) {
          map_error.hit(std::string("edge ") + std::to_string(e) + ": " + err.what());
        }
      }
    }
    ++stream;
  }

  // Partition of the working box (Euclid only; word membership is structural).
  if (sys.backend().kind == Backend::Kind::Euclid) {
    RngStream rng = RngStream::derive(seed, 999999937ULL);
    const auto& box = sys.backend().box;
    for (long i = 0; i < n_samples; ++i) {
      std::vector<double> xs(static_cast<size_t>(sys.backend().dim));
      for (size_t j = 0; j < xs.size(); ++j) xs[j] = rng.uniform(box[j][0], box[j][1]);
      Point p = Point::euclid(std::move(xs));
      int matches = count_regions(sys, p);
      if (matches == 0) gap.hit("box point " + format_point(p) + " matches no region");
      if (matches > 1) overlap.hit("box point " + format_point(p));
    }
  }

  if (sampling.count) report.add("region_sampling", "region appears empty or unreachable", sampling.count, sampling.witness);
  if (overlap.count) report.add("region_overlap", "regions are not pairwise disjoint", overlap.count, overlap.witness);
  if (gap.count) report.add("partition_gap", "working-box point not covered by any region", gap.count, gap.witness);
  if (map_error.count) report.add("map_eval_error", "edge map failed to evaluate", map_error.count, map_error.witness);
  if (map_escape.count) report.add("map_containment", "edge map leaves its target region", map_escape.count, map_escape.witness);
  if (prob_error.count) report.add("prob_eval_error", "probability expression failed to evaluate", prob_error.count, prob_error.witness);
  if (prob_floor.count) report.add("prob_positivity", "probability below the declared floor", prob_floor.count, prob_floor.witness);
  if (prob_norm.count) report.add("prob_normalization", "outgoing probabilities do not sum to 1", prob_norm.count, prob_norm.witness);
  return report;
}

ContractionReport estimate_contraction_rate(const System& sys, long n_pairs, std::uint64_t seed,
                                            int threads) {
  if (n_pairs < 1) fail(ErrorCode::InvalidArgument, "need at least one pair");
  const int n_vertices = sys.graph().vertex_count();

  struct PairResult {
    double value = -1.0;  // -1 marks a degenerate pair
    VertexId vertex = 0;
  };
  std::vector<PairResult> results(static_cast<size_t>(n_pairs));

  auto run_pair = [&](long k, Point* keep_x, Point* keep_y) {
    RngStream rng = RngStream::derive(seed, static_cast<std::uint64_t>(k));
    VertexId v = 1 + static_cast<VertexId>(rng.next_below(static_cast<std::uint64_t>(n_vertices)));
    Point x = sample_region_point(sys, v, rng);
    Point y = sample_region_point(sys, v, rng);
    PairResult r;
    r.vertex = v;
    double d = distance(x, y);
    if (d > 0.0) {
      std::vector<double> probs = eval_probs_raw(sys, v, x);
      auto out = sys.graph().out_edges(v);
      double sum = 0.0;
      for (size_t i = 0; i < out.size(); ++i)
        sum += probs[i] * distance(apply_map(sys, out[i], x), apply_map(sys, out[i], y)) / d;
      r.value = sum;
    }
    if (keep_x) *keep_x = std::move(x);
    if (keep_y) *keep_y = std::move(y);
    return r;
  };

  parallel_for(n_pairs, threads,
               [&](long k) { results[static_cast<size_t>(k)] = run_pair(k, nullptr, nullptr); });

  ContractionReport report;
  report.pairs_requested = n_pairs;
  report.per_vertex_max.assign(static_cast<size_t>(n_vertices), 0.0);
  long worst_index = -1;
  for (long k = 0; k < n_pairs; ++k) {
    const PairResult& r = results[static_cast<size_t>(k)];
    if (r.value < 0.0) {
      ++report.degenerate_pairs;
      continue;
    }
    double& vmax = report.per_vertex_max[static_cast<size_t>(r.vertex - 1)];
    vmax = std::max(vmax, r.value);
    if (r.value > report.sup_estimate) {
      report.sup_estimate = r.value;
      worst_index = k;
    }
  }
  if (worst_index >= 0) {
    ContractionWitness w;
    PairResult r = run_pair(worst_index, &w.x, &w.y);  // replay the winning stream
    w.vertex = r.vertex;
    w.value = r.value;
    report.worst = std::move(w);
  }
  return report;
}

}  // namespace cms
