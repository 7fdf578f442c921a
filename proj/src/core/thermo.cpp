#include "core/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "core/coding.hpp"
#include "core/error.hpp"
#include "core/expr.hpp"
#include "core/markov_operator.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"
#include "core/simulate.hpp"
#include "core/util.hpp"

namespace cms {
namespace {

VertexId edge_source(const System& sys, EdgeId e) {
  return sys.graph().edges()[static_cast<std::size_t>(e)].source;
}
VertexId edge_target(const System& sys, EdgeId e) {
  return sys.graph().edges()[static_cast<std::size_t>(e)].target;
}

std::size_t out_index(const System& sys, VertexId v, EdgeId e) {
  auto out = sys.graph().out_edges(v);
  for (std::size_t j = 0; j < out.size(); ++j)
    if (out[j] == e) return j;
  fail(ErrorCode::InvalidArgument, "edge does not leave vertex " + std::to_string(v));
}

// Per-atom integrand of a cylinder: the product of step probabilities along
// `word` starting at the atom, with the zero extension off the start vertex.
// Optionally reports the final mapped point for conditional checks.
double path_weight(const System& sys, const Particle& p, std::span<const EdgeId> word,
                   Point* end = nullptr, VertexId* end_vertex = nullptr) {
  VertexId v = p.vertex;
  if (!word.empty() && v != edge_source(sys, word.front())) return 0.0;
  Point x = p.point;
  double t = 1.0;
  for (EdgeId e : word) {
    t *= eval_probs_raw(sys, v, x)[out_index(sys, v, e)];
    x = apply_map(sys, e, x);
    v = edge_target(sys, e);
  }
  if (end) *end = std::move(x);
  if (end_vertex) *end_vertex = v;
  return t;
}

}  // namespace

double edge_prob_at(const System& sys, EdgeId e, const Point& x, VertexId v) {
  if (e < 0 || static_cast<std::size_t>(e) >= sys.graph().edges().size())
    fail(ErrorCode::InvalidArgument, "edge id out of range");
  if (edge_source(sys, e) != v) return 0.0;
  return eval_probs_raw(sys, v, x)[out_index(sys, v, e)];
}

CylinderEstimate cylinder_mass(const System& sys, const ParticleMeasure& m,
                               std::span<const EdgeId> word) {
  validate_word_path(sys, word);
  CylinderEstimate est;
  est.word.assign(word.begin(), word.end());
  std::vector<double> values(m.size());
  KahanSum mass;
  for (std::size_t i = 0; i < m.size(); ++i) {
    values[i] = path_weight(sys, m.particles()[i], word);
    mass.add(m.particles()[i].weight * values[i]);
  }
  est.mass = mass.value();
  KahanSum var;
  for (std::size_t i = 0; i < m.size(); ++i) {
    double w = m.particles()[i].weight;
    double dev = values[i] - est.mass;
    var.add(w * w * dev * dev);
  }
  est.std_error = std::sqrt(std::max(0.0, var.value()));
  return est;
}

CylinderConsistency cylinder_consistency(const System& sys, const ParticleMeasure& m,
                                         int max_len) {
  if (max_len < 1) fail(ErrorCode::InvalidArgument, "max_len must be positive");
  CylinderConsistency rep;
  rep.max_len = max_len;

  struct Sample {
    std::size_t idx;  // particle index (for the weight)
    Point x;
    double t;
  };

  // Root: the empty word over all atoms (its children are all length-1
  // cylinders, whose masses must sum to 1).  Every residual below telescopes
  // on shared samples: each child multiplies the same per-atom product t by
  // one edge probability, so sum-of-children minus parent is exactly
  // sum_p w t (sum_e p_e(x) - 1).
  {
    KahanSum acc;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const Particle& p = m.particles()[i];
      double sum = 0.0;
      for (double q : eval_probs_raw(sys, p.vertex, p.point)) sum += q;
      acc.add(p.weight * (sum - 1.0));
    }
    rep.max_abs_residual = std::abs(acc.value());
    rep.nodes_checked = 1;
  }

  // Depth-first over admissible words, carrying the per-atom products; one
  // probability evaluation per (node, sample) serves both the node residual
  // and all its children.
  auto dfs = [&](auto&& self, const std::vector<Sample>& samples, VertexId v, int len) -> void {
    if (len >= max_len) return;
    auto out = sys.graph().out_edges(v);
    std::vector<std::vector<double>> probs(samples.size());
    KahanSum acc;
    for (std::size_t s = 0; s < samples.size(); ++s) {
      probs[s] = eval_probs_raw(sys, v, samples[s].x);
      double sum = 0.0;
      for (double p : probs[s]) sum += p;
      acc.add(m.particles()[samples[s].idx].weight * samples[s].t * (sum - 1.0));
    }
    rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(acc.value()));
    ++rep.nodes_checked;
    for (std::size_t j = 0; j < out.size(); ++j) {
      EdgeId e = out[j];
      std::vector<Sample> next;
      next.reserve(samples.size());
      for (std::size_t s = 0; s < samples.size(); ++s) {
        double t = samples[s].t * probs[s][j];
        if (t > 0.0) next.push_back({samples[s].idx, apply_map(sys, e, samples[s].x), t});
      }
      if (!next.empty()) self(self, next, edge_target(sys, e), len + 1);
    }
  };
  for (VertexId v = 1; v <= sys.graph().vertex_count(); ++v) {
    std::vector<Sample> samples;
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m.particles()[i].vertex == v) samples.push_back({i, m.particles()[i].point, 1.0});
    if (!samples.empty()) dfs(dfs, samples, v, 1);
  }

  // Stationarity: prepending one step must preserve the mass.
  for (VertexId v = 1; v <= sys.graph().vertex_count() && rep.stationarity_words < 64; ++v) {
    for (int len = 1; len < max_len && rep.stationarity_words < 64; ++len) {
      for (const auto& w : admissible_words(sys.graph(), v, len, 4096)) {
        double mass = cylinder_mass(sys, m, w).mass;
        KahanSum extended;
        for (EdgeId e : sys.graph().in_edges(v)) {
          std::vector<EdgeId> ew;
          ew.reserve(w.size() + 1);
          ew.push_back(e);
          ew.insert(ew.end(), w.begin(), w.end());
          extended.add(cylinder_mass(sys, m, ew).mass);
        }
        rep.max_stationarity_gap =
            std::max(rep.max_stationarity_gap, std::abs(extended.value() - mass));
        if (++rep.stationarity_words >= 64) break;
      }
    }
  }
  return rep;
}

double entropy_estimate(const System& sys, const ParticleMeasure& m) {
  KahanSum acc;
  for (const Particle& p : m.particles()) {
    for (double q : eval_probs_raw(sys, p.vertex, p.point))
      if (q > 0.0) acc.add(-p.weight * q * std::log(q));
  }
  return acc.value();
}

ConditionalReport conditional_edge_check(const System& sys, const ParticleMeasure& m,
                                         int word_len, long n_words, std::uint64_t seed,
                                         int threads) {
  if (word_len < 1) fail(ErrorCode::InvalidArgument, "word_len must be positive");
  if (n_words < 1) fail(ErrorCode::InvalidArgument, "need at least one word");

  // dev >= 0 means the word was usable; -1 marks a skipped word.
  std::vector<double> devs(static_cast<std::size_t>(n_words), -1.0);
  parallel_for(n_words, threads, [&](long i) {
    RngStream rng = RngStream::derive(seed, static_cast<std::uint64_t>(i));
    std::vector<EdgeId> word = sample_word(sys, m, word_len, rng);
    VertexId v_end = edge_target(sys, word.back());
    auto out = sys.graph().out_edges(v_end);

    std::vector<double> values(m.size());
    std::vector<Point> ends(m.size());
    KahanSum mass_acc;
    for (std::size_t p = 0; p < m.size(); ++p) {
      values[p] = path_weight(sys, m.particles()[p], word, &ends[p]);
      mass_acc.add(m.particles()[p].weight * values[p]);
    }
    double mass = mass_acc.value();
    KahanSum var;
    for (std::size_t p = 0; p < m.size(); ++p) {
      double w = m.particles()[p].weight;
      double dev = values[p] - mass;
      var.add(w * w * dev * dev);
    }
    double se = std::sqrt(std::max(0.0, var.value()));
    if (!(mass > 0.0) || mass < 10.0 * se) return;  // too thin to resolve

    std::vector<KahanSum> nums(out.size());
    for (std::size_t p = 0; p < m.size(); ++p) {
      if (values[p] <= 0.0) continue;
      std::vector<double> probs = eval_probs_raw(sys, v_end, ends[p]);
      for (std::size_t j = 0; j < out.size(); ++j)
        nums[j].add(m.particles()[p].weight * values[p] * probs[j]);
    }
    std::vector<double> ref = eval_probs_raw(sys, v_end, code_point_fast(sys, word));
    double dev = 0.0;
    for (std::size_t j = 0; j < out.size(); ++j)
      dev = std::max(dev, std::abs(nums[j].value() / mass - ref[j]));
    devs[static_cast<std::size_t>(i)] = dev;
  });

  ConditionalReport rep;
  rep.word_len = word_len;
  rep.words_requested = n_words;
  KahanSum mean;
  for (double d : devs) {
    if (d < 0.0) {
      ++rep.words_skipped;
      continue;
    }
    ++rep.words_used;
    mean.add(d);
    rep.max_abs_dev = std::max(rep.max_abs_dev, d);
  }
  if (rep.words_used > 0) rep.mean_abs_dev = mean.value() / static_cast<double>(rep.words_used);
  return rep;
}

double energy_eval(const System& sys, std::span<const EdgeId> word) {
  if (word.empty()) fail(ErrorCode::InvalidArgument, "energy needs a nonempty word");
  for (EdgeId e : word)
    if (e < 0 || static_cast<std::size_t>(e) >= sys.graph().edges().size())
      fail(ErrorCode::InvalidArgument, "edge id out of range");
  for (std::size_t k = 1; k < word.size(); ++k)
    if (edge_source(sys, word[k]) != edge_target(sys, word[k - 1]))
      return -std::numeric_limits<double>::infinity();

  Point z;
  VertexId v;
  if (word.size() == 1) {
    v = edge_source(sys, word.front());
    z = sys.base_point(v);
  } else {
    z = code_point_fast(sys, word.first(word.size() - 1));
    v = edge_target(sys, word[word.size() - 2]);
  }
  double p = edge_prob_at(sys, word.back(), z, v);
  if (!(p > 0.0)) fail(ErrorCode::DomainError, "nonpositive probability in energy evaluation");
  return std::log(p);
}

GMeasureOracle gmeasure_markov_oracle(const Digraph& g,
                                      const std::vector<std::vector<double>>& q) {
  const std::size_t n = g.edges().size();
  if (q.size() != n) fail(ErrorCode::InvalidArgument, "q must be edge-by-edge");
  for (std::size_t e = 0; e < n; ++e) {
    if (q[e].size() != n) fail(ErrorCode::InvalidArgument, "q must be square");
    double row = 0.0;
    for (std::size_t f = 0; f < n; ++f) {
      if (!(q[e][f] >= 0.0)) fail(ErrorCode::InvalidArgument, "q entries must be nonnegative");
      if (q[e][f] > 0.0 && g.edges()[e].target != g.edges()[f].source)
        fail(ErrorCode::InvalidArgument, "q positive on a non-consecutive edge pair");
      row += q[e][f];
    }
    if (std::abs(row - 1.0) > 1e-9) fail(ErrorCode::InvalidArgument, "q rows must sum to 1");
  }

  // The support of q must connect every edge to every other, otherwise the
  // stationary vector is not unique.
  auto reaches_all = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::queue<std::size_t> bfs;
    bfs.push(0);
    seen[0] = 1;
    std::size_t count = 1;
    while (!bfs.empty()) {
      std::size_t e = bfs.front();
      bfs.pop();
      for (std::size_t f = 0; f < n; ++f) {
        double w = forward ? q[e][f] : q[f][e];
        if (w > 0.0 && !seen[f]) {
          seen[f] = 1;
          ++count;
          bfs.push(f);
        }
      }
    }
    return count == n;
  };
  if (!reaches_all(true) || !reaches_all(false))
    fail(ErrorCode::InvalidArgument, "q support must be irreducible");

  GMeasureOracle oracle;
  std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);
  const long max_iters = 200000;
  double residual = 1.0;
  while (residual > 1e-12) {
    if (++oracle.iterations > max_iters)
      fail(ErrorCode::ResourceLimit, "stationary iteration did not converge");
    for (std::size_t f = 0; f < n; ++f) {
      double acc = 0.0;
      for (std::size_t e = 0; e < n; ++e) acc += pi[e] * q[e][f];
      next[f] = acc;
    }
    residual = 0.0;
    double total = 0.0;
    for (std::size_t f = 0; f < n; ++f) {
      residual = std::max(residual, std::abs(next[f] - pi[f]));
      // Damping halves the update; aperiodicity of the support is then not
      // needed for convergence.
      pi[f] = 0.5 * pi[f] + 0.5 * next[f];
      total += pi[f];
    }
    for (std::size_t f = 0; f < n; ++f) pi[f] /= total;
  }
  oracle.stationary = pi;

  KahanSum h;
  for (std::size_t e = 0; e < n; ++e)
    for (std::size_t f = 0; f < n; ++f)
      if (q[e][f] > 0.0) h.add(-pi[e] * q[e][f] * std::log(q[e][f]));
  oracle.entropy = h.value();

  // Same terms, column-major accumulation: an independently ordered sum of
  // the integral of log g against the stationary one-step law.
  KahanSum ig;
  for (std::size_t f = 0; f < n; ++f)
    for (std::size_t e = 0; e < n; ++e)
      if (q[e][f] > 0.0) ig.add(pi[e] * q[e][f] * std::log(q[e][f]));
  oracle.integral_log_g = ig.value();
  oracle.residual = std::abs(oracle.entropy + oracle.integral_log_g);
  return oracle;
}

RuelleReport ruelle_identity_check(const System& sys, const std::vector<std::string>& phi_texts,
                                   long n_points, std::uint64_t seed, int threads) {
  if (sys.is_euclid())
    fail(ErrorCode::InvalidArgument, "the transfer-operator identity is a word-backend check");
  if (n_points < 1) fail(ErrorCode::InvalidArgument, "need at least one point");
  std::vector<Expr> phis;
  for (const std::string& text : phi_texts) {
    Expr e = Expr::parse(text);
    if (e.var_kind() == 'x')
      fail(ErrorCode::InvalidArgument, "test functions on words use s-variables");
    if (e.max_var_index() >= sys.backend().word_capacity)
      fail(ErrorCode::InvalidArgument, "test function reads beyond the word capacity");
    phis.push_back(std::move(e));
  }
  if (phis.empty()) fail(ErrorCode::InvalidArgument, "need at least one test function");

  auto eval_phi = [&](const Expr& phi, const Point& x) {
    auto v = phi.eval(word_variables(sys, x));
    if (!v) fail(ErrorCode::DomainError, "test function failed at " + format_point(x));
    return *v;
  };

  std::vector<double> devs(static_cast<std::size_t>(n_points), 0.0);
  const int n_vertices = sys.graph().vertex_count();
  parallel_for(n_points, threads, [&](long i) {
    RngStream rng = RngStream::derive(seed, static_cast<std::uint64_t>(i));
    VertexId v = 1 + static_cast<VertexId>(rng.next_below(static_cast<std::uint64_t>(n_vertices)));
    Point sigma = sample_region_point(sys, v, rng);
    double worst = 0.0;
    for (const Expr& phi : phis) {
      // Transfer-operator side: direct sum of g(sigma e) phi(sigma e) over
      // the one-step extensions of sigma.
      KahanSum lhs;
      for (EdgeId e : sys.graph().out_edges(v)) {
        Point y = append_symbol(sigma, e, sys.backend().word_capacity);
        auto gv = sys.prob(e).expr.eval(word_variables(sys, y));
        if (!gv) fail(ErrorCode::DomainError, "g failed at " + format_point(y));
        lhs.add(*gv * eval_phi(phi, y));
      }
      // Markov-operator side, through the generic machinery.
      double rhs = apply_U(
          sys, [&](const Point& y, VertexId) { return eval_phi(phi, y); }, sigma);
      worst = std::max(worst, std::abs(lhs.value() - rhs));
    }
    devs[static_cast<std::size_t>(i)] = worst;
  });

  RuelleReport rep;
  rep.points = n_points;
  rep.functions = static_cast<int>(phis.size());
  for (double d : devs) rep.max_abs_dev = std::max(rep.max_abs_dev, d);
  return rep;
}

ExtensionReport natural_extension_check(const System& sys, const ParticleMeasure& m,
                                        int max_len) {
  if (sys.is_euclid())
    fail(ErrorCode::InvalidArgument, "suffix statistics require the word backend");
  if (max_len < 1) fail(ErrorCode::InvalidArgument, "max_len must be positive");

  auto ends_with = [](const std::vector<EdgeId>& symbols, const std::vector<EdgeId>& w) {
    if (symbols.size() < w.size()) return false;
    return std::equal(w.begin(), w.end(), symbols.end() - static_cast<long>(w.size()));
  };

  ExtensionReport rep;
  rep.max_len = max_len;
  for (int len = 1; len <= max_len; ++len) {
    for (VertexId v = 1; v <= sys.graph().vertex_count(); ++v) {
      for (const auto& w : admissible_words(sys.graph(), v, len, 4096)) {
        CylinderEstimate cyl = cylinder_mass(sys, m, w);
        KahanSum suffix;
        for (const Particle& p : m.particles())
          if (ends_with(p.point.symbols, w)) suffix.add(p.weight);
        double sm = suffix.value();
        KahanSum var;
        for (const Particle& p : m.particles()) {
          double b = ends_with(p.point.symbols, w) ? 1.0 : 0.0;
          var.add(p.weight * p.weight * (b - sm) * (b - sm));
        }
        double se = std::sqrt(std::max(0.0, var.value()) + cyl.std_error * cyl.std_error);
        double dev = std::abs(sm - cyl.mass);
        rep.max_abs_dev = std::max(rep.max_abs_dev, dev);
        rep.max_sigma = std::max(rep.max_sigma, dev / (se + 1e-12));
        ++rep.words;
        if (rep.rows.size() < 64) rep.rows.push_back({w, sm, cyl.mass, se});
      }
    }
  }
  return rep;
}

}  // namespace cms
