#include "core/coding.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"
#include "core/simulate.hpp"
#include "core/panel.hpp"
#include "core/util.hpp"

namespace cms {
namespace {

VertexId edge_source(const System& sys, EdgeId e) {
  return sys.graph().edges()[static_cast<std::size_t>(e)].source;
}
VertexId edge_target(const System& sys, EdgeId e) {
  return sys.graph().edges()[static_cast<std::size_t>(e)].target;
}

}  // namespace

void validate_word_path(const System& sys, std::span<const EdgeId> word) {
  const auto& edges = sys.graph().edges();
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (word[k] < 0 || static_cast<std::size_t>(word[k]) >= edges.size())
      fail(ErrorCode::InvalidArgument, "edge id " + std::to_string(word[k]) + " out of range");
    if (k > 0 && edges[static_cast<std::size_t>(word[k])].source !=
                     edges[static_cast<std::size_t>(word[k - 1])].target)
      fail(ErrorCode::InvalidArgument,
           "word is not a path at position " + std::to_string(k));
  }
}

Point code_point_fast(const System& sys, std::span<const EdgeId> word) {
  validate_word_path(sys, word);
  if (word.empty()) fail(ErrorCode::InvalidArgument, "cannot code an empty word");
  Point z = sys.base_point(edge_source(sys, word.front()));
  for (EdgeId e : word) z = apply_map(sys, e, z);
  return z;
}

CodingResult code_point(const System& sys, std::span<const EdgeId> word,
                        const CodingOptions& opt) {
  validate_word_path(sys, word);
  if (word.empty()) fail(ErrorCode::InvalidArgument, "cannot code an empty word");
  const std::size_t n = word.size();

  CodingResult res;
  res.vertex = edge_target(sys, word.back());
  res.increments.reserve(n);
  Point prev = sys.base_point(res.vertex);  // Y_0
  for (std::size_t k = 1; k <= n; ++k) {
    // Y_k replays the suffix of length k from the base point of its source.
    Point z = sys.base_point(edge_source(sys, word[n - k]));
    for (std::size_t j = n - k; j < n; ++j) z = apply_map(sys, word[j], z);
    res.increments.push_back(distance(z, prev));
    prev = std::move(z);
  }
  res.point = std::move(prev);

  std::optional<double> rate = opt.rate ? opt.rate : sys.claimed_rate();
  if (rate && opt.prefactor && *rate > 0.0 && *rate < 1.0)
    res.tail_bound = *opt.prefactor / (1.0 - std::sqrt(*rate)) *
                     std::pow(*rate, static_cast<double>(n) / 2.0);
  return res;
}

DecayTable coding_convergence_report(const System& sys, const ParticleMeasure& start,
                                     std::span<const int> depths, long n_words,
                                     std::uint64_t seed, int threads) {
  if (depths.empty()) fail(ErrorCode::InvalidArgument, "need at least one depth");
  int max_depth = 0;
  for (int d : depths) {
    if (d < 1) fail(ErrorCode::InvalidArgument, "depths must be positive");
    max_depth = std::max(max_depth, d);
  }
  if (n_words < 1) fail(ErrorCode::InvalidArgument, "need at least one word");

  std::vector<std::vector<double>> rows(static_cast<std::size_t>(n_words));
  parallel_for(n_words, threads, [&](long i) {
    RngStream rng = RngStream::derive(seed, static_cast<std::uint64_t>(i));
    std::vector<EdgeId> word = sample_word(sys, start, max_depth, rng);
    rows[static_cast<std::size_t>(i)] = code_point(sys, word).increments;
  });

  DecayTable table;
  table.depths.assign(depths.begin(), depths.end());
  table.words = n_words;
  for (int d : depths) {
    KahanSum acc;
    for (const auto& row : rows) acc.add(row[static_cast<std::size_t>(d - 1)]);
    table.mean_increments.push_back(acc.value() / static_cast<double>(n_words));
  }
  for (const auto& row : rows) table.max_first_increment = std::max(table.max_first_increment, row[0]);
  if (sys.claimed_rate()) table.claimed_log_rate = std::log(*sys.claimed_rate());

  // Least squares of log(mean) against depth, over depths whose mean is
  // positive (word backends hit exact zeros once suffixes pin every symbol).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long used = 0;
  for (std::size_t i = 0; i < table.depths.size(); ++i) {
    if (!(table.mean_increments[i] > 0.0)) continue;
    double x = table.depths[i], y = std::log(table.mean_increments[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  double denom = static_cast<double>(used) * sxx - sx * sx;
  if (used >= 2 && denom > 0.0) {
    table.fitted_slope = (static_cast<double>(used) * sxy - sx * sy) / denom;
    table.slope_defined = true;
  }
  return table;
}

PushforwardReport pushforward_check(const System& sys, const ParticleMeasure& start, int depth,
                                    long n_samples, std::uint64_t seed, int threads) {
  if (depth < 1) fail(ErrorCode::InvalidArgument, "depth must be positive");
  if (n_samples < 1) fail(ErrorCode::InvalidArgument, "need at least one sample");

  struct Row {
    Particle exact;
    Particle coded;
    double drift;
  };
  std::vector<Row> rows(static_cast<std::size_t>(n_samples));
  const double w = 1.0 / static_cast<double>(n_samples);
  parallel_for(n_samples, threads, [&](long i) {
    RngStream rng = RngStream::derive(seed, static_cast<std::uint64_t>(i));
    const Particle& p0 = start.particles()[start.index_for_unit(rng.next_unit())];
    Point x = p0.point;
    VertexId v = p0.vertex;
    std::vector<EdgeId> word;
    word.reserve(static_cast<std::size_t>(depth));
    for (int k = 0; k < depth; ++k) {
      StepResult r = step(sys, x, v, rng);
      word.push_back(r.edge);
      x = std::move(r.next);
      v = r.next_vertex;
    }
    Point coded = code_point_fast(sys, word);
    double drift = distance(x, coded);
    rows[static_cast<std::size_t>(i)] = {{std::move(x), v, w},
                                         {std::move(coded), v, w},
                                         drift};
  });

  std::vector<Particle> exact, coded;
  exact.reserve(rows.size());
  coded.reserve(rows.size());
  PushforwardReport rep;
  rep.depth = depth;
  rep.samples = n_samples;
  KahanSum drift_acc;
  for (Row& r : rows) {
    drift_acc.add(r.drift);
    rep.max_drift = std::max(rep.max_drift, r.drift);
    exact.push_back(std::move(r.exact));
    coded.push_back(std::move(r.coded));
  }
  rep.mean_drift = drift_acc.value() / static_cast<double>(n_samples);
  ParticleMeasure coded_m = ParticleMeasure::from_particles(sys, std::move(coded));
  rep.weakstar = weakstar_distance(
      sys, ParticleMeasure::from_particles(sys, std::move(exact)), coded_m);
  rep.weakstar_vs_start = weakstar_distance(sys, start, coded_m);
  return rep;
}

RenderResult render_attractor(const System& sys, const ParticleMeasure* start, long n_points,
                              int depth, std::uint64_t seed, const ImageParams& img,
                              int threads) {
  if (!sys.is_euclid() || sys.backend().dim > 2)
    fail(ErrorCode::InvalidArgument, "rendering needs a 1-d or 2-d euclid backend");
  if (n_points < 1 || depth < 1) fail(ErrorCode::InvalidArgument, "need positive points and depth");
  if (img.width < 1 || img.height < 1) fail(ErrorCode::InvalidArgument, "bad image size");
  if (!(img.x1 > img.x0) || (sys.backend().dim == 2 && !(img.y1 > img.y0)))
    fail(ErrorCode::InvalidArgument, "bad viewport");

  const bool flat = sys.backend().dim == 1;
  const int W = img.width, H = flat ? 1 : img.height;
  const int n_vertices = sys.graph().vertex_count();

  std::vector<long> bins(static_cast<std::size_t>(n_points), -1);
  parallel_for(n_points, threads, [&](long i) {
    RngStream rng = RngStream::derive(seed, static_cast<std::uint64_t>(i));
    Point x;
    VertexId v;
    if (start) {
      const Particle& p0 = start->particles()[start->index_for_unit(rng.next_unit())];
      x = p0.point;
      v = p0.vertex;
    } else {
      v = 1 + static_cast<VertexId>(rng.next_below(static_cast<std::uint64_t>(n_vertices)));
      x = sys.base_point(v);
    }
    std::vector<EdgeId> word;
    word.reserve(static_cast<std::size_t>(depth));
    for (int k = 0; k < depth; ++k) {
      StepResult r = step(sys, x, v, rng);
      word.push_back(r.edge);
      x = std::move(r.next);
      v = r.next_vertex;
    }
    Point z = code_point_fast(sys, word);
    double fx = (z.coords[0] - img.x0) / (img.x1 - img.x0);
    int px = static_cast<int>(std::floor(fx * W));
    if (px < 0 || px >= W) return;
    int py = 0;
    if (!flat) {
      double fy = (img.y1 - z.coords[1]) / (img.y1 - img.y0);  // top row first
      py = static_cast<int>(std::floor(fy * H));
      if (py < 0 || py >= H) return;
    }
    bins[static_cast<std::size_t>(i)] = static_cast<long>(py) * W + px;
  });

  RenderResult res;
  res.width = W;
  res.height = H;
  res.points = n_points;
  res.counts.assign(static_cast<std::size_t>(W) * static_cast<std::size_t>(H), 0);
  for (long b : bins) {
    if (b < 0) continue;
    ++res.counts[static_cast<std::size_t>(b)];
    ++res.hits;
  }
  return res;
}

void write_points_csv(const RenderResult& r, const ImageParams& img, const std::string& path) {
  std::ostringstream out;
  out << "c0,c1,count\n";
  const bool flat = r.height == 1;
  for (int py = 0; py < r.height; ++py) {
    for (int px = 0; px < r.width; ++px) {
      long c = r.counts[static_cast<std::size_t>(py) * r.width + px];
      if (c == 0) continue;
      double cx = img.x0 + (px + 0.5) * (img.x1 - img.x0) / r.width;
      double cy = flat ? 0.0 : img.y1 - (py + 0.5) * (img.y1 - img.y0) / r.height;
      out << format_double(cx) << ',' << format_double(cy) << ',' << c << "\n";
    }
  }
  write_text_file(path, out.str());
}

void write_pgm(const RenderResult& r, const std::string& path) {
  long peak = 0;
  for (long c : r.counts) peak = std::max(peak, c);
  std::string data = "P5\n" + std::to_string(r.width) + " " + std::to_string(r.height) + "\n255\n";
  data.reserve(data.size() + r.counts.size());
  const double scale = peak > 0 ? 254.0 / std::log1p(static_cast<double>(peak)) : 0.0;
  for (long c : r.counts) {
    int v = c == 0 ? 0 : 1 + static_cast<int>(std::log1p(static_cast<double>(c)) * scale);
    data.push_back(static_cast<char>(std::clamp(v, 0, 255)));
  }
  write_text_file(path, data);
}

}  // namespace cms
