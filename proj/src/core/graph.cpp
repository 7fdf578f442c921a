#include "core/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "core/error.hpp"

namespace cms {

void ValidationReport::add(const std::string& code, const std::string& message, long count,
                           const std::string& witness) {
  violations.push_back(Violation{code, message, count, witness});
}

Digraph::Digraph(int vertex_count, std::vector<Edge> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges)) {
  if (vertex_count_ <= 0)
    fail(ErrorCode::InvalidArgument, "digraph needs a positive vertex count");
  out_.assign(static_cast<size_t>(vertex_count_) + 1, {});
  in_.assign(static_cast<size_t>(vertex_count_) + 1, {});
  for (const Edge& e : edges_) {
    if (e.source < 1 || e.source > vertex_count_ || e.target < 1 || e.target > vertex_count_) {
      endpoints_valid_ = false;
      continue;
    }
    out_[static_cast<size_t>(e.source)].push_back(e.id);
    in_[static_cast<size_t>(e.target)].push_back(e.id);
  }
  for (auto& v : out_) std::sort(v.begin(), v.end());
  for (auto& v : in_) std::sort(v.begin(), v.end());
}

const Edge& Digraph::edge(EdgeId e) const {
  if (e < 0 || static_cast<size_t>(e) >= edges_.size())
    fail(ErrorCode::InvalidArgument, "edge id " + std::to_string(e) + " out of range");
  // Edge ids are dense and stored in id order once validated; fall back to a
  // scan if the invariant does not hold so diagnostics still work.
  if (edges_[static_cast<size_t>(e)].id == e) return edges_[static_cast<size_t>(e)];
  for (const Edge& candidate : edges_)
    if (candidate.id == e) return candidate;
  fail(ErrorCode::InvalidArgument, "edge id " + std::to_string(e) + " not present");
}

std::span<const EdgeId> Digraph::out_edges(VertexId v) const {
  if (v < 1 || v > vertex_count_) return {};
  return out_[static_cast<size_t>(v)];
}

std::span<const EdgeId> Digraph::in_edges(VertexId v) const {
  if (v < 1 || v > vertex_count_) return {};
  return in_[static_cast<size_t>(v)];
}

ValidationReport validate_digraph(const Digraph& g) {
  ValidationReport report;
  const auto& edges = g.edges();

  long bad_endpoints = 0;
  std::string witness;
  for (const Edge& e : edges) {
    if (e.source < 1 || e.source > g.vertex_count() || e.target < 1 ||
        e.target > g.vertex_count()) {
      ++bad_endpoints;
      if (witness.empty())
        witness = "edge " + std::to_string(e.id) + ": " + std::to_string(e.source) + " -> " +
                  std::to_string(e.target);
    }
  }
  if (bad_endpoints > 0)
    report.add("edge_endpoint_range", "edge endpoints must lie in 1..N", bad_endpoints, witness);

  // Dense ids 0..|E|-1, no duplicates.
  std::vector<char> seen(edges.size(), 0);
  long dense_bad = 0;
  std::string dense_witness;
  for (const Edge& e : edges) {
    if (e.id < 0 || static_cast<size_t>(e.id) >= edges.size() || seen[static_cast<size_t>(e.id)]) {
      ++dense_bad;
      if (dense_witness.empty()) dense_witness = "edge id " + std::to_string(e.id);
      continue;
    }
    seen[static_cast<size_t>(e.id)] = 1;
  }
  if (dense_bad > 0)
    report.add("edge_ids_not_dense", "edge ids must be exactly 0..|E|-1 without repeats",
               dense_bad, dense_witness);

  // Source map surjective: every vertex has an outgoing edge.
  long no_out = 0;
  std::string out_witness;
  for (VertexId v = 1; v <= g.vertex_count(); ++v) {
    if (g.out_edges(v).empty()) {
      ++no_out;
      if (out_witness.empty()) out_witness = "vertex " + std::to_string(v);
    }
  }
  if (no_out > 0)
    report.add("source_map_not_surjective", "every vertex needs at least one outgoing edge",
               no_out, out_witness);

  return report;
}

namespace {

void require_valid(const Digraph& g, const char* op) {
  ValidationReport r = validate_digraph(g);
  if (!r.ok())
    fail(ErrorCode::ValidationError,
         std::string(op) + " requires a valid digraph; first violation: " +
             r.violations.front().code);
}

// Vertices reachable from v following edges forward (v itself included).
std::vector<char> reachable(const Digraph& g, VertexId v) {
  std::vector<char> seen(static_cast<size_t>(g.vertex_count()) + 1, 0);
  std::queue<VertexId> queue;
  seen[static_cast<size_t>(v)] = 1;
  queue.push(v);
  while (!queue.empty()) {
    VertexId u = queue.front();
    queue.pop();
    for (EdgeId e : g.out_edges(u)) {
      VertexId t = g.edge(e).target;
      if (!seen[static_cast<size_t>(t)]) {
        seen[static_cast<size_t>(t)] = 1;
        queue.push(t);
      }
    }
  }
  return seen;
}

}  // namespace

bool is_irreducible(const Digraph& g) {
  require_valid(g, "is_irreducible");
  // N is small in practice; BFS from every vertex is plenty.
  for (VertexId v = 1; v <= g.vertex_count(); ++v) {
    std::vector<char> seen = reachable(g, v);
    for (VertexId u = 1; u <= g.vertex_count(); ++u)
      if (!seen[static_cast<size_t>(u)]) return false;
  }
  return true;
}

bool is_aperiodic(const Digraph& g) {
  require_valid(g, "is_aperiodic");
  if (!is_irreducible(g))
    fail(ErrorCode::InvalidArgument, "is_aperiodic is only defined for irreducible digraphs");

  std::vector<int> level(static_cast<size_t>(g.vertex_count()) + 1, -1);
  std::queue<VertexId> queue;
  level[1] = 0;
  queue.push(1);
  while (!queue.empty()) {
    VertexId u = queue.front();
    queue.pop();
    for (EdgeId e : g.out_edges(u)) {
      VertexId t = g.edge(e).target;
      if (level[static_cast<size_t>(t)] < 0) {
        level[static_cast<size_t>(t)] = level[static_cast<size_t>(u)] + 1;
        queue.push(t);
      }
    }
  }
  long gcd = 0;
  for (const Edge& e : g.edges()) {
    long defect = level[static_cast<size_t>(e.source)] + 1 - level[static_cast<size_t>(e.target)];
    gcd = std::gcd(gcd, std::abs(defect));
  }
  return gcd == 1;
}

std::uint64_t count_admissible_words(const Digraph& g, VertexId start, int length,
                                     std::uint64_t cap) {
  require_valid(g, "count_admissible_words");
  if (start < 1 || start > g.vertex_count())
    fail(ErrorCode::InvalidArgument, "start vertex out of range");
  if (length < 0) fail(ErrorCode::InvalidArgument, "word length must be non-negative");

  std::uint64_t limit = cap + 1;
  std::vector<std::uint64_t> counts(static_cast<size_t>(g.vertex_count()) + 1, 0);
  counts[static_cast<size_t>(start)] = 1;
  for (int step = 0; step < length; ++step) {
    std::vector<std::uint64_t> next(counts.size(), 0);
    for (VertexId v = 1; v <= g.vertex_count(); ++v) {
      if (counts[static_cast<size_t>(v)] == 0) continue;
      for (EdgeId e : g.out_edges(v)) {
        size_t t = static_cast<size_t>(g.edge(e).target);
        next[t] = std::min(limit, next[t] + counts[static_cast<size_t>(v)]);
      }
    }
    counts.swap(next);
  }
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total = std::min(limit, total + c);
  return total;
}

std::vector<std::vector<EdgeId>> admissible_words(const Digraph& g, VertexId start, int length,
                                                  std::uint64_t cap) {
  std::uint64_t total = count_admissible_words(g, start, length, cap);
  if (total > cap)
    fail(ErrorCode::ResourceLimit,
         "admissible word count exceeds cap of " + std::to_string(cap));

  std::vector<std::vector<EdgeId>> words;
  words.reserve(static_cast<size_t>(total));
  std::vector<EdgeId> current;
  // Iterative DFS emitting words in lexicographic edge-id order.
  struct Frame {
    VertexId vertex;
    size_t next_index;
  };
  std::vector<Frame> stack;
  stack.push_back({start, 0});
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (static_cast<int>(stack.size()) - 1 == length) {
      words.push_back(current);
      stack.pop_back();
      if (!current.empty()) current.pop_back();
      continue;
    }
    auto out = g.out_edges(top.vertex);
    if (top.next_index >= out.size()) {
      stack.pop_back();
      if (!current.empty()) current.pop_back();
      continue;
    }
    EdgeId e = out[top.next_index++];
    current.push_back(e);
    stack.push_back({g.edge(e).target, 0});
  }
  return words;
}

}  // namespace cms
