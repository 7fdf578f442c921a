#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cms {

using VertexId = int;  // 1-based, 1..N
using EdgeId = int;    // 0-based, dense 0..|E|-1

struct Edge {
  EdgeId id;
  VertexId source;
  VertexId target;
};

struct Violation {
  std::string code;     // stable identifier, e.g. "edge_ids_not_dense"
  std::string message;  // human-readable detail
  long count = 1;
  std::string witness;  // optional example (point, word, ...)
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  void add(const std::string& code, const std::string& message, long count = 1,
           const std::string& witness = "");
};

// Directed multigraph over vertices 1..N.  The constructor only requires a
// positive vertex count and ids dense enough to index; semantic problems
// (out-of-range endpoints, non-surjective source map, ...) are reported by
// validate_digraph so that callers can surface them instead of crashing.
class Digraph {
 public:
  Digraph(int vertex_count, std::vector<Edge> edges);

  int vertex_count() const { return vertex_count_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId e) const;

  bool edge_endpoints_valid() const { return endpoints_valid_; }

  // Outgoing / incoming edge ids of a vertex, ascending.  Edges with invalid
  // endpoints are omitted.
  std::span<const EdgeId> out_edges(VertexId v) const;
  std::span<const EdgeId> in_edges(VertexId v) const;

 private:
  int vertex_count_;
  std::vector<Edge> edges_;
  bool endpoints_valid_ = true;
  std::vector<std::vector<EdgeId>> out_, in_;
};

ValidationReport validate_digraph(const Digraph& g);

// Strong connectivity of the whole vertex set.  Requires a structurally valid
// digraph (throws Error{ValidationError} otherwise).
bool is_irreducible(const Digraph& g);

// Period-1 test via gcd of BFS level defects gcd{level(u)+1-level(v) : u->v}.
// Only defined for irreducible digraphs; throws Error{InvalidArgument} otherwise.
bool is_aperiodic(const Digraph& g);

inline constexpr std::uint64_t kDefaultWordCap = 1u << 20;

// Number of directed paths of `length` edges starting at `start`; saturates
// at cap+1 so callers can test the cap without overflow.
std::uint64_t count_admissible_words(const Digraph& g, VertexId start, int length,
                                     std::uint64_t cap = kDefaultWordCap);

// All edge words (paths) of exactly `length` edges starting at `start`,
// lexicographic in edge ids.  Throws Error{ResourceLimit} if the count
// exceeds `cap`.
std::vector<std::vector<EdgeId>> admissible_words(const Digraph& g, VertexId start,
                                                  int length,
                                                  std::uint64_t cap = kDefaultWordCap);

}  // namespace cms
