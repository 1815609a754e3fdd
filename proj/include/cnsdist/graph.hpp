#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <span>
#include <utility>
#include <vector>

namespace cnsdist {

using NodeId = std::uint32_t;

struct Edge {
  NodeId u;
  NodeId v;  // u < v
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Canonical (min, max) edge; throws on a self-loop.
Edge make_edge(NodeId a, NodeId b);

/// Immutable undirected simple graph over dense ids 0..n-1.
///
/// Adjacency is stored CSR-style with sorted neighbor lists. Copies share
/// nothing; construction is the only mutation point.
class Graph {
 public:
  Graph() = default;

  /// Builds from an arbitrary edge list: self-loops dropped, direction ignored,
  /// duplicates merged. Ids must be < n.
  Graph(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges);
  Graph(std::size_t n, std::span<const Edge> edges);

  std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  /// Sorted edge list, each edge with u < v.
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  std::vector<std::size_t> degrees() const;

  bool has_edge(NodeId a, NodeId b) const;

  /// 2|E|/N
  double mean_degree() const noexcept;

  /// N(N-1)/2
  std::uint64_t pair_count() const noexcept;

 private:
  void build(std::size_t n, std::vector<Edge> edges);

  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
};

/// Distinct node ids, strictly increasing, all < n.
class NodeSet {
 public:
  NodeSet() = default;
  /// Sorts; throws on duplicates, on an empty set, or when any id >= n.
  NodeSet(std::vector<NodeId> members, std::size_t n);

  std::span<const NodeId> members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool contains(NodeId v) const;

 private:
  std::vector<NodeId> members_;
};

/// Number of nodes outside `set` adjacent to every member.
std::size_t cns(const Graph& g, const NodeSet& set);

/// |adj(a) ∩ adj(b)| by sorted merge (dispatched kernel). a != b.
std::size_t common_neighbor_count(const Graph& g, NodeId a, NodeId b);

/// Visits every unordered pair (u < v) once, tagged with whether it is an edge.
/// The two classes partition all N(N-1)/2 pairs.
class PairClasses {
 public:
  explicit PairClasses(const Graph& g) : g_(&g) {}

  std::uint64_t connected_count() const noexcept { return g_->edge_count(); }
  std::uint64_t unconnected_count() const noexcept {
    return g_->pair_count() - g_->edge_count();
  }

  template <class F>
  void for_each_connected(F&& f) const {
    for (const Edge& e : g_->edges()) f(e.u, e.v);
  }

  template <class F>
  void for_each_unconnected(F&& f) const {
    const auto n = static_cast<NodeId>(g_->node_count());
    for (NodeId u = 0; u < n; ++u) {
      auto adj = g_->neighbors(u);
      auto it = adj.begin();
      for (NodeId v = u + 1; v < n; ++v) {
        while (it != adj.end() && *it < v) ++it;
        if (it != adj.end() && *it == v) continue;
        f(u, v);
      }
    }
  }

 private:
  const Graph* g_;
};

inline PairClasses pair_classes(const Graph& g) { return PairClasses(g); }

// ---------------------------------------------------------------------------
// Edge-list text I/O

struct EdgeListOptions {
  /// Lines starting with one of these are skipped.
  std::string_view comment_chars = "#%";
};

struct LoadedGraph {
  Graph graph;
  /// labels[dense_id] = original integer label, in order of first appearance.
  std::vector<std::int64_t> labels;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_merged = 0;
};

/// Whitespace-separated "source target [ignored...]" lines. Throws ParseError
/// with the line number on a malformed line, and on an input without edges.
LoadedGraph load_edge_list(std::istream& in, const EdgeListOptions& options = {});
LoadedGraph load_edge_list_file(const std::string& path, const EdgeListOptions& options = {});

/// "u v" per line using dense ids, edges in canonical order.
void write_edge_list(std::ostream& out, const Graph& g);

/// Two-column CSV "original_label,dense_id".
void write_label_map(std::ostream& out, std::span<const std::int64_t> labels);

}  // namespace cnsdist
