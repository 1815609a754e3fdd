#include "cnsdist/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <limits>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "cnsdist/error.hpp"
#include "cnsdist/kernels.hpp"

namespace cnsdist {

Edge make_edge(NodeId a, NodeId b) {
  if (a == b) throw std::invalid_argument("self-loop is not an edge");
  return a < b ? Edge{a, b} : Edge{b, a};
}

Graph::Graph(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges) {
  std::vector<Edge> canon;
  canon.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a >= n || b >= n) throw std::out_of_range("edge endpoint out of range");
    if (a != b) canon.push_back(make_edge(a, b));
  }
  build(n, std::move(canon));
}

Graph::Graph(std::size_t n, std::span<const Edge> edges) {
  std::vector<Edge> canon;
  canon.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n) throw std::out_of_range("edge endpoint out of range");
    if (e.u != e.v) canon.push_back(make_edge(e.u, e.v));
  }
  build(n, std::move(canon));
}

void Graph::build(std::size_t n, std::vector<Edge> edges) {
  if (n > std::numeric_limits<NodeId>::max())
    throw std::invalid_argument("node count exceeds id range");
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);

  std::vector<std::size_t> deg(n, 0);
  for (const Edge& e : edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + deg[v];
  targets_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  // Edges are sorted by (u, v): each u-list receives v's in increasing order,
  // and each v-list receives u's in increasing order, but the two streams
  // interleave, so sort per node afterwards.
  for (const Edge& e : edges_) {
    targets_[fill[e.u]++] = e.v;
    targets_[fill[e.v]++] = e.u;
  }
  for (std::size_t v = 0; v < n; ++v)
    std::sort(targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
              targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]));
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> d(node_count());
  for (std::size_t v = 0; v < d.size(); ++v) d[v] = degree(static_cast<NodeId>(v));
  return d;
}

bool Graph::has_edge(NodeId a, NodeId b) const {
  if (a >= node_count() || b >= node_count()) throw std::out_of_range("node id out of range");
  if (a == b) return false;
  auto adj = neighbors(a);
  return std::binary_search(adj.begin(), adj.end(), b);
}

double Graph::mean_degree() const noexcept {
  const auto n = node_count();
  return n == 0 ? 0.0 : 2.0 * static_cast<double>(edge_count()) / static_cast<double>(n);
}

std::uint64_t Graph::pair_count() const noexcept {
  const std::uint64_t n = node_count();
  return n < 2 ? 0 : n * (n - 1) / 2;
}

NodeSet::NodeSet(std::vector<NodeId> members, std::size_t n) : members_(std::move(members)) {
  if (members_.empty()) throw std::invalid_argument("node set must not be empty");
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
    throw std::invalid_argument("node set has duplicate members");
  if (members_.back() >= n) throw std::out_of_range("node set member out of range");
}

bool NodeSet::contains(NodeId v) const {
  return std::binary_search(members_.begin(), members_.end(), v);
}

std::size_t common_neighbor_count(const Graph& g, NodeId a, NodeId b) {
  if (a >= g.node_count() || b >= g.node_count()) throw std::out_of_range("node id out of range");
  auto na = g.neighbors(a);
  auto nb = g.neighbors(b);
  return kernels::active().intersect_count(na.data(), na.size(), nb.data(), nb.size());
}

std::size_t cns(const Graph& g, const NodeSet& set) {
  const auto members = set.members();
  if (members.back() >= g.node_count()) throw std::out_of_range("node id out of range");
  if (members.size() == 1) return g.degree(members[0]);
  if (members.size() == 2) return common_neighbor_count(g, members[0], members[1]);

  // Intersect progressively, starting from the smallest neighbor list.
  std::vector<NodeId> order(members.begin(), members.end());
  std::sort(order.begin(), order.end(),
            [&](NodeId x, NodeId y) { return g.degree(x) < g.degree(y); });
  auto first = g.neighbors(order[0]);
  std::vector<NodeId> acc(first.begin(), first.end());
  std::vector<NodeId> next;
  for (std::size_t k = 1; k < order.size() && !acc.empty(); ++k) {
    auto adj = g.neighbors(order[k]);
    next.clear();
    std::set_intersection(acc.begin(), acc.end(), adj.begin(), adj.end(),
                          std::back_inserter(next));
    acc.swap(next);
  }
  // A member adjacent to all other members is never adjacent to itself, so
  // acc already excludes the set.
  return acc.size();
}

namespace {

bool parse_label(std::string_view tok, std::int64_t& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last;
}

std::string_view next_token(std::string_view& rest) {
  constexpr std::string_view ws = " \t\r\v\f";
  const auto b = rest.find_first_not_of(ws);
  if (b == std::string_view::npos) {
    rest = {};
    return {};
  }
  rest.remove_prefix(b);
  const auto e = rest.find_first_of(ws);
  std::string_view tok = rest.substr(0, e);
  rest.remove_prefix(e == std::string_view::npos ? rest.size() : e);
  return tok;
}

}  // namespace

LoadedGraph load_edge_list(std::istream& in, const EdgeListOptions& options) {
  LoadedGraph out;
  std::unordered_map<std::int64_t, NodeId> ids;
  std::vector<std::pair<NodeId, NodeId>> raw;
  auto intern = [&](std::int64_t label) {
    auto [it, fresh] = ids.try_emplace(label, static_cast<NodeId>(out.labels.size()));
    if (fresh) out.labels.push_back(label);
    return it->second;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view rest(line);
    const auto lead = rest.find_first_not_of(" \t\r");
    if (lead == std::string_view::npos) continue;
    if (options.comment_chars.find(rest[lead]) != std::string_view::npos) continue;

    const auto t1 = next_token(rest);
    const auto t2 = next_token(rest);
    if (t2.empty()) throw ParseError("expected two node labels", lineno);
    std::int64_t a = 0, b = 0;
    if (!parse_label(t1, a)) throw ParseError("not an integer label: '" + std::string(t1) + "'", lineno);
    if (!parse_label(t2, b)) throw ParseError("not an integer label: '" + std::string(t2) + "'", lineno);
    const NodeId ia = intern(a);
    const NodeId ib = intern(b);
    if (ia == ib) {
      ++out.self_loops_dropped;
      continue;
    }
    raw.emplace_back(ia, ib);
  }
  if (raw.empty()) throw ParseError("edge list contains no edges");

  out.graph = Graph(out.labels.size(), raw);
  out.duplicates_merged = raw.size() - out.graph.edge_count();
  return out;
}

LoadedGraph load_edge_list_file(const std::string& path, const EdgeListOptions& options) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open edge list '" + path + "'");
  return load_edge_list(in, options);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

void write_label_map(std::ostream& out, std::span<const std::int64_t> labels) {
  out << "original_label,dense_id\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << labels[i] << ',' << i << '\n';
}

}  // namespace cnsdist
