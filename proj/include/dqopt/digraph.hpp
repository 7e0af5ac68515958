#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dqopt {

/// Static directed communication topology. A link (from, to) means `from`
/// transmits to `to`; `to` can receive from `from` but not the other way
/// around. Immutable after construction, so it is safe to share read-only
/// across concurrent workers. Self-loops are rejected and n >= 2 is required.
class Digraph {
 public:
  using Link = std::pair<int, int>;  // (sender, receiver)

  Digraph(int node_count, std::span<const Link> links);
  Digraph(int node_count, std::initializer_list<Link> links)
      : Digraph(node_count, std::span<const Link>(links.begin(), links.size())) {}

  static Digraph complete(int node_count);
  static Digraph ring(int node_count);  // i transmits to (i+1) mod n

  // Erdos-Renyi style draw, redrawn until strongly connected. Deterministic
  // in (node_count, edge_prob, seed). Throws budget_error when retry_budget
  // attempts all fail (edge_prob too small for the node count).
  static Digraph random(int node_count, double edge_prob, std::uint64_t seed,
                        int retry_budget = 10000);

  // Plain text edge list, one "i j" pair per line meaning node i transmits to
  // node j. Node ids are 0-based; node count is max id + 1. '#' starts a
  // comment.
  static Digraph from_edge_file(const std::string& path);

  int node_count() const { return n_; }
  std::int64_t edge_count() const { return edge_count_; }

  bool strongly_connected() const { return strongly_connected_; }

  // Longest shortest directed path over all ordered node pairs. Throws
  // std::logic_error when the graph is not strongly connected.
  int diameter() const;

  const std::vector<int>& out_neighbors(int v) const { return out_.at(v); }
  const std::vector<int>& in_neighbors(int v) const { return in_.at(v); }
  int out_degree(int v) const { return static_cast<int>(out_.at(v).size()); }
  int in_degree(int v) const { return static_cast<int>(in_.at(v).size()); }
  bool has_link(int from, int to) const;

  // All links sorted by (sender, receiver); stable across runs.
  std::vector<Link> links() const;

  std::string to_dot() const;

 private:
  int n_ = 0;
  std::int64_t edge_count_ = 0;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
  bool strongly_connected_ = false;
  int diameter_ = 0;
};

void write_dot_file(const Digraph& g, const std::string& path);

}  // namespace dqopt
