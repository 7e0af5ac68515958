#include "dqopt/digraph.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "dqopt/errors.hpp"
#include "dqopt/rng.hpp"

namespace dqopt {

namespace {

// Distances from src following the given adjacency; -1 when unreachable.
std::vector<int> bfs(const std::vector<std::vector<int>>& adj, int src) {
  std::vector<int> dist(adj.size(), -1);
  std::queue<int> q;
  dist[src] = 0;
  q.push(src);
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int w : adj[v]) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push(w);
      }
    }
  }
  return dist;
}

bool reaches_all(const std::vector<std::vector<int>>& adj, int src) {
  const auto dist = bfs(adj, src);
  return std::none_of(dist.begin(), dist.end(), [](int d) { return d < 0; });
}

}  // namespace

Digraph::Digraph(int node_count, std::span<const Link> links) : n_(node_count) {
  if (node_count < 2) {
    throw std::invalid_argument("digraph: node count must be at least 2");
  }
  out_.resize(n_);
  in_.resize(n_);
  for (const auto& [from, to] : links) {
    if (from < 0 || from >= n_ || to < 0 || to >= n_) {
      throw std::invalid_argument("digraph: node id out of range");
    }
    if (from == to) {
      throw std::invalid_argument("digraph: self-loops are not allowed");
    }
    out_[from].push_back(to);
  }
  edge_count_ = 0;
  for (int v = 0; v < n_; ++v) {
    auto& nb = out_[v];
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    edge_count_ += static_cast<std::int64_t>(nb.size());
    for (int w : nb) in_[w].push_back(v);
  }
  for (auto& nb : in_) std::sort(nb.begin(), nb.end());

  strongly_connected_ = reaches_all(out_, 0) && reaches_all(in_, 0);
  if (strongly_connected_) {
    int d = 0;
    for (int v = 0; v < n_; ++v) {
      for (int dist : bfs(out_, v)) d = std::max(d, dist);
    }
    diameter_ = d;
  }
}

Digraph Digraph::complete(int node_count) {
  std::vector<Link> links;
  links.reserve(static_cast<std::size_t>(node_count) * (node_count - 1));
  for (int i = 0; i < node_count; ++i) {
    for (int j = 0; j < node_count; ++j) {
      if (i != j) links.emplace_back(i, j);
    }
  }
  return Digraph(node_count, links);
}

Digraph Digraph::ring(int node_count) {
  std::vector<Link> links;
  links.reserve(node_count);
  for (int i = 0; i < node_count; ++i) links.emplace_back(i, (i + 1) % node_count);
  return Digraph(node_count, links);
}

Digraph Digraph::random(int node_count, double edge_prob, std::uint64_t seed,
                        int retry_budget) {
  if (node_count < 2) {
    throw std::invalid_argument("digraph: node count must be at least 2");
  }
  if (!(edge_prob > 0.0) || edge_prob > 1.0) {
    throw std::invalid_argument("digraph: edge_prob must be in (0, 1]");
  }
  rng::Engine engine(rng::mix(seed, rng::kGraphStream));
  std::vector<Link> links;
  for (int attempt = 0; attempt < retry_budget; ++attempt) {
    links.clear();
    for (int i = 0; i < node_count; ++i) {
      for (int j = 0; j < node_count; ++j) {
        if (i != j && engine.uniform() < edge_prob) links.emplace_back(i, j);
      }
    }
    Digraph g(node_count, links);
    if (g.strongly_connected()) return g;
  }
  std::ostringstream msg;
  msg << "digraph: no strongly connected draw in " << retry_budget
      << " attempts (edge_prob=" << edge_prob << " is too small for n="
      << node_count << ")";
  throw budget_error(msg.str());
}

Digraph Digraph::from_edge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("digraph: cannot open edge file: " + path);
  std::vector<Link> links;
  int max_id = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    int from = 0, to = 0;
    if (!(ls >> from)) continue;  // blank or comment-only line
    if (!(ls >> to)) {
      throw config_error(path + ":" + std::to_string(line_no) +
                         ": expected \"i j\" pair");
    }
    if (from < 0 || to < 0) {
      throw config_error(path + ":" + std::to_string(line_no) +
                         ": node ids must be nonnegative");
    }
    links.emplace_back(from, to);
    max_id = std::max({max_id, from, to});
  }
  if (max_id < 1) throw config_error("digraph: edge file has no usable links: " + path);
  return Digraph(max_id + 1, links);
}

int Digraph::diameter() const {
  if (!strongly_connected_) {
    throw std::logic_error("digraph: diameter undefined (not strongly connected)");
  }
  return diameter_;
}

bool Digraph::has_link(int from, int to) const {
  const auto& nb = out_.at(from);
  return std::binary_search(nb.begin(), nb.end(), to);
}

std::vector<Digraph::Link> Digraph::links() const {
  std::vector<Link> result;
  result.reserve(static_cast<std::size_t>(edge_count_));
  for (int v = 0; v < n_; ++v) {
    for (int w : out_[v]) result.emplace_back(v, w);
  }
  return result;
}

std::string Digraph::to_dot() const {
  std::ostringstream out;
  out << "digraph G {\n";
  for (int v = 0; v < n_; ++v) out << "  " << v << ";\n";
  for (const auto& [from, to] : links()) {
    out << "  " << from << " -> " << to << ";\n";
  }
  out << "}\n";
  return out.str();
}

void write_dot_file(const Digraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw config_error("digraph: cannot write DOT file: " + path);
  out << g.to_dot();
}

}  // namespace dqopt
