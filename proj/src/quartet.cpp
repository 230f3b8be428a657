#include "compsim/quartet.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

#include "compsim/errors.hpp"

namespace compsim {

// ---------------------------------------------------------------------------
// Tree structure.

int TernaryTree::degree(int v) const {
  int d = 0;
  for (int x : adj[v])
    if (x >= 0) ++d;
  return d;
}

void TernaryTree::add_edge(int u, int v) {
  auto attach = [&](int a, int b) {
    for (int& slot : adj[a])
      if (slot < 0) {
        slot = b;
        return;
      }
    throw DataError("tree node " + std::to_string(a) + " already has degree 3");
  };
  attach(u, v);
  attach(v, u);
}

void TernaryTree::remove_edge(int u, int v) {
  auto detach = [&](int a, int b) {
    for (int& slot : adj[a])
      if (slot == b) {
        slot = -1;
        return;
      }
    throw DataError("tree edge not present");
  };
  detach(u, v);
  detach(v, u);
}

void TernaryTree::replace_neighbor(int u, int before, int after) {
  for (int& slot : adj[u])
    if (slot == before) {
      slot = after;
      return;
    }
  throw DataError("tree neighbor not present");
}

void TernaryTree::validate() const {
  if (n < 4) throw DataError("ternary tree needs n >= 4 leaves");
  if (static_cast<int>(adj.size()) != node_count())
    throw DataError("ternary tree has wrong node count");
  for (int v = 0; v < node_count(); ++v) {
    int want = is_leaf(v) ? 1 : 3;
    if (degree(v) != want)
      throw DataError("tree node " + std::to_string(v) + " has degree " +
                      std::to_string(degree(v)) + ", expected " +
                      std::to_string(want));
    for (int u : adj[v]) {
      if (u < 0) continue;
      if (u >= node_count() || u == v) throw DataError("tree adjacency corrupt");
      bool back = false;
      for (int w : adj[u]) back = back || w == v;
      if (!back) throw DataError("tree adjacency not symmetric");
    }
  }
  // Connectivity: with 2n-3 edges and no isolated nodes, one BFS suffices.
  std::vector<bool> seen(node_count(), false);
  std::deque<int> q{0};
  seen[0] = true;
  int visited = 0;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    ++visited;
    for (int u : adj[v])
      if (u >= 0 && !seen[u]) {
        seen[u] = true;
        q.push_back(u);
      }
  }
  if (visited != node_count()) throw DataError("tree is not connected");
}

std::vector<int> TernaryTree::leaf_hops() const {
  const int total = node_count();
  std::vector<int> out(static_cast<std::size_t>(n) * n, 0);
  std::vector<int> dist(total);
  std::vector<int> queue(total);
  for (int src = 0; src < n; ++src) {
    std::fill(dist.begin(), dist.end(), -1);
    int head = 0, tail = 0;
    queue[tail++] = src;
    dist[src] = 0;
    while (head < tail) {
      int v = queue[head++];
      for (int u : adj[v])
        if (u >= 0 && dist[u] < 0) {
          dist[u] = dist[v] + 1;
          queue[tail++] = u;
        }
    }
    for (int leaf = 0; leaf < n; ++leaf)
      out[static_cast<std::size_t>(src) * n + leaf] = dist[leaf];
  }
  return out;
}

std::vector<std::pair<int, int>> TernaryTree::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int v = 0; v < node_count(); ++v)
    for (int u : adj[v])
      if (u > v) out.emplace_back(v, u);
  return out;
}

namespace {

// Deterministic draws straight from the engine; distribution classes are
// implementation-defined and would break seed reproducibility.
std::size_t rand_index(std::mt19937_64& rng, std::size_t k) {
  return static_cast<std::size_t>(rng() % k);
}

double rand01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

TernaryTree empty_tree(int n) {
  TernaryTree t;
  t.n = n;
  t.adj.assign(static_cast<std::size_t>(2 * n - 2), {-1, -1, -1});
  return t;
}

// Subdivides edge (u,v) with internal node w and hangs `leaf` off it.
void insert_on_edge(TernaryTree& t, int leaf, int w, int u, int v) {
  t.remove_edge(u, v);
  t.add_edge(u, w);
  t.add_edge(w, v);
  t.add_edge(w, leaf);
}

void undo_insert(TernaryTree& t, int leaf, int w, int u, int v) {
  t.remove_edge(w, leaf);
  t.remove_edge(w, v);
  t.remove_edge(u, w);
  t.add_edge(u, v);
}

}  // namespace

TernaryTree random_tree(int n, std::mt19937_64& rng) {
  if (n < 4) throw DataError("random tree needs n >= 4");
  TernaryTree t = empty_tree(n);
  t.add_edge(0, n);
  t.add_edge(1, n);
  t.add_edge(2, n);
  for (int k = 3; k < n; ++k) {
    auto es = t.edges();
    auto [u, v] = es[rand_index(rng, es.size())];
    insert_on_edge(t, k, n + k - 2, u, v);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Quartet topology and scores.

namespace {

// Pairing index from hop sums: the pairing whose within-pair paths are
// disjoint has the strictly smallest sum in a ternary tree.
int pairing_from_hops(const std::vector<int>& hops, int n, int a, int b,
                      int c, int d) {
  auto h = [&](int x, int y) { return hops[static_cast<std::size_t>(x) * n + y]; };
  int s0 = h(a, b) + h(c, d);
  int s1 = h(a, c) + h(b, d);
  int s2 = h(a, d) + h(b, c);
  if (s0 < s1 && s0 < s2) return 0;
  if (s1 < s0 && s1 < s2) return 1;
  return 2;
}

}  // namespace

QuartetTopology embedded_topology(const TernaryTree& tree,
                                  const std::array<int, 4>& leaves) {
  QuartetTopology q;
  q.leaves = leaves;
  std::sort(q.leaves.begin(), q.leaves.end());
  for (int i = 0; i < 4; ++i) {
    if (q.leaves[i] < 0 || q.leaves[i] >= tree.n)
      throw LookupError("quartet leaf out of range: " +
                        std::to_string(q.leaves[i]));
    if (i > 0 && q.leaves[i] == q.leaves[i - 1])
      throw DataError("quartet leaves must be distinct");
  }
  auto hops = tree.leaf_hops();
  q.pairing = pairing_from_hops(hops, tree.n, q.leaves[0], q.leaves[1],
                                q.leaves[2], q.leaves[3]);
  return q;
}

QuartetCostTable::QuartetCostTable(const DistanceMatrix& m)
    : n_(static_cast<int>(m.size())) {
  if (n_ < 4) throw DataError("quartet scoring needs n >= 4 labels");
  for (double v : m.values)
    if (!std::isfinite(v))
      throw DataError(
          "matrix contains non-finite entries; drop or cap the offending "
          "terms before clustering");
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      for (int k = j + 1; k < n_; ++k)
        for (int l = k + 1; l < n_; ++l) {
          std::array<double, 3> c{m.at(i, j) + m.at(k, l),
                                  m.at(i, k) + m.at(j, l),
                                  m.at(i, l) + m.at(j, k)};
          best_sum_ += *std::min_element(c.begin(), c.end());
          worst_sum_ += *std::max_element(c.begin(), c.end());
          pairing_cost_.push_back(c);
        }
}

TreeScore QuartetCostTable::score(const TernaryTree& tree) const {
  if (tree.n != n_) throw DataError("tree leaf count does not match matrix");
  auto hops = tree.leaf_hops();
  double cost = 0;
  std::size_t q = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      for (int k = j + 1; k < n_; ++k)
        for (int l = k + 1; l < n_; ++l) {
          int p = pairing_from_hops(hops, n_, i, j, k, l);
          cost += pairing_cost_[q][static_cast<std::size_t>(p)];
          ++q;
        }
  TreeScore s;
  s.raw_cost = cost;
  s.evaluations = 1;
  // All pairings equally good: any tree is optimal by convention.
  s.normalized = worst_sum_ == best_sum_
                     ? 1.0
                     : (worst_sum_ - cost) / (worst_sum_ - best_sum_);
  return s;
}

TreeScore tree_cost(const TernaryTree& tree, const DistanceMatrix& m) {
  if (static_cast<int>(m.size()) != tree.n)
    throw DataError("tree leaves and matrix labels disagree");
  return QuartetCostTable(m).score(tree);
}

// ---------------------------------------------------------------------------
// Exhaustive search (oracle for small n).

namespace {

void enumerate_trees(TernaryTree& t, int next_leaf,
                     const std::function<void(const TernaryTree&)>& visit) {
  if (next_leaf == t.n) {
    visit(t);
    return;
  }
  int w = t.n + next_leaf - 2;
  auto es = t.edges();
  for (auto [u, v] : es) {
    insert_on_edge(t, next_leaf, w, u, v);
    enumerate_trees(t, next_leaf + 1, visit);
    undo_insert(t, next_leaf, w, u, v);
  }
}

}  // namespace

std::pair<TernaryTree, TreeScore> exhaustive_best_tree(const DistanceMatrix& m) {
  const int n = static_cast<int>(m.size());
  if (n < 4 || n > 7)
    throw DataError("exhaustive search supports 4 <= n <= 7, got " +
                    std::to_string(n));
  QuartetCostTable table(m);

  TernaryTree t = empty_tree(n);
  t.add_edge(0, n);
  t.add_edge(1, n);
  t.add_edge(2, n);

  TernaryTree best_tree;
  TreeScore best_score;
  std::string best_newick;
  std::uint64_t evals = 0;

  enumerate_trees(t, 3, [&](const TernaryTree& cand) {
    TreeScore s = table.score(cand);
    ++evals;
    if (evals == 1 || s.normalized > best_score.normalized) {
      best_tree = cand;
      best_score = s;
      best_newick.clear();
      return;
    }
    if (s.normalized == best_score.normalized) {
      if (best_newick.empty()) best_newick = to_newick(best_tree, m.labels);
      std::string nw = to_newick(cand, m.labels);
      if (nw < best_newick) {
        best_tree = cand;
        best_score = s;
        best_newick = nw;
      }
    }
  });

  best_score.evaluations = evals;
  return {best_tree, best_score};
}

// ---------------------------------------------------------------------------
// Hill climbing.

namespace {

// Nodes reachable from `root` when the edge toward `blocked` is cut.
std::vector<bool> side_of(const TernaryTree& t, int root, int blocked) {
  std::vector<bool> in(t.node_count(), false);
  std::deque<int> q{root};
  in[root] = true;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int u : t.adj[v])
      if (u >= 0 && u != blocked && !in[u]) {
        in[u] = true;
        q.push_back(u);
      }
  }
  return in;
}

void mutate_leaf_swap(TernaryTree& t, std::mt19937_64& rng) {
  int a = static_cast<int>(rand_index(rng, static_cast<std::size_t>(t.n)));
  int b = static_cast<int>(rand_index(rng, static_cast<std::size_t>(t.n)));
  if (a == b) return;
  int pa = t.adj[a][0];
  int pb = t.adj[b][0];
  if (pa == pb) return;
  t.adj[a][0] = pb;
  t.adj[b][0] = pa;
  t.replace_neighbor(pa, a, b);
  t.replace_neighbor(pb, b, a);
}

bool mutate_subtree_swap(TernaryTree& t, std::mt19937_64& rng) {
  auto es = t.edges();
  for (int attempt = 0; attempt < 8; ++attempt) {
    auto [a1, b1] = es[rand_index(rng, es.size())];
    auto [a2, b2] = es[rand_index(rng, es.size())];
    if (a1 == a2 && b1 == b2) continue;
    // Random orientation: (u, v) with v the subtree root.
    int u1 = a1, v1 = b1, u2 = a2, v2 = b2;
    if (rng() & 1) std::swap(u1, v1);
    if (rng() & 1) std::swap(u2, v2);
    auto s1 = side_of(t, v1, u1);
    if (s1[static_cast<std::size_t>(v2)]) continue;
    auto s2 = side_of(t, v2, u2);
    if (s2[static_cast<std::size_t>(v1)]) continue;
    t.replace_neighbor(u1, v1, v2);
    t.replace_neighbor(u2, v2, v1);
    t.replace_neighbor(v1, u1, u2);
    t.replace_neighbor(v2, u2, u1);
    return true;
  }
  return false;
}

bool mutate_regraft(TernaryTree& t, std::mt19937_64& rng) {
  auto es = t.edges();
  for (int attempt = 0; attempt < 8; ++attempt) {
    auto [a, b] = es[rand_index(rng, es.size())];
    int u = a, v = b;
    if (rng() & 1) std::swap(u, v);
    if (t.is_leaf(u)) std::swap(u, v);  // prune point must be internal
    if (t.is_leaf(u)) continue;
    auto sv = side_of(t, v, u);
    std::vector<std::pair<int, int>> targets;
    for (auto [p, q] : es)
      if (p != u && q != u && !sv[static_cast<std::size_t>(p)] &&
          !sv[static_cast<std::size_t>(q)])
        targets.emplace_back(p, q);
    if (targets.empty()) continue;
    auto [p, q] = targets[rand_index(rng, targets.size())];
    int x = -1, y = -1;  // u's two neighbors besides v
    for (int w : t.adj[u])
      if (w >= 0 && w != v) (x < 0 ? x : y) = w;
    t.remove_edge(u, x);
    t.remove_edge(u, y);
    t.add_edge(x, y);
    t.remove_edge(p, q);
    t.add_edge(u, p);
    t.add_edge(u, q);
    return true;
  }
  return false;
}

void mutate(TernaryTree& t, std::mt19937_64& rng) {
  switch (rand_index(rng, 3)) {
    case 0: mutate_leaf_swap(t, rng); break;
    case 1: mutate_subtree_swap(t, rng); break;
    default: mutate_regraft(t, rng); break;
  }
}

struct RestartResult {
  TernaryTree tree;
  TreeScore score;
  std::vector<TracePoint> trace;
  std::uint64_t evaluations = 0;
  std::string newick;
};

RestartResult run_restart(const QuartetCostTable& table,
                          const std::vector<std::string>& labels, int n,
                          std::uint64_t seed, const SearchConfig& cfg) {
  std::mt19937_64 rng(seed);
  RestartResult r;
  r.tree = random_tree(n, rng);
  r.score = table.score(r.tree);
  r.evaluations = 1;
  r.trace.push_back({r.evaluations, r.score.normalized});

  int nonimproving = 0;
  while (nonimproving < cfg.stop_after_nonimproving &&
         r.score.normalized < 1.0) {
    TernaryTree cand = r.tree;
    int mutations = 1;
    while (rand01(rng) >= cfg.geometric_p) ++mutations;
    for (int i = 0; i < mutations; ++i) mutate(cand, rng);
    TreeScore s = table.score(cand);
    ++r.evaluations;
    if (s.normalized > r.score.normalized) {
      r.tree = std::move(cand);
      r.score = s;
      r.trace.push_back({r.evaluations, s.normalized});
      nonimproving = 0;
    } else {
      ++nonimproving;
    }
  }
  r.newick = to_newick(r.tree, labels);
  return r;
}

}  // namespace

SearchResult hill_climb(const DistanceMatrix& m, const SearchConfig& cfg) {
  m.validate();
  const int n = static_cast<int>(m.size());
  if (n < 4) throw DataError("clustering needs n >= 4 objects");
  if (cfg.restarts < 1) throw DataError("restarts must be >= 1");
  if (cfg.geometric_p <= 0.0 || cfg.geometric_p > 1.0)
    throw DataError("geometric_p must be in (0, 1]");
  QuartetCostTable table(m);

  std::vector<RestartResult> results(static_cast<std::size_t>(cfg.restarts));
  parallel_for(results.size(), cfg.jobs, [&](std::size_t i) {
    results[i] = run_restart(table, m.labels, n, cfg.seed + i, cfg);
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].score.normalized > results[best].score.normalized ||
        (results[i].score.normalized == results[best].score.normalized &&
         results[i].newick < results[best].newick))
      best = i;
  }

  SearchResult out;
  out.tree = results[best].tree;
  out.score = results[best].score;
  out.trace = results[best].trace;
  std::uint64_t total = 0;
  for (const auto& r : results) total += r.evaluations;
  out.score.evaluations = total;
  return out;
}

// ---------------------------------------------------------------------------
// Newick serialization.

namespace {

struct NewickBuilder {
  const TernaryTree& tree;
  const std::vector<std::string>& labels;

  // Returns (serialized subtree, smallest descendant label).
  std::pair<std::string, std::string> build(int v, int parent) const {
    if (tree.is_leaf(v)) return {labels[static_cast<std::size_t>(v)],
                                 labels[static_cast<std::size_t>(v)]};
    std::vector<std::pair<std::string, std::string>> kids;  // (min, text)
    for (int u : tree.adj[v])
      if (u >= 0 && u != parent) {
        auto [text, mn] = build(u, v);
        kids.emplace_back(mn, text);
      }
    std::sort(kids.begin(), kids.end());
    std::string text = "(";
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i) text += ',';
      text += kids[i].second;
    }
    text += ')';
    return {text, kids.front().first};
  }
};

}  // namespace

std::string to_newick(const TernaryTree& tree,
                      const std::vector<std::string>& labels) {
  if (static_cast<int>(labels.size()) != tree.n)
    throw DataError("newick: label count does not match tree");
  int smallest = 0;
  for (int i = 1; i < tree.n; ++i)
    if (labels[static_cast<std::size_t>(i)] < labels[static_cast<std::size_t>(smallest)])
      smallest = i;
  int root = tree.adj[smallest][0];  // internal neighbor of smallest leaf
  NewickBuilder b{tree, labels};
  return b.build(root, -1).first + ";";
}

namespace {

struct NewickParser {
  const std::string& text;
  std::size_t pos = 0;

  char peek() const {
    if (pos >= text.size()) throw DataError("newick: unexpected end of input");
    return text[pos];
  }
  void expect(char c) {
    if (peek() != c)
      throw DataError(std::string("newick: expected '") + c + "' at offset " +
                      std::to_string(pos));
    ++pos;
  }

  // Node: list of children (empty = leaf with label).
  struct Node {
    std::string label;
    std::vector<Node> children;
  };

  Node parse_node() {
    Node node;
    if (peek() == '(') {
      ++pos;
      node.children.push_back(parse_node());
      while (peek() == ',') {
        ++pos;
        node.children.push_back(parse_node());
      }
      expect(')');
      return node;
    }
    std::size_t start = pos;
    while (pos < text.size() && text[pos] != ',' && text[pos] != ')' &&
           text[pos] != '(' && text[pos] != ';')
      ++pos;
    node.label = text.substr(start, pos - start);
    if (node.label.empty()) throw DataError("newick: empty label");
    return node;
  }
};

}  // namespace

std::pair<TernaryTree, std::vector<std::string>> parse_newick(
    const std::string& text) {
  std::string trimmed;
  for (char c : text)
    if (c != ' ' && c != '\n' && c != '\r' && c != '\t') trimmed += c;
  NewickParser parser{trimmed};
  auto root = parser.parse_node();
  parser.expect(';');
  if (parser.pos != trimmed.size())
    throw DataError("newick: trailing characters");
  if (root.children.size() != 3)
    throw DataError("newick: unrooted ternary tree needs 3 children at root");

  std::vector<std::string> labels;
  std::function<void(const NewickParser::Node&)> collect =
      [&](const NewickParser::Node& node) {
        if (node.children.empty()) {
          labels.push_back(node.label);
          return;
        }
        for (const auto& c : node.children) collect(c);
      };
  collect(root);
  std::sort(labels.begin(), labels.end());
  if (std::adjacent_find(labels.begin(), labels.end()) != labels.end())
    throw DataError("newick: duplicate leaf label");

  const int n = static_cast<int>(labels.size());
  if (n < 4) throw DataError("newick: need at least 4 leaves");
  TernaryTree t = empty_tree(n);
  int next_internal = n;
  std::function<int(const NewickParser::Node&)> build =
      [&](const NewickParser::Node& node) -> int {
    if (node.children.empty()) {
      auto it = std::lower_bound(labels.begin(), labels.end(), node.label);
      return static_cast<int>(it - labels.begin());
    }
    if (next_internal >= t.node_count())
      throw DataError("newick: too many internal nodes for a ternary tree");
    int id = next_internal++;
    for (const auto& c : node.children) t.add_edge(id, build(c));
    return id;
  };
  build(root);
  t.validate();
  return {t, labels};
}

}  // namespace compsim
