#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hct/constraint.hpp"
#include "hct/union_find.hpp"

namespace hct {

using EdgeId = std::int32_t;

struct CoupledEdge {
  Point u = kNoPoint;
  Point v = kNoPoint;
  int weight = 1;
};

// Per split pair [b,c|a]: blue {b,c} with weight 1 at id i, red {a,b} with
// weight 2 at id m+i. The coupling maps one to the other.
struct CoupledGraph {
  std::size_t num_points = 0;
  std::size_t num_constraints = 0;
  std::vector<CoupledEdge> edges;

  bool is_blue(EdgeId e) const { return static_cast<std::size_t>(e) < num_constraints; }
  EdgeId red_of(EdgeId blue) const { return blue + static_cast<EdgeId>(num_constraints); }
  EdgeId blue_of(EdgeId red) const { return red - static_cast<EdgeId>(num_constraints); }
  EdgeId coupled(EdgeId e) const { return is_blue(e) ? red_of(e) : blue_of(e); }
};

inline CoupledGraph build_coupled_graph(const OrientedSet& set) {
  CoupledGraph g;
  g.num_points = set.points.size();
  g.num_constraints = set.size();
  g.edges.resize(2 * set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Constraint& c = set.constraints[i];
    if (!c.is_split_pair()) throw std::invalid_argument("coupled graph takes split pairs only");
    const auto& s = c.as_split_pair();
    g.edges[i] = CoupledEdge{s.first, s.second, 1};
    g.edges[set.size() + i] = CoupledEdge{s.cut, s.first, 2};
  }
  return g;
}

// Decremental minimum spanning forest over a graph with weights 1 and 2.
// Edge order is (weight, id), so the forest is unique.
class MsfBackend {
 public:
  virtual ~MsfBackend() = default;
  // Removes a live edge; returns the forest edge that replaced it, if any.
  virtual std::optional<EdgeId> delete_edge(EdgeId e) = 0;
  virtual std::optional<EdgeId> heaviest_msf_edge() const = 0;
  virtual std::size_t component_count() const = 0;
  // Vertices whose last live edge went away since the previous call.
  virtual std::vector<Point> newly_isolated() = 0;
  virtual bool in_msf(EdgeId e) const = 0;
  virtual bool alive(EdgeId e) const = 0;
  virtual std::size_t msf_size() const = 0;
};

namespace detail {

// Shared bookkeeping: liveness, degrees, forest membership, heaviest query.
class MsfState {
 public:
  explicit MsfState(const CoupledGraph& g)
      : g_(g), alive_(g.edges.size(), 1), in_msf_(g.edges.size(), 0), degree_(g.num_points, 0) {
    for (const auto& e : g.edges) {
      ++degree_[e.u];
      ++degree_[e.v];
    }
  }

  using Key = std::pair<int, EdgeId>;
  Key key(EdgeId e) const { return {g_.edges[e].weight, e}; }

  void check_live(EdgeId e) const {
    if (e < 0 || static_cast<std::size_t>(e) >= alive_.size()) throw std::out_of_range("edge id out of range");
    if (!alive_[e]) throw std::invalid_argument("edge " + std::to_string(e) + " already deleted");
  }

  void kill(EdgeId e) {
    alive_[e] = 0;
    for (Point p : {g_.edges[e].u, g_.edges[e].v})
      if (--degree_[p] == 0) isolated_.push_back(p);
  }

  void set_msf(EdgeId e, bool on) {
    if (in_msf_[e] == on) return;
    in_msf_[e] = on;
    if (on) {
      forest_.insert(key(e));
    } else {
      forest_.erase(key(e));
    }
  }

  std::optional<EdgeId> heaviest() const {
    if (forest_.empty()) return std::nullopt;
    int w = forest_.rbegin()->first;
    return forest_.lower_bound({w, 0})->second;  // lowest id among the heaviest
  }

  std::vector<Point> take_isolated() {
    std::vector<Point> out;
    out.swap(isolated_);
    return out;
  }

  const CoupledGraph& g_;
  std::vector<char> alive_;
  std::vector<char> in_msf_;
  std::vector<int> degree_;
  std::set<Key> forest_;
  std::vector<Point> isolated_;
};

}  // namespace detail

// Reference backend: reruns Kruskal after every forest-edge deletion.
class NaiveMsfBackend final : public MsfBackend {
 public:
  explicit NaiveMsfBackend(const CoupledGraph& g) : s_(g) {
    order_.resize(g.edges.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<EdgeId>(i);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](EdgeId a, EdgeId b) { return g.edges[a].weight < g.edges[b].weight; });
    recompute();
  }

  std::optional<EdgeId> delete_edge(EdgeId e) override {
    s_.check_live(e);
    s_.kill(e);
    if (!s_.in_msf_[e]) return std::nullopt;
    std::vector<char> before = s_.in_msf_;
    before[e] = 0;
    recompute();
    for (EdgeId f : order_)
      if (s_.in_msf_[f] && !before[f]) return f;
    return std::nullopt;
  }

  std::optional<EdgeId> heaviest_msf_edge() const override { return s_.heaviest(); }
  std::size_t component_count() const override { return s_.g_.num_points - s_.forest_.size(); }
  std::vector<Point> newly_isolated() override { return s_.take_isolated(); }
  bool in_msf(EdgeId e) const override { return s_.in_msf_.at(e); }
  bool alive(EdgeId e) const override { return s_.alive_.at(e); }
  std::size_t msf_size() const override { return s_.forest_.size(); }

 private:
  void recompute() {
    UnionFind uf(s_.g_.num_points);
    for (EdgeId e : order_) {
      bool take = s_.alive_[e] && uf.unite(s_.g_.edges[e].u, s_.g_.edges[e].v);
      s_.set_msf(e, take);
    }
  }

  detail::MsfState s_;
  std::vector<EdgeId> order_;
};

// Faster backend: on a forest-edge deletion, walks both halves of the split
// tree in lockstep, stops at the smaller one and scans its incident live
// edges for the lightest one crossing back.
class FastMsfBackend final : public MsfBackend {
 public:
  explicit FastMsfBackend(const CoupledGraph& g)
      : s_(g), adj_(g.num_points), tree_adj_(g.num_points), mark_(g.num_points, 0) {
    std::vector<EdgeId> order(g.edges.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<EdgeId>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](EdgeId a, EdgeId b) { return g.edges[a].weight < g.edges[b].weight; });
    UnionFind uf(g.num_points);
    for (EdgeId e : order) {
      const auto& ed = g.edges[e];
      adj_[ed.u].push_back(e);
      adj_[ed.v].push_back(e);
      if (uf.unite(ed.u, ed.v)) link(e);
    }
  }

  std::optional<EdgeId> delete_edge(EdgeId e) override {
    s_.check_live(e);
    s_.kill(e);
    if (!s_.in_msf_[e]) return std::nullopt;
    cut(e);
    const auto& ed = s_.g_.edges[e];
    std::vector<Point> side = smaller_side(ed.u, ed.v);
    ++stamp_;
    for (Point p : side) mark_[p] = stamp_;
    std::optional<EdgeId> best;
    for (Point p : side) {
      auto& list = adj_[p];
      // drop dead entries while scanning
      std::size_t keep = 0;
      for (EdgeId f : list) {
        if (!s_.alive_[f]) continue;
        list[keep++] = f;
        if (s_.in_msf_[f]) continue;
        const auto& fe = s_.g_.edges[f];
        if (mark_[fe.u] == stamp_ && mark_[fe.v] == stamp_) continue;
        if (!best || s_.key(f) < s_.key(*best)) best = f;
      }
      list.resize(keep);
    }
    if (best) link(*best);
    return best;
  }

  std::optional<EdgeId> heaviest_msf_edge() const override { return s_.heaviest(); }
  std::size_t component_count() const override { return s_.g_.num_points - s_.forest_.size(); }
  std::vector<Point> newly_isolated() override { return s_.take_isolated(); }
  bool in_msf(EdgeId e) const override { return s_.in_msf_.at(e); }
  bool alive(EdgeId e) const override { return s_.alive_.at(e); }
  std::size_t msf_size() const override { return s_.forest_.size(); }

 private:
  void link(EdgeId e) {
    s_.set_msf(e, true);
    tree_adj_[s_.g_.edges[e].u].push_back(e);
    tree_adj_[s_.g_.edges[e].v].push_back(e);
  }

  void cut(EdgeId e) {
    s_.set_msf(e, false);
    for (Point p : {s_.g_.edges[e].u, s_.g_.edges[e].v}) std::erase(tree_adj_[p], e);
  }

  Point other(EdgeId e, Point p) const {
    const auto& ed = s_.g_.edges[e];
    return ed.u == p ? ed.v : ed.u;
  }

  // Alternates one step of a walk from each endpoint; the walk that runs out
  // first has found the smaller tree.
  std::vector<Point> smaller_side(Point a, Point b) {
    ++stamp_;
    const int sa = stamp_;
    ++stamp_;
    const int sb = stamp_;
    std::vector<Point> qa{a}, qb{b};
    std::size_t ha = 0, hb = 0;
    mark_[a] = sa;
    mark_[b] = sb;
    auto step = [&](std::vector<Point>& q, std::size_t& h, int s) {
      Point p = q[h++];
      for (EdgeId f : tree_adj_[p]) {
        Point o = other(f, p);
        if (mark_[o] != s) {
          mark_[o] = s;
          q.push_back(o);
        }
      }
    };
    while (true) {
      if (ha == qa.size()) return qa;
      if (hb == qb.size()) return qb;
      step(qa, ha, sa);
      step(qb, hb, sb);
    }
  }

  detail::MsfState s_;
  std::vector<std::vector<EdgeId>> adj_;
  std::vector<std::vector<EdgeId>> tree_adj_;
  std::vector<int> mark_;
  int stamp_ = 0;
};

enum class MsfBackendKind { kNaive, kFast };

inline std::unique_ptr<MsfBackend> make_msf_backend(MsfBackendKind kind, const CoupledGraph& g) {
  if (kind == MsfBackendKind::kFast) return std::make_unique<FastMsfBackend>(g);
  return std::make_unique<NaiveMsfBackend>(g);
}

}  // namespace hct
