#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "hct/constraint.hpp"
#include "hct/min_cut.hpp"
#include "hct/tree.hpp"
#include "hct/tree_ops.hpp"
#include "hct/union_find.hpp"

namespace hct {

// A point subset whose induced constraints connect it; proof that no tree
// satisfies the input.
struct ClosedSetWitness {
  std::vector<Point> points;  // sorted
  std::vector<Constraint> constraints;
};

class BuildOutcome {
 public:
  static BuildOutcome accept(HierarchicalTree t) { return BuildOutcome(std::move(t)); }
  static BuildOutcome reject(ClosedSetWitness w) { return BuildOutcome(std::move(w)); }

  bool accepted() const noexcept { return std::holds_alternative<HierarchicalTree>(value_); }
  const HierarchicalTree& tree() const { return std::get<HierarchicalTree>(value_); }
  const ClosedSetWitness& witness() const { return std::get<ClosedSetWitness>(value_); }

 private:
  explicit BuildOutcome(std::variant<HierarchicalTree, ClosedSetWitness> v) : value_(std::move(v)) {}
  std::variant<HierarchicalTree, ClosedSetWitness> value_;
};

enum class SplitStyle {
  kComb,      // components joined by a left-leaning comb, smallest member first
  kMultiway,  // one node with every component as a child
};

namespace detail {

struct TopDownOptions {
  bool closure = false;   // apply three-way extensions
  bool agnostic = false;  // min-cut instead of rejecting
  SplitStyle style = SplitStyle::kComb;
};

// Merges three-way constraints with two connected points until nothing changes.
inline void close_three_ways(UnionFind& uf, std::vector<std::array<int, 3>> pending) {
  bool changed = true;
  while (changed && !pending.empty()) {
    changed = false;
    for (std::size_t i = 0; i < pending.size();) {
      auto [a, b, c] = pending[i];
      if (uf.same(a, b) || uf.same(a, c) || uf.same(b, c)) {
        uf.unite(a, b);
        uf.unite(a, c);
        pending[i] = pending.back();
        pending.pop_back();
        changed = true;
      } else {
        ++i;
      }
    }
  }
}

struct TopDownResult {
  std::optional<HierarchicalTree> tree;
  ClosedSetWitness witness;
};

inline TopDownResult top_down(std::size_t n, std::span<const Constraint> constraints,
                              const TopDownOptions& opt) {
  if (n == 0) throw std::invalid_argument("cannot build a tree over zero points");
  for (const auto& c : constraints) {
    if (c.is_ktuple()) throw std::invalid_argument("k-tuple constraints must be reduced first");
    if (c.is_three_way() && !opt.closure)
      throw std::invalid_argument("three-way constraints need the nonbinary builder");
  }
  TreeBuilder builder(n);
  std::vector<int> local(n, -1);

  struct Frame {
    std::vector<std::vector<Point>> parts;
    std::vector<std::vector<int>> part_cons;
    std::vector<NodeId> done;
  };
  std::vector<Frame> stack;
  TopDownResult result;

  // Either returns a finished leaf, or pushes a frame and returns kNoNode.
  // Sets `failed` when S is connected in non-agnostic mode.
  bool failed = false;
  auto open = [&](std::vector<Point> pts, std::vector<int> cons) -> NodeId {
    if (pts.size() == 1) return builder.add_leaf(pts[0]);
    const int s = static_cast<int>(pts.size());
    for (int i = 0; i < s; ++i) local[pts[i]] = i;
    UnionFind uf(pts.size());
    std::vector<std::array<int, 3>> pending;
    for (int ci : cons) {
      const Constraint& c = constraints[ci];
      if (c.is_split_pair()) {
        const auto& sp = c.as_split_pair();
        uf.unite(local[sp.first], local[sp.second]);
      } else {
        const auto& tw = c.as_three_way().points;
        pending.push_back({local[tw[0]], local[tw[1]], local[tw[2]]});
      }
    }
    if (opt.closure) close_three_ways(uf, std::move(pending));

    std::vector<int> comp(s, -1);
    int ncomp = 0;
    if (uf.set_count() > 1) {
      std::vector<int> id_of_root(s, -1);
      for (int i = 0; i < s; ++i) {
        int r = uf.find(i);
        if (id_of_root[r] < 0) id_of_root[r] = ncomp++;
        comp[i] = id_of_root[r];
      }
    } else if (opt.agnostic) {
      std::vector<std::vector<std::int64_t>> w(s, std::vector<std::int64_t>(s, 0));
      for (int ci : cons) {
        const auto& sp = constraints[ci].as_split_pair();
        int a = local[sp.first], b = local[sp.second];
        ++w[a][b];
        ++w[b][a];
      }
      MinCut cut = stoer_wagner(std::move(w));
      std::vector<char> in_side(s, 0);
      for (int v : cut.side) in_side[v] = 1;
      // the side holding local vertex 0 comes first
      for (int i = 0; i < s; ++i) comp[i] = in_side[i] == in_side[0] ? 0 : 1;
      ncomp = 2;
    } else {
      failed = true;
      result.witness.points = pts;
      std::sort(result.witness.points.begin(), result.witness.points.end());
      for (int ci : cons) result.witness.constraints.push_back(constraints[ci]);
      return kNoNode;
    }

    Frame f;
    f.parts.resize(ncomp);
    f.part_cons.resize(ncomp);
    for (int i = 0; i < s; ++i) f.parts[comp[i]].push_back(pts[i]);
    for (int ci : cons) {
      auto ps = constraints[ci].points();
      int c0 = comp[local[ps[0]]];
      if (comp[local[ps[1]]] == c0 && comp[local[ps[2]]] == c0) f.part_cons[c0].push_back(ci);
    }
    stack.push_back(std::move(f));
    return kNoNode;
  };

  std::vector<Point> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<Point>(i);
  std::vector<int> all_cons(constraints.size());
  for (std::size_t i = 0; i < all_cons.size(); ++i) all_cons[i] = static_cast<int>(i);

  NodeId root = open(std::move(all), std::move(all_cons));
  if (failed) return result;
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.done.size() == f.parts.size()) {
      NodeId id;
      if (opt.style == SplitStyle::kComb) {
        id = f.done[0];
        for (std::size_t i = 1; i < f.done.size(); ++i) id = builder.add_internal({id, f.done[i]});
      } else {
        id = builder.add_internal(f.done);
      }
      stack.pop_back();
      if (stack.empty()) {
        root = id;
      } else {
        stack.back().done.push_back(id);
      }
      continue;
    }
    std::size_t next = f.done.size();
    std::vector<Point> pts = std::move(f.parts[next]);
    std::vector<int> cons = std::move(f.part_cons[next]);
    NodeId leaf = open(std::move(pts), std::move(cons));
    if (failed) return result;
    if (leaf != kNoNode) stack.back().done.push_back(leaf);
  }
  HierarchicalTree t = std::move(builder).build(root);
  Arity a = t.is_binary() ? Arity::kBinary : Arity::kMultiway;
  result.tree = HierarchicalTree(std::vector<TreeNode>(t.nodes()), t.root(), n, a);
  return result;
}

inline BuildOutcome to_outcome(TopDownResult r) {
  if (r.tree) return BuildOutcome::accept(std::move(*r.tree));
  return BuildOutcome::reject(std::move(r.witness));
}

}  // namespace detail

// Top-down components builder for split pairs; multiway splits become combs.
inline BuildOutcome build_binary(const OrientedSet& set) {
  return detail::to_outcome(detail::top_down(set.points.size(), set.constraints, {false, false, SplitStyle::kComb}));
}

// Same decisions as build_binary but keeps every component split as one node.
inline BuildOutcome build_multiway(const OrientedSet& set) {
  return detail::to_outcome(
      detail::top_down(set.points.size(), set.constraints, {false, false, SplitStyle::kMultiway}));
}

// Split pairs and three-ways; components are closed under three-way extension.
inline BuildOutcome build_nonbinary(const OrientedSet& set) {
  return detail::to_outcome(
      detail::top_down(set.points.size(), set.constraints, {true, false, SplitStyle::kMultiway}));
}

// Triplet constraints of the shape, mapped onto the tuple's points.
inline std::vector<Constraint> reduce_ktuple(const Constraint& c) {
  if (!c.is_ktuple()) return {c};
  const auto& kt = c.as_ktuple();
  PointSet local = PointSet::numbered(kt.points.size());
  OrientedSet shape_triplets = extract_triplets(kt.shape, local);
  std::vector<Constraint> out;
  out.reserve(shape_triplets.size());
  for (const auto& t : shape_triplets.constraints) {
    if (t.is_split_pair()) {
      const auto& s = t.as_split_pair();
      out.push_back(Constraint::split_pair(kt.points[s.first], kt.points[s.second], kt.points[s.cut]));
    } else {
      const auto& w = t.as_three_way().points;
      out.push_back(Constraint::three_way(kt.points[w[0]], kt.points[w[1]], kt.points[w[2]]));
    }
  }
  return out;
}

// Replaces every k-tuple by its triplet constraints.
inline OrientedSet flatten_ktuples(const OrientedSet& set) {
  if (!set.has_ktuple()) return set;
  OrientedSet out;
  out.points = set.points;
  for (const auto& c : set.constraints)
    for (auto& r : reduce_ktuple(c)) out.constraints.push_back(std::move(r));
  return out;
}

// Builds with the binary path unless three-way constraints or `nonbinary`
// call for the multiway one. k-tuples are flattened first.
inline BuildOutcome check_satisfiable(const OrientedSet& set, bool nonbinary = false) {
  OrientedSet flat = flatten_ktuples(set);
  if (nonbinary || flat.has_three_way()) return build_nonbinary(flat);
  return build_binary(flat);
}

// True when the edges of constraints induced by `subset` (closed under
// three-way extension when `closure`) connect it.
inline bool connects(std::span<const Constraint> constraints, std::span<const Point> subset, bool closure) {
  if (subset.empty()) return false;
  Point max_p = *std::max_element(subset.begin(), subset.end());
  std::vector<int> local(static_cast<std::size_t>(max_p) + 1, -1);
  for (std::size_t i = 0; i < subset.size(); ++i) local[subset[i]] = static_cast<int>(i);
  auto inside = [&](Point p) { return p <= max_p && local[p] >= 0; };
  UnionFind uf(subset.size());
  std::vector<std::array<int, 3>> pending;
  for (const auto& c : constraints) {
    auto ps = c.points();
    if (!std::all_of(ps.begin(), ps.end(), inside)) continue;
    if (c.is_split_pair()) {
      uf.unite(local[c.as_split_pair().first], local[c.as_split_pair().second]);
    } else if (c.is_three_way()) {
      pending.push_back({local[ps[0]], local[ps[1]], local[ps[2]]});
    }
  }
  if (closure) detail::close_three_ways(uf, std::move(pending));
  return uf.set_count() == 1;
}

// Closed set found by the matching builder, or nullopt when a tree exists.
// The returned set is checked to be connected by its induced constraints.
inline std::optional<ClosedSetWitness> find_closed_set(const OrientedSet& set, bool nonbinary = false) {
  OrientedSet flat = flatten_ktuples(set);
  bool closure = nonbinary || flat.has_three_way();
  BuildOutcome out = closure ? build_nonbinary(flat) : build_binary(flat);
  if (out.accepted()) return std::nullopt;
  const auto& w = out.witness();
  if (!connects(flat.constraints, w.points, closure))
    throw std::logic_error("builder returned a witness that is not connected");
  return w;
}

struct AgnosticResult {
  HierarchicalTree tree;
  std::size_t violations = 0;
};

// Splits on components when possible, otherwise on a global minimum cut of
// the generated-edge multigraph, dropping the cut constraints. The violation
// count is recomputed on the finished tree.
inline AgnosticResult build_agnostic(const OrientedSet& set, SplitStyle style = SplitStyle::kComb) {
  auto r = detail::top_down(set.points.size(), set.constraints, {false, true, style});
  AgnosticResult out{std::move(*r.tree), 0};
  for (const auto& c : set.constraints)
    if (!satisfies(out.tree, c)) ++out.violations;
  return out;
}

// Triplets {p, q, x} for every other tuple member x, in tuple order.
inline std::vector<Triplet> shared_pair_decomposition(std::span<const Point> tuple, Point p, Point q) {
  if (p == q) throw std::invalid_argument("pivot points must differ");
  if (std::find(tuple.begin(), tuple.end(), p) == tuple.end() ||
      std::find(tuple.begin(), tuple.end(), q) == tuple.end())
    throw std::invalid_argument("pivot pair is not in the tuple");
  std::vector<Triplet> out;
  for (Point x : tuple)
    if (x != p && x != q) out.emplace_back(p, q, x);
  return out;
}

// A shape over tuple positions realizing one split-pair orientation per
// pivot triplet (same order as shared_pair_decomposition): members cut off
// above the pivot pair sit beside it, the others join p's or q's side.
inline HierarchicalTree tuple_tree_from_pivot_orientation(std::span<const Point> tuple, Point p, Point q,
                                                          std::span<const Constraint> orientation) {
  auto pos = [&](Point x) {
    return static_cast<Point>(std::find(tuple.begin(), tuple.end(), x) - tuple.begin());
  };
  std::vector<Point> with_p, with_q, outside;
  std::size_t idx = 0;
  for (Point x : tuple) {
    if (x == p || x == q) continue;
    if (idx >= orientation.size()) throw std::invalid_argument("orientation list too short");
    const Constraint& c = orientation[idx++];
    if (!c.is_split_pair()) throw std::invalid_argument("pivot orientation must be split pairs");
    const auto& s = c.as_split_pair();
    if (s.cut == x) {
      outside.push_back(pos(x));
    } else if (s.cut == q) {
      with_p.push_back(pos(x));
    } else if (s.cut == p) {
      with_q.push_back(pos(x));
    } else {
      throw std::invalid_argument("orientation does not match the pivot triplet");
    }
  }
  TreeBuilder b(tuple.size());
  auto comb = [&](const std::vector<Point>& pts) {
    NodeId acc = b.add_leaf(pts[0]);
    for (std::size_t i = 1; i < pts.size(); ++i) acc = b.add_internal({acc, b.add_leaf(pts[i])});
    return acc;
  };
  auto side = [&](Point pivot, const std::vector<Point>& members) {
    NodeId leaf = b.add_leaf(pos(pivot));
    if (members.empty()) return leaf;
    return b.add_internal({leaf, comb(members)});
  };
  NodeId sp = side(p, with_p);
  NodeId sq = side(q, with_q);
  NodeId root = b.add_internal({sp, sq});
  if (!outside.empty()) root = b.add_internal({root, comb(outside)});
  return std::move(b).build(root, Arity::kBinary);
}

}  // namespace hct
