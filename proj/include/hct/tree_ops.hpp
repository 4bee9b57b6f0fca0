#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "hct/constraint.hpp"
#include "hct/tree.hpp"

namespace hct {

// Deepest common ancestor via root-path walk.
inline NodeId lca_nodes(const HierarchicalTree& t, NodeId u, NodeId v) {
  int du = t.depth(u), dv = t.depth(v);
  while (du > dv) {
    u = t.parent(u);
    --du;
  }
  while (dv > du) {
    v = t.parent(v);
    --dv;
  }
  while (u != v) {
    u = t.parent(u);
    v = t.parent(v);
  }
  return u;
}

inline NodeId lca(const HierarchicalTree& t, Point u, Point v) {
  if (u == v) throw std::invalid_argument("lca needs two distinct points");
  return lca_nodes(t, t.leaf_of(u), t.leaf_of(v));
}

// The unique split pair or three-way constraint `t` satisfies on {a,b,c}.
inline Constraint triplet_relation(const HierarchicalTree& t, Point a, Point b, Point c) {
  NodeId ab = lca(t, a, b), ac = lca(t, a, c), bc = lca(t, b, c);
  if (ab == ac && ac == bc) return Constraint::three_way(a, b, c);
  if (ac == bc) return Constraint::split_pair(a, b, c);
  if (ab == bc) return Constraint::split_pair(a, c, b);
  return Constraint::split_pair(b, c, a);
}

// Restriction of `t` to `points` (>= 2 distinct), as a shape over local
// indices 0..k-1 in the order given.
inline HierarchicalTree restrict_tree(const HierarchicalTree& t, std::span<const Point> points) {
  TreeBuilder b(points.size());
  std::vector<std::size_t> all(points.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  std::function<NodeId(const std::vector<std::size_t>&)> rec =
      [&](const std::vector<std::size_t>& members) -> NodeId {
    if (members.size() == 1) return b.add_leaf(static_cast<Point>(members[0]));
    NodeId top = t.leaf_of(points[members[0]]);
    for (std::size_t i = 1; i < members.size(); ++i)
      top = lca_nodes(t, top, t.leaf_of(points[members[i]]));
    std::vector<std::pair<NodeId, std::vector<std::size_t>>> groups;
    for (std::size_t m : members) {
      NodeId v = t.leaf_of(points[m]);
      while (t.parent(v) != top) v = t.parent(v);
      auto it = std::find_if(groups.begin(), groups.end(), [&](auto& g) { return g.first == v; });
      if (it == groups.end()) {
        groups.push_back({v, {m}});
      } else {
        it->second.push_back(m);
      }
    }
    std::vector<NodeId> kids;
    for (auto& g : groups) kids.push_back(rec(g.second));
    return b.add_internal(kids);
  };
  NodeId root = rec(all);
  HierarchicalTree r = std::move(b).build(root);
  Arity a = r.is_binary() ? Arity::kBinary : Arity::kMultiway;
  return HierarchicalTree(std::vector<TreeNode>(r.nodes()), r.root(), r.num_points(), a);
}

// Orientation `t` induces on a tuple: split pair / three-way for triples,
// a k-tuple shape otherwise.
inline Constraint tuple_orientation(const HierarchicalTree& t, std::span<const Point> tuple) {
  if (tuple.size() == 3) return triplet_relation(t, tuple[0], tuple[1], tuple[2]);
  HierarchicalTree shape = restrict_tree(t, tuple);
  return Constraint::ktuple(std::vector<Point>(tuple.begin(), tuple.end()), shape);
}

inline bool satisfies(const HierarchicalTree& t, const Constraint& c) {
  switch (c.kind()) {
    case ConstraintKind::kSplitPair: {
      const auto& s = c.as_split_pair();
      NodeId ac = lca(t, s.first, s.cut);
      NodeId bc = lca(t, s.second, s.cut);
      return ac == bc && lca(t, s.first, s.second) != ac;
    }
    case ConstraintKind::kThreeWay: {
      const auto& w = c.as_three_way();
      NodeId ab = lca(t, w.points[0], w.points[1]);
      return ab == lca(t, w.points[1], w.points[2]) && ab == lca(t, w.points[0], w.points[2]);
    }
    case ConstraintKind::kKTuple: {
      const auto& kt = c.as_ktuple();
      const auto k = kt.points.size();
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
          for (std::size_t l = j + 1; l < k; ++l) {
            Point a = static_cast<Point>(i), b = static_cast<Point>(j), d = static_cast<Point>(l);
            Constraint local = triplet_relation(kt.shape, a, b, d);
            if (!local.is_split_pair()) {
              // a three-way triple of a multiway shape
              Constraint g = Constraint::three_way(kt.points[i], kt.points[j], kt.points[l]);
              if (!satisfies(t, g)) return false;
              continue;
            }
            const auto& s = local.as_split_pair();
            Constraint g = Constraint::split_pair(kt.points[s.first], kt.points[s.second], kt.points[s.cut]);
            if (!satisfies(t, g)) return false;
          }
      return true;
    }
  }
  return false;
}

// All pairwise lca nodes in O(n^2); extraction of C(n,3) triples uses it.
class PairwiseLca {
 public:
  explicit PairwiseLca(const HierarchicalTree& t) : n_(t.num_points()), lca_(n_ * n_, kNoNode) {
    std::vector<std::vector<Point>> under(t.num_nodes());
    for (NodeId v : t.postorder()) {
      const auto& nd = t.node(v);
      if (nd.children.empty()) {
        under[v] = {nd.point};
        continue;
      }
      std::vector<Point> acc;
      for (NodeId c : nd.children) {
        for (Point p : acc)
          for (Point q : under[c]) {
            lca_[static_cast<std::size_t>(p) * n_ + q] = v;
            lca_[static_cast<std::size_t>(q) * n_ + p] = v;
          }
        acc.insert(acc.end(), under[c].begin(), under[c].end());
        under[c].clear();
        under[c].shrink_to_fit();
      }
      under[v] = std::move(acc);
    }
  }
  NodeId operator()(Point a, Point b) const { return lca_[static_cast<std::size_t>(a) * n_ + b]; }

 private:
  std::size_t n_;
  std::vector<NodeId> lca_;
};

// Every 3-subset in lexicographic index order with the constraint t satisfies.
inline OrientedSet extract_triplets(const HierarchicalTree& t, const PointSet& points) {
  const auto n = static_cast<Point>(t.num_points());
  if (n < 3) throw std::invalid_argument("extract_triplets needs at least 3 leaves");
  PairwiseLca L(t);
  OrientedSet out;
  out.points = points;
  out.constraints.reserve(static_cast<std::size_t>(n) * (n - 1) * (n - 2) / 6);
  for (Point a = 0; a < n; ++a)
    for (Point b = a + 1; b < n; ++b)
      for (Point c = b + 1; c < n; ++c) {
        NodeId ab = L(a, b), ac = L(a, c), bc = L(b, c);
        if (ab == ac && ac == bc) {
          out.constraints.push_back(Constraint::three_way(a, b, c));
        } else if (ac == bc) {
          out.constraints.push_back(Constraint::split_pair(a, b, c));
        } else if (ab == bc) {
          out.constraints.push_back(Constraint::split_pair(a, c, b));
        } else {
          out.constraints.push_back(Constraint::split_pair(b, c, a));
        }
      }
  return out;
}

// Caterpillar: root children are order[0] and the ladder of the rest.
// `order` must be a permutation of 0..l-1.
inline HierarchicalTree ladder(std::span<const Point> order) {
  if (order.size() < 2) throw std::invalid_argument("ladder needs at least 2 points");
  TreeBuilder b(order.size());
  NodeId bottom = b.add_internal({b.add_leaf(order[order.size() - 2]), b.add_leaf(order.back())});
  for (std::size_t i = order.size() - 2; i-- > 0;) bottom = b.add_internal({b.add_leaf(order[i]), bottom});
  return std::move(b).build(bottom, Arity::kBinary);
}

namespace detail {

// Mutable arena used by enumeration and random generation.
struct Arena {
  std::vector<TreeNode> nodes;
  NodeId root = kNoNode;

  NodeId leaf(Point p) {
    nodes.push_back(TreeNode{kNoNode, {}, p});
    return static_cast<NodeId>(nodes.size() - 1);
  }

  // Subdivides the edge above `v` with a new internal node holding a new leaf.
  NodeId insert_above(NodeId v, Point p) {
    NodeId l = leaf(p);
    NodeId w = static_cast<NodeId>(nodes.size());
    NodeId par = nodes[v].parent;
    nodes.push_back(TreeNode{par, {v, l}, kNoPoint});
    nodes[v].parent = w;
    nodes[l].parent = w;
    if (par == kNoNode) {
      root = w;
    } else {
      auto& ch = nodes[par].children;
      *std::find(ch.begin(), ch.end(), v) = w;
    }
    return w;
  }

  void undo_insert_above(NodeId w) {
    NodeId v = nodes[w].children[0];
    NodeId par = nodes[w].parent;
    nodes[v].parent = par;
    if (par == kNoNode) {
      root = v;
    } else {
      auto& ch = nodes[par].children;
      *std::find(ch.begin(), ch.end(), w) = v;
    }
    nodes.pop_back();  // w
    nodes.pop_back();  // leaf
  }

  void attach_child(NodeId u, Point p) {
    NodeId l = leaf(p);
    nodes[l].parent = u;
    nodes[u].children.push_back(l);
  }

  void undo_attach_child(NodeId u) {
    nodes[u].children.pop_back();
    nodes.pop_back();
  }

  HierarchicalTree freeze(std::size_t num_points, Arity a) const {
    return HierarchicalTree(nodes, root, num_points, a);
  }
};

}  // namespace detail

inline constexpr std::size_t kDefaultEnumerationCap = 8;

inline std::uint64_t double_factorial_odd(std::size_t n) {
  // (2n-3)!! for n >= 2
  std::uint64_t r = 1;
  for (std::uint64_t x = 3; x + 3 <= 2 * n; x += 2) r *= x;
  return r;
}

// Calls fn once for every rooted binary tree with leaves 0..n-1;
// (2n-3)!! trees in total.
inline void for_each_binary_tree(std::size_t n, const std::function<void(const HierarchicalTree&)>& fn,
                                 std::size_t cap = kDefaultEnumerationCap) {
  if (n > cap) throw BudgetExceeded("enumeration-cap", "binary tree enumeration above n=" + std::to_string(cap));
  if (n < 2) throw std::invalid_argument("enumeration needs at least 2 points");
  detail::Arena a;
  NodeId l0 = a.leaf(0);
  a.root = l0;
  a.insert_above(l0, 1);
  std::function<void(Point)> rec = [&](Point next) {
    if (static_cast<std::size_t>(next) == n) {
      fn(a.freeze(n, Arity::kBinary));
      return;
    }
    const auto count = static_cast<NodeId>(a.nodes.size());
    for (NodeId v = 0; v < count; ++v) {
      NodeId w = a.insert_above(v, next);
      rec(next + 1);
      a.undo_insert_above(w);
    }
  };
  rec(2);
}

inline std::vector<HierarchicalTree> enumerate_binary_trees(std::size_t n,
                                                            std::size_t cap = kDefaultEnumerationCap) {
  std::vector<HierarchicalTree> out;
  for_each_binary_tree(n, [&](const HierarchicalTree& t) { out.push_back(t); }, cap);
  return out;
}

// Every rooted tree with leaves 0..n-1 and no unary nodes (1, 4, 26, 236, ...).
inline void for_each_multiway_tree(std::size_t n, const std::function<void(const HierarchicalTree&)>& fn,
                                   std::size_t cap = kDefaultEnumerationCap) {
  if (n > cap) throw BudgetExceeded("enumeration-cap", "multiway tree enumeration above n=" + std::to_string(cap));
  if (n < 2) throw std::invalid_argument("enumeration needs at least 2 points");
  detail::Arena a;
  NodeId l0 = a.leaf(0);
  a.root = l0;
  a.insert_above(l0, 1);
  std::function<void(Point)> rec = [&](Point next) {
    if (static_cast<std::size_t>(next) == n) {
      fn(a.freeze(n, Arity::kMultiway));
      return;
    }
    const auto count = static_cast<NodeId>(a.nodes.size());
    for (NodeId v = 0; v < count; ++v) {
      NodeId w = a.insert_above(v, next);
      rec(next + 1);
      a.undo_insert_above(w);
      if (!a.nodes[v].children.empty()) {
        a.attach_child(v, next);
        rec(next + 1);
        a.undo_attach_child(v);
      }
    }
  };
  rec(2);
}

inline std::vector<HierarchicalTree> enumerate_multiway_trees(std::size_t n,
                                                              std::size_t cap = kDefaultEnumerationCap) {
  std::vector<HierarchicalTree> out;
  for_each_multiway_tree(n, [&](const HierarchicalTree& t) { out.push_back(t); }, cap);
  return out;
}

// Uniform over leaf-labeled binary shapes: each new leaf subdivides a
// uniformly chosen edge (the root edge included).
template <class Rng>
HierarchicalTree random_binary_tree(std::size_t n, Rng& rng) {
  if (n < 2) throw std::invalid_argument("random tree needs at least 2 points");
  detail::Arena a;
  a.nodes.reserve(2 * n);
  NodeId l0 = a.leaf(0);
  a.root = l0;
  a.insert_above(l0, 1);
  for (std::size_t i = 2; i < n; ++i) {
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(a.nodes.size()) - 1);
    a.insert_above(pick(rng), static_cast<Point>(i));
  }
  return a.freeze(n, Arity::kBinary);
}

template <class Rng>
HierarchicalTree random_binary_tree_seeded(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return random_binary_tree(n, rng);
}

// Replaces every node with more than two children by a uniformly random
// binary tree over those children.
template <class Rng>
HierarchicalTree binarize(const HierarchicalTree& t, Rng& rng) {
  if (t.is_binary()) {
    return HierarchicalTree(std::vector<TreeNode>(t.nodes()), t.root(), t.num_points(), Arity::kBinary);
  }
  TreeBuilder b(t.num_points());
  std::vector<NodeId> mapped(t.num_nodes(), kNoNode);
  for (NodeId v : t.postorder()) {
    const auto& nd = t.node(v);
    if (nd.children.empty()) {
      mapped[v] = b.add_leaf(nd.point);
      continue;
    }
    std::vector<NodeId> kids;
    for (NodeId c : nd.children) kids.push_back(mapped[c]);
    if (kids.size() == 2) {
      mapped[v] = b.add_internal(kids);
      continue;
    }
    HierarchicalTree shape = random_binary_tree(kids.size(), rng);
    std::vector<NodeId> local(shape.num_nodes(), kNoNode);
    for (NodeId s : shape.postorder()) {
      const auto& sn = shape.node(s);
      if (sn.children.empty()) {
        local[s] = kids[sn.point];
      } else {
        local[s] = b.add_internal({local[sn.children[0]], local[sn.children[1]]});
      }
    }
    mapped[v] = local[shape.root()];
  }
  return std::move(b).build(mapped[t.root()], Arity::kBinary);
}

// Top-down random multiway tree: a node over m points gets a child count
// drawn uniformly from [2, min(max_children, m)] and a random partition.
template <class Rng>
HierarchicalTree random_multiway_tree(std::size_t n, Rng& rng, std::size_t max_children) {
  if (n < 2) throw std::invalid_argument("random tree needs at least 2 points");
  if (max_children < 2) throw std::invalid_argument("max_children must be >= 2");
  TreeBuilder b(n);
  std::vector<Point> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<Point>(i);

  struct Frame {
    std::vector<Point> members;
    std::vector<std::vector<Point>> parts;
    std::vector<NodeId> done;
  };
  std::vector<Frame> stack;
  NodeId result = kNoNode;
  auto open = [&](std::vector<Point> members) {
    if (members.size() == 1) return b.add_leaf(members[0]);
    std::shuffle(members.begin(), members.end(), rng);
    std::uniform_int_distribution<std::size_t> cdist(2, std::min(max_children, members.size()));
    std::size_t c = cdist(rng);
    // choose c-1 distinct cut positions in 1..m-1
    std::vector<std::size_t> cuts(members.size() - 1);
    for (std::size_t i = 0; i < cuts.size(); ++i) cuts[i] = i + 1;
    std::shuffle(cuts.begin(), cuts.end(), rng);
    cuts.resize(c - 1);
    std::sort(cuts.begin(), cuts.end());
    Frame f;
    std::size_t prev = 0;
    for (std::size_t cut : cuts) {
      f.parts.emplace_back(members.begin() + static_cast<std::ptrdiff_t>(prev),
                           members.begin() + static_cast<std::ptrdiff_t>(cut));
      prev = cut;
    }
    f.parts.emplace_back(members.begin() + static_cast<std::ptrdiff_t>(prev), members.end());
    f.members = std::move(members);
    stack.push_back(std::move(f));
    return kNoNode;
  };
  result = open(all);
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.done.size() == f.parts.size()) {
      NodeId id = b.add_internal(f.done);
      stack.pop_back();
      if (stack.empty()) {
        result = id;
      } else {
        stack.back().done.push_back(id);
      }
      continue;
    }
    std::vector<Point> part = f.parts[f.done.size()];
    NodeId leaf = open(std::move(part));
    if (leaf != kNoNode) stack.back().done.push_back(leaf);
  }
  return std::move(b).build(result, Arity::kMultiway);
}

// Star: one internal node over all points.
inline HierarchicalTree star_tree(std::size_t n) {
  TreeBuilder b(n);
  std::vector<NodeId> kids;
  for (std::size_t i = 0; i < n; ++i) kids.push_back(b.add_leaf(static_cast<Point>(i)));
  NodeId root = b.add_internal(kids);
  return std::move(b).build(root, n == 2 ? Arity::kBinary : Arity::kMultiway);
}

}  // namespace hct
