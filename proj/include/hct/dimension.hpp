#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "hct/builder.hpp"
#include "hct/constraint.hpp"
#include "hct/tree_index.hpp"
#include "hct/tree_ops.hpp"

namespace hct {

inline constexpr std::uint64_t kDefaultOrientationBudget = 14348907;  // 3^15

// The orientations of one triple in canonical order:
// [a,b|c], [a,c|b], [b,c|a], then [a|b|c] when allowed.
inline std::vector<Constraint> triplet_orientations(const std::vector<Point>& t, bool allow_three_way) {
  std::vector<Point> s = t;
  std::sort(s.begin(), s.end());
  std::vector<Constraint> out{Constraint::split_pair(s[0], s[1], s[2]), Constraint::split_pair(s[0], s[2], s[1]),
                              Constraint::split_pair(s[1], s[2], s[0])};
  if (allow_three_way) out.push_back(Constraint::three_way(s[0], s[1], s[2]));
  return out;
}

// Every shape on the tuple's points (binary, or multiway when asked), in
// canonical constraint order. k-tuples of size 3 yield triplet constraints.
inline std::vector<Constraint> tuple_orientations(const std::vector<Point>& tuple, bool nonbinary) {
  if (tuple.size() == 3) return triplet_orientations(tuple, nonbinary);
  std::vector<Constraint> out;
  auto add = [&](const HierarchicalTree& shape) { out.push_back(Constraint::ktuple(tuple, shape)); };
  if (nonbinary) {
    for_each_multiway_tree(tuple.size(), add);
  } else {
    for_each_binary_tree(tuple.size(), add);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

inline std::uint64_t checked_power(std::uint64_t base, std::size_t exp, std::uint64_t budget,
                                   const std::string& cap) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (r > budget / base) throw BudgetExceeded(cap, cap + " exceeded: " + std::to_string(base) + "^" +
                                                         std::to_string(exp) + " > " + std::to_string(budget));
    r *= base;
  }
  return r;
}

// Mixed-radix walk over one choice per slot, first slot most significant;
// stops when `fn` returns true.
inline bool for_each_choice(const std::vector<std::size_t>& radix, const std::function<bool(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> digit(radix.size(), 0);
  while (true) {
    if (fn(digit)) return true;
    std::size_t i = radix.size();
    while (i > 0) {
      if (++digit[i - 1] < radix[i - 1]) break;
      digit[i - 1] = 0;
      --i;
    }
    if (i == 0) return false;
  }
}

}  // namespace detail

// First orientation (lexicographic over tuple order, canonical orientation
// order) that no tree satisfies.
inline std::optional<OrientedSet> exists_contradictory_orientation(const ConstraintSet& set, bool allow_three_way,
                                                                   std::uint64_t budget = kDefaultOrientationBudget) {
  if (set.k != 3 && !set.tuples.empty()) throw std::invalid_argument("triplet sets only");
  detail::checked_power(allow_three_way ? 4 : 3, set.size(), budget, "orientation-budget");
  std::vector<std::vector<Constraint>> options;
  for (const auto& t : set.tuples) options.push_back(triplet_orientations(t, allow_three_way));
  std::vector<std::size_t> radix(options.size(), allow_three_way ? 4 : 3);
  OrientedSet found;
  bool ok = detail::for_each_choice(radix, [&](const std::vector<std::size_t>& d) {
    OrientedSet o;
    o.points = set.points;
    for (std::size_t i = 0; i < d.size(); ++i) o.constraints.push_back(options[i][d[i]]);
    BuildOutcome b = allow_three_way ? build_nonbinary(o) : build_binary(o);
    if (b.accepted()) return false;
    found = std::move(o);
    return true;
  });
  if (!ok) return std::nullopt;
  return found;
}

// Same search over whole k-tuple shapes.
inline std::optional<OrientedSet> exists_contradictory_tuple_orientation(const ConstraintSet& set, bool nonbinary,
                                                                         std::uint64_t budget = kDefaultOrientationBudget) {
  std::vector<std::vector<Constraint>> options;
  std::vector<std::size_t> radix;
  std::uint64_t total = 1;
  for (const auto& t : set.tuples) {
    options.push_back(tuple_orientations(t, nonbinary));
    radix.push_back(options.back().size());
    if (total > budget / radix.back()) throw BudgetExceeded("orientation-budget", "orientation-budget exceeded");
    total *= radix.back();
  }
  OrientedSet found;
  bool ok = detail::for_each_choice(radix, [&](const std::vector<std::size_t>& d) {
    OrientedSet o;
    o.points = set.points;
    for (std::size_t i = 0; i < d.size(); ++i) o.constraints.push_back(options[i][d[i]]);
    if (check_satisfiable(o, nonbinary).accepted()) return false;
    found = std::move(o);
    return true;
  });
  if (!ok) return std::nullopt;
  return found;
}

inline constexpr std::size_t kCriticalSetCap = 16;

inline std::size_t count_induced(const ConstraintSet& set, std::span<const Point> subset) {
  std::size_t c = 0;
  for (const auto& t : set.tuples)
    if (std::all_of(t.begin(), t.end(), [&](Point p) { return std::find(subset.begin(), subset.end(), p) != subset.end(); }))
      ++c;
  return c;
}

// Smallest S (|S| >= 2, lexicographic among equals) inducing >= |S|-1 tuples.
inline std::optional<std::vector<Point>> find_critical_set(const ConstraintSet& set) {
  const std::size_t n = set.points.size();
  if (n > kCriticalSetCap)
    throw BudgetExceeded("critical-set-cap", "critical set search is exhaustive up to n=" + std::to_string(kCriticalSetCap));
  std::vector<std::uint32_t> masks;
  for (const auto& t : set.tuples) {
    std::uint32_t m = 0;
    for (Point p : t) m |= 1U << p;
    masks.push_back(m);
  }
  for (std::size_t s = 2; s <= n; ++s) {
    std::vector<Point> cur(s);
    for (std::size_t i = 0; i < s; ++i) cur[i] = static_cast<Point>(i);
    while (true) {
      std::uint32_t sm = 0;
      for (Point p : cur) sm |= 1U << p;
      std::size_t induced = 0;
      for (auto m : masks)
        if ((m & sm) == m) ++induced;
      if (induced + 1 >= s) return cur;
      std::size_t i = s;
      while (i > 0 && cur[i - 1] == static_cast<Point>(n - s + i - 1)) --i;
      if (i == 0) break;
      ++cur[i - 1];
      for (std::size_t j = i; j < s; ++j) cur[j] = cur[j - 1] + 1;
    }
  }
  return std::nullopt;
}

inline constexpr std::size_t kExhaustiveConnectLimit = 15;
inline constexpr std::size_t kReorientStepCap = 10000;

// An orientation of the tuples induced by a critical S whose edges connect S.
// Exhaustive up to 15 induced triplets, local reorientation search beyond.
inline OrientedSet connect_critical_set(const ConstraintSet& set, const std::vector<Point>& subset) {
  if (set.k != 3) throw std::invalid_argument("triplet sets only");
  auto crit = find_critical_set(set);
  if (!crit || crit->size() != subset.size() || count_induced(set, subset) + 1 < subset.size())
    throw std::invalid_argument("subset is not critical");
  std::vector<std::vector<Point>> induced;
  for (const auto& t : set.tuples)
    if (std::all_of(t.begin(), t.end(), [&](Point p) { return std::find(subset.begin(), subset.end(), p) != subset.end(); }))
      induced.push_back(t);
  std::vector<std::vector<Constraint>> options;
  for (const auto& t : induced) options.push_back(triplet_orientations(t, false));
  auto make = [&](const std::vector<std::size_t>& d) {
    OrientedSet o;
    o.points = set.points;
    for (std::size_t i = 0; i < d.size(); ++i) o.constraints.push_back(options[i][d[i]]);
    return o;
  };

  if (induced.size() <= kExhaustiveConnectLimit) {
    OrientedSet found;
    bool ok = detail::for_each_choice(std::vector<std::size_t>(induced.size(), 3), [&](const auto& d) {
      OrientedSet o = make(d);
      if (!connects(o.constraints, subset, false)) return false;
      found = std::move(o);
      return true;
    });
    if (!ok) throw std::logic_error("critical set with no connecting orientation");
    return found;
  }

  // Local improvement on (components, -largest component), one or two
  // reorientations per step.
  auto score = [&](const std::vector<std::size_t>& d) {
    OrientedSet o = make(d);
    Point max_p = *std::max_element(subset.begin(), subset.end());
    std::vector<int> local(static_cast<std::size_t>(max_p) + 1, -1);
    for (std::size_t i = 0; i < subset.size(); ++i) local[subset[i]] = static_cast<int>(i);
    UnionFind uf(subset.size());
    for (const auto& c : o.constraints) uf.unite(local[c.as_split_pair().first], local[c.as_split_pair().second]);
    int largest = 0;
    for (std::size_t i = 0; i < subset.size(); ++i) largest = std::max(largest, uf.set_size(static_cast<int>(i)));
    return std::pair<std::size_t, int>{uf.set_count(), -largest};
  };
  std::vector<std::size_t> d(induced.size(), 0);
  auto best = score(d);
  for (std::size_t step = 0; step < kReorientStepCap && best.first > 1; ++step) {
    bool moved = false;
    for (std::size_t i = 0; i < d.size() && !moved; ++i)
      for (std::size_t a = 0; a < 3 && !moved; ++a) {
        if (a == d[i]) continue;
        auto e = d;
        e[i] = a;
        auto s = score(e);
        if (s < best) {
          best = s;
          d = std::move(e);
          moved = true;
        }
      }
    for (std::size_t i = 0; i < d.size() && !moved; ++i)
      for (std::size_t j = i + 1; j < d.size() && !moved; ++j)
        for (std::size_t a = 0; a < 3 && !moved; ++a)
          for (std::size_t b = 0; b < 3 && !moved; ++b) {
            if (a == d[i] || b == d[j]) continue;
            auto e = d;
            e[i] = a;
            e[j] = b;
            auto s = score(e);
            if (s < best) {
              best = s;
              d = std::move(e);
              moved = true;
            }
          }
    if (!moved) break;
  }
  if (best.first != 1)
    throw BudgetExceeded("reorientation-steps", "local reorientation search did not connect the critical set");
  return make(d);
}

struct LabelPair {
  Constraint f1;
  Constraint f2;
};

inline constexpr std::size_t kShatterSubsetCap = 20;

// Every mix of f1 on R and f2 off R is satisfiable, for all R.
inline bool is_n_shattered(const ConstraintSet& set, const std::vector<LabelPair>& pairs, bool nonbinary) {
  if (pairs.size() != set.size()) throw std::invalid_argument("one label pair per tuple");
  if (set.size() > kShatterSubsetCap)
    throw BudgetExceeded("shatter-subset-cap", "2^" + std::to_string(set.size()) + " subsets is above the cap");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].f1 == pairs[i].f2) return false;
    if (pairs[i].f1.points() != set.tuples[i] || pairs[i].f2.points() != set.tuples[i])
      throw std::invalid_argument("label pair does not orient its tuple");
  }
  const std::uint64_t subsets = std::uint64_t{1} << set.size();
  for (std::uint64_t r = 0; r < subsets; ++r) {
    OrientedSet o;
    o.points = set.points;
    for (std::size_t i = 0; i < pairs.size(); ++i) o.constraints.push_back((r >> i) & 1U ? pairs[i].f1 : pairs[i].f2);
    if (!check_satisfiable(o, nonbinary).accepted()) return false;
  }
  return true;
}

inline constexpr std::size_t kNatarajanCap = 6;

struct NatarajanResult {
  std::size_t dimension = 0;
  std::vector<std::size_t> tuples;                              // tuple ids in the index
  std::vector<std::pair<std::size_t, std::size_t>> orientations;  // (f1, f2) indices
};

// Largest N-shattered configuration over all k-subsets of n points, by depth
// first search over configurations in increasing tuple order (shattering is
// inherited by subsets, so pruning at the first failure is exact).
inline NatarajanResult natarajan_search(const TreeIndex& index) {
  NatarajanResult best;
  std::vector<std::size_t> tuples;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::function<void(std::size_t, const std::vector<Bitset>&)> dfs = [&](std::size_t from,
                                                                         const std::vector<Bitset>& cells) {
    if (tuples.size() > best.dimension) {
      best.dimension = tuples.size();
      best.tuples = tuples;
      best.orientations = pairs;
    }
    // 2^m disjoint nonempty cells need 2^m trees
    if ((std::size_t{1} << (tuples.size() + 1)) > index.num_trees()) return;
    for (std::size_t s = from; s < index.num_tuples(); ++s) {
      const auto& os = index.orientations(s);
      for (std::size_t a = 0; a < os.size(); ++a)
        for (std::size_t b = a + 1; b < os.size(); ++b) {
          std::vector<Bitset> next;
          next.reserve(cells.size() * 2);
          bool ok = true;
          for (const auto& c : cells) {
            Bitset x = c & index.satisfying(s, a);
            Bitset y = c & index.satisfying(s, b);
            if (!x.any() || !y.any()) {
              ok = false;
              break;
            }
            next.push_back(std::move(x));
            next.push_back(std::move(y));
          }
          if (!ok) continue;
          tuples.push_back(s);
          pairs.emplace_back(a, b);
          dfs(s + 1, next);
          tuples.pop_back();
          pairs.pop_back();
        }
    }
  };
  dfs(0, {index.all()});
  return best;
}

inline std::size_t natarajan_dimension(std::size_t n, std::size_t k, bool nonbinary, std::size_t cap = kNatarajanCap) {
  if (n > cap) throw BudgetExceeded("natarajan-cap", "natarajan search is exhaustive up to n=" + std::to_string(cap));
  TreeIndex index(n, k, nonbinary ? Arity::kMultiway : Arity::kBinary, std::max(cap, kDefaultEnumerationCap));
  return natarajan_search(index).dimension;
}

// Constraint for a tuple from a shape over its positions; triples give
// triplet constraints.
inline Constraint orientation_from_shape(const std::vector<Point>& tuple, const HierarchicalTree& shape) {
  if (tuple.size() != 3) return Constraint::ktuple(tuple, shape);
  Constraint c = triplet_relation(shape, 0, 1, 2);
  if (c.is_three_way()) return Constraint::three_way(tuple[0], tuple[1], tuple[2]);
  const auto& s = c.as_split_pair();
  return Constraint::split_pair(tuple[s.first], tuple[s.second], tuple[s.cut]);
}

struct ShatteredConfig {
  ConstraintSet tuples;
  std::vector<LabelPair> pairs;
};

// A = first k-1 points under a fixed ladder; each other point b gives the
// tuple A+{b} with b placed beside A[0] (f1) or beside A[1] (f2).
inline ShatteredConfig construct_shattered_set(const PointSet& points, std::size_t k) {
  const std::size_t n = points.size();
  if (k < 3) throw std::invalid_argument("k must be at least 3");
  if (n < k) throw std::invalid_argument("need at least k points");
  ShatteredConfig out;
  out.tuples.points = points;
  out.tuples.k = k;
  // local positions 0..k-2 are A, k-1 is b
  std::vector<Point> a_order(k - 1);
  for (std::size_t i = 0; i < k - 1; ++i) a_order[i] = static_cast<Point>(i);
  auto attach_beside = [&](Point target) {
    HierarchicalTree ta = ladder(a_order);
    std::vector<TreeNode> nodes = ta.nodes();
    NodeId leaf = ta.leaf_of(target);
    NodeId par = nodes[leaf].parent;
    auto b = static_cast<NodeId>(nodes.size());
    nodes.push_back(TreeNode{kNoNode, {}, static_cast<Point>(k - 1)});
    auto joint = static_cast<NodeId>(nodes.size());
    nodes.push_back(TreeNode{par, {leaf, b}, kNoPoint});
    nodes[leaf].parent = joint;
    nodes[b].parent = joint;
    *std::find(nodes[par].children.begin(), nodes[par].children.end(), leaf) = joint;
    return HierarchicalTree(std::move(nodes), ta.root(), k, Arity::kBinary);
  };
  HierarchicalTree s1 = attach_beside(0);
  HierarchicalTree s2 = attach_beside(1);
  for (std::size_t b = k - 1; b < n; ++b) {
    std::vector<Point> tuple(k);
    for (std::size_t i = 0; i + 1 < k; ++i) tuple[i] = static_cast<Point>(i);
    tuple[k - 1] = static_cast<Point>(b);
    out.tuples.add(tuple);
    out.pairs.push_back({orientation_from_shape(tuple, s1), orientation_from_shape(tuple, s2)});
  }
  return out;
}

// Overlapping k-tuples t_1..t_m with |t_i & t_{i+1}| = 2:
// t_i starts at point i(k-2), m = ceil((n-1)/(k-2)) - 1.
inline ConstraintSet construct_tuple_chain(const PointSet& points, std::size_t k) {
  const std::size_t n = points.size();
  if (k < 3) throw std::invalid_argument("k must be at least 3");
  if (n < k) throw std::invalid_argument("need at least k points");
  const std::size_t m = (n - 1 + (k - 2) - 1) / (k - 2) - 1;
  if (m < 1) throw std::invalid_argument("chain would be empty");
  ConstraintSet out;
  out.points = points;
  out.k = k;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<Point> t(k);
    for (std::size_t j = 0; j < k; ++j) t[j] = static_cast<Point>(i * (k - 2) + j);
    out.add(std::move(t));
  }
  return out;
}

namespace detail {

// Mutable tree over global points used by the chain merge.
struct MergeTree {
  std::vector<TreeNode> nodes;
  NodeId root = kNoNode;
  std::vector<NodeId> leaf;  // per global point, kNoNode when absent

  NodeId copy_from(const HierarchicalTree& o, NodeId v, std::span<const Point> to_global) {
    const auto& src = o.node(v);
    if (src.children.empty()) {
      Point g = to_global[src.point];
      if (leaf[g] != kNoNode) return leaf[g];
      nodes.push_back(TreeNode{kNoNode, {}, g});
      leaf[g] = static_cast<NodeId>(nodes.size() - 1);
      return leaf[g];
    }
    std::vector<NodeId> kids;
    for (NodeId c : src.children) kids.push_back(copy_from(o, c, to_global));
    auto id = static_cast<NodeId>(nodes.size());
    nodes.push_back(TreeNode{kNoNode, kids, kNoPoint});
    for (NodeId c : kids) nodes[c].parent = id;
    return id;
  }

  // Puts `repl` where `old` hangs (repl may contain old as a descendant).
  void splice(NodeId old, NodeId repl, NodeId old_parent) {
    nodes[repl].parent = old_parent;
    if (old_parent == kNoNode) {
      root = repl;
    } else {
      auto& ch = nodes[old_parent].children;
      *std::find(ch.begin(), ch.end(), old) = repl;
    }
  }

  NodeId lca(NodeId a, NodeId b) const {
    std::vector<char> up(nodes.size(), 0);
    for (NodeId v = a; v != kNoNode; v = nodes[v].parent) up[v] = 1;
    NodeId v = b;
    while (!up[v]) v = nodes[v].parent;
    return v;
  }
};

}  // namespace detail

// Builds one tree satisfying an orientation of a tuple chain by merging each
// tuple's shape into the tree of the previous ones at their two shared
// points. Points outside the chain hang off a comb above the result.
inline HierarchicalTree merge_chain_orientation(const ConstraintSet& chain, const std::vector<Constraint>& orientation) {
  if (chain.tuples.empty() || orientation.size() != chain.size())
    throw std::invalid_argument("one orientation per chain tuple");
  const std::size_t n = chain.points.size();
  detail::MergeTree m;
  m.leaf.assign(n, kNoNode);
  auto shape_of = [&](const Constraint& c) -> HierarchicalTree {
    if (c.is_ktuple()) return c.as_ktuple().shape;
    const auto& s = c.as_split_pair();
    // local order follows the sorted points
    auto pts = c.points();
    auto loc = [&](Point p) { return static_cast<Point>(std::find(pts.begin(), pts.end(), p) - pts.begin()); };
    TreeBuilder b(3);
    NodeId pair = b.add_internal({b.add_leaf(loc(s.first)), b.add_leaf(loc(s.second))});
    NodeId root = b.add_internal({pair, b.add_leaf(loc(s.cut))});
    return std::move(b).build(root, Arity::kBinary);
  };
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const Constraint& c = orientation[i];
    if (c.points() != chain.tuples[i]) throw std::invalid_argument("orientation does not match its tuple");
    std::vector<Point> pts = c.points();
    HierarchicalTree o = shape_of(c);
    if (i == 0) {
      m.root = m.copy_from(o, o.root(), pts);
      continue;
    }
    std::vector<Point> shared;
    for (Point p : pts)
      if (m.leaf[p] != kNoNode) shared.push_back(p);
    if (shared.size() != 2) throw std::invalid_argument("consecutive chain tuples must share exactly two points");
    auto local = [&](Point g) { return static_cast<Point>(std::find(pts.begin(), pts.end(), g) - pts.begin()); };
    NodeId la = o.leaf_of(local(shared[0])), lb = o.leaf_of(local(shared[1]));
    NodeId w = lca_nodes(o, la, lb);
    auto child_towards = [&](NodeId leafnode) {
      NodeId v = leafnode;
      while (o.parent(v) != w) v = o.parent(v);
      return v;
    };
    for (auto [leafnode, g] : {std::pair{la, shared[0]}, std::pair{lb, shared[1]}}) {
      NodeId top = child_towards(leafnode);
      NodeId old = m.leaf[g];
      NodeId old_parent = m.nodes[old].parent;
      NodeId repl = m.copy_from(o, top, pts);
      if (repl != old) m.splice(old, repl, old_parent);
    }
    // the part of o above w goes above the shared pair's lca
    NodeId v = m.lca(m.leaf[shared[0]], m.leaf[shared[1]]);
    NodeId v_parent = m.nodes[v].parent;
    NodeId cur = v;
    for (NodeId u = w; o.parent(u) != kNoNode; u = o.parent(u)) {
      NodeId up = o.parent(u);
      std::vector<NodeId> kids{cur};
      for (NodeId s : o.children(up))
        if (s != u) kids.push_back(m.copy_from(o, s, pts));
      auto id = static_cast<NodeId>(m.nodes.size());
      m.nodes.push_back(TreeNode{kNoNode, kids, kNoPoint});
      for (NodeId k2 : kids) m.nodes[k2].parent = id;
      cur = id;
    }
    if (cur != v) {
      m.nodes[cur].parent = v_parent;
      if (v_parent == kNoNode) {
        m.root = cur;
      } else {
        auto& ch = m.nodes[v_parent].children;
        *std::find(ch.begin(), ch.end(), v) = cur;
      }
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (m.leaf[p] != kNoNode) continue;
    m.nodes.push_back(TreeNode{kNoNode, {}, static_cast<Point>(p)});
    auto l = static_cast<NodeId>(m.nodes.size() - 1);
    m.leaf[p] = l;
    auto id = static_cast<NodeId>(m.nodes.size());
    m.nodes.push_back(TreeNode{kNoNode, {m.root, l}, kNoPoint});
    m.nodes[m.root].parent = id;
    m.nodes[l].parent = id;
    m.root = id;
  }
  HierarchicalTree t(std::move(m.nodes), m.root, n);
  Arity a = t.is_binary() ? Arity::kBinary : Arity::kMultiway;
  return HierarchicalTree(std::vector<TreeNode>(t.nodes()), t.root(), n, a);
}

// Splits each k-tuple into its k-2 triplets around the first two points,
// searches orientations of that triplet multiset and maps a contradictory
// one back to k-tuple shapes.
inline std::optional<OrientedSet> tuple_threshold_check(const ConstraintSet& set,
                                                        std::uint64_t budget = kDefaultOrientationBudget) {
  if (set.k < 3) throw std::invalid_argument("k must be at least 3");
  ConstraintSet triplets;
  triplets.points = set.points;
  triplets.k = 3;
  for (const auto& t : set.tuples)
    for (const auto& tr : shared_pair_decomposition(t, t[0], t[1]))
      triplets.add({tr[0], tr[1], tr[2]});
  auto found = exists_contradictory_orientation(triplets, false, budget);
  if (!found) return std::nullopt;
  OrientedSet out;
  out.points = set.points;
  const std::size_t per = set.k - 2;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& t = set.tuples[i];
    std::span<const Constraint> mine(found->constraints.data() + i * per, per);
    if (set.k == 3) {
      out.constraints.push_back(mine[0]);
      continue;
    }
    HierarchicalTree shape = tuple_tree_from_pivot_orientation(t, t[0], t[1], mine);
    out.constraints.push_back(Constraint::ktuple(t, shape));
  }
  if (check_satisfiable(out).accepted()) throw std::logic_error("mapped tuple orientation is satisfiable");
  return out;
}

}  // namespace hct
