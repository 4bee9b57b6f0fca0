#pragma once

#include <algorithm>
#include <compare>
#include <string>
#include <variant>
#include <vector>

#include "hct/tree.hpp"
#include "hct/types.hpp"

namespace hct {

// [first, second | cut]: `cut` separates from the pair first. first < second.
struct SplitPair {
  Point first = kNoPoint;
  Point second = kNoPoint;
  Point cut = kNoPoint;
  friend auto operator<=>(const SplitPair&, const SplitPair&) = default;
};

// [a | b | c]: all three separate at one node. Sorted.
struct ThreeWay {
  std::array<Point, 3> points{};
  friend auto operator<=>(const ThreeWay&, const ThreeWay&) = default;
};

// Shape on k >= 3 points. `points` is sorted; leaf i of `shape` stands for
// points[i]. `key` is the canonical shape string used for equality.
struct KTuple {
  std::vector<Point> points;
  HierarchicalTree shape;
  std::string key;
  friend bool operator==(const KTuple& a, const KTuple& b) {
    return a.points == b.points && a.key == b.key;
  }
  friend std::strong_ordering operator<=>(const KTuple& a, const KTuple& b) {
    if (auto c = a.points <=> b.points; c != 0) return c;
    return a.key <=> b.key;
  }
};

enum class ConstraintKind { kSplitPair, kThreeWay, kKTuple };

namespace detail {

// "((0,1),2)" over local leaf indices with children ordered by min leaf.
inline std::string shape_key(const HierarchicalTree& t) {
  auto mins = t.min_leaf();
  std::vector<std::string> s(t.num_nodes());
  for (NodeId v : t.postorder()) {
    const auto& n = t.node(v);
    if (n.children.empty()) {
      s[v] = std::to_string(n.point);
      continue;
    }
    std::vector<NodeId> kids = n.children;
    std::sort(kids.begin(), kids.end(), [&](NodeId a, NodeId b) { return mins[a] < mins[b]; });
    std::string out = "(";
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i) out += ',';
      out += s[kids[i]];
    }
    out += ')';
    s[v] = std::move(out);
  }
  return s[t.root()];
}

}  // namespace detail

class Constraint {
 public:
  static Constraint split_pair(Point a, Point b, Point cut) {
    if (a == b || a == cut || b == cut) throw std::invalid_argument("split pair points must be distinct");
    if (a > b) std::swap(a, b);
    return Constraint(SplitPair{a, b, cut});
  }

  static Constraint three_way(Point a, Point b, Point c) {
    if (a == b || a == c || b == c) throw std::invalid_argument("three-way points must be distinct");
    ThreeWay t{{a, b, c}};
    std::sort(t.points.begin(), t.points.end());
    return Constraint(t);
  }

  // `shape` leaves are local indices into `points` (any order). Points are
  // re-sorted and the shape relabeled to match.
  static Constraint ktuple(std::vector<Point> points, const HierarchicalTree& shape) {
    if (points.size() < 3) throw std::invalid_argument("k-tuple needs at least 3 points");
    if (shape.num_points() != points.size())
      throw std::invalid_argument("k-tuple shape leaf set must equal the point list");
    if (auto v = validate_tree(shape)) throw std::invalid_argument("k-tuple shape: " + v->invariant);
    std::vector<std::size_t> order(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return points[x] < points[y]; });
    std::vector<Point> local(points.size());  // old local -> new local
    std::vector<Point> sorted(points.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
      local[order[r]] = static_cast<Point>(r);
      sorted[r] = points[order[r]];
    }
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i] == sorted[i - 1]) throw std::invalid_argument("duplicate point in k-tuple");
    std::vector<TreeNode> nodes = shape.nodes();
    for (auto& n : nodes)
      if (n.children.empty()) n.point = local[n.point];
    Arity a = shape.is_binary() ? Arity::kBinary : Arity::kMultiway;
    HierarchicalTree relabeled(std::move(nodes), shape.root(), sorted.size(), a);
    std::string key = detail::shape_key(relabeled);
    return Constraint(KTuple{std::move(sorted), std::move(relabeled), std::move(key)});
  }

  ConstraintKind kind() const noexcept { return static_cast<ConstraintKind>(value_.index()); }
  bool is_split_pair() const noexcept { return kind() == ConstraintKind::kSplitPair; }
  bool is_three_way() const noexcept { return kind() == ConstraintKind::kThreeWay; }
  bool is_ktuple() const noexcept { return kind() == ConstraintKind::kKTuple; }

  const SplitPair& as_split_pair() const { return std::get<SplitPair>(value_); }
  const ThreeWay& as_three_way() const { return std::get<ThreeWay>(value_); }
  const KTuple& as_ktuple() const { return std::get<KTuple>(value_); }

  // Sorted point indices the constraint talks about.
  std::vector<Point> points() const {
    switch (kind()) {
      case ConstraintKind::kSplitPair: {
        const auto& s = as_split_pair();
        std::vector<Point> p{s.first, s.second, s.cut};
        std::sort(p.begin(), p.end());
        return p;
      }
      case ConstraintKind::kThreeWay: {
        const auto& t = as_three_way();
        return {t.points.begin(), t.points.end()};
      }
      case ConstraintKind::kKTuple:
        return as_ktuple().points;
    }
    return {};
  }

  std::size_t arity() const { return is_ktuple() ? as_ktuple().points.size() : 3; }

  friend bool operator==(const Constraint& a, const Constraint& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const Constraint& a, const Constraint& b) {
    if (a.value_.index() != b.value_.index()) return a.value_.index() <=> b.value_.index();
    return std::visit(
        [&](const auto& x) -> std::strong_ordering {
          using T = std::decay_t<decltype(x)>;
          return x <=> std::get<T>(b.value_);
        },
        a.value_);
  }

 private:
  using Value = std::variant<SplitPair, ThreeWay, KTuple>;
  explicit Constraint(Value v) : value_(std::move(v)) {}
  Value value_;
};

// Unlabeled tuples, all of the same size k.
struct ConstraintSet {
  PointSet points;
  std::size_t k = 3;
  std::vector<std::vector<Point>> tuples;  // each sorted

  void add(std::vector<Point> tuple) {
    std::sort(tuple.begin(), tuple.end());
    if (std::adjacent_find(tuple.begin(), tuple.end()) != tuple.end())
      throw std::invalid_argument("duplicate point within a tuple");
    if (tuples.empty() && k != tuple.size()) k = tuple.size();
    if (tuple.size() != k) throw std::invalid_argument("mixed tuple sizes in one set");
    for (Point p : tuple)
      if (!points.contains(p)) throw std::out_of_range("tuple index out of range");
    tuples.push_back(std::move(tuple));
  }
  std::size_t size() const noexcept { return tuples.size(); }
};

// Fully labeled sample.
struct OrientedSet {
  PointSet points;
  std::vector<Constraint> constraints;

  void add(Constraint c) {
    for (Point p : c.points())
      if (!points.contains(p)) throw std::out_of_range("constraint index out of range");
    constraints.push_back(std::move(c));
  }
  std::size_t size() const noexcept { return constraints.size(); }
  bool has_three_way() const {
    return std::any_of(constraints.begin(), constraints.end(),
                       [](const Constraint& c) { return c.is_three_way(); });
  }
  bool has_ktuple() const {
    return std::any_of(constraints.begin(), constraints.end(),
                       [](const Constraint& c) { return c.is_ktuple(); });
  }
};

}  // namespace hct
