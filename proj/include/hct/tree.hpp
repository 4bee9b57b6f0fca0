#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hct/types.hpp"

namespace hct {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

enum class Arity { kBinary, kMultiway };

struct TreeNode {
  NodeId parent = kNoNode;
  std::vector<NodeId> children;
  Point point = kNoPoint;  // set for leaves only
};

// Rooted tree whose leaves are labeled by the points 0..num_points-1.
// Immutable once built; construct through TreeBuilder. The constructor does
// not check invariants so malformed trees can be represented and reported by
// validate_tree().
class HierarchicalTree {
 public:
  HierarchicalTree() = default;
  HierarchicalTree(std::vector<TreeNode> nodes, NodeId root, std::size_t num_points,
                   Arity arity = Arity::kMultiway)
      : nodes_(std::move(nodes)), root_(root), num_points_(num_points), arity_(arity) {
    leaf_of_.assign(num_points_, kNoNode);
    depth_.assign(nodes_.size(), -1);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      Point p = nodes_[i].point;
      if (nodes_[i].children.empty() && p >= 0 && static_cast<std::size_t>(p) < num_points_ &&
          leaf_of_[p] == kNoNode) {
        leaf_of_[p] = static_cast<NodeId>(i);
      }
    }
    if (root_ < 0 || static_cast<std::size_t>(root_) >= nodes_.size()) return;
    std::vector<NodeId> stack{root_};
    depth_[root_] = 0;
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      for (NodeId c : nodes_[v].children) {
        if (c < 0 || static_cast<std::size_t>(c) >= nodes_.size() || depth_[c] != -1) continue;
        depth_[c] = depth_[v] + 1;
        stack.push_back(c);
      }
    }
  }

  std::size_t num_points() const noexcept { return num_points_; }
  std::size_t num_nodes() const noexcept { return nodes_.size(); }
  NodeId root() const noexcept { return root_; }
  Arity arity() const noexcept { return arity_; }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  const TreeNode& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  NodeId parent(NodeId id) const { return node(id).parent; }
  const std::vector<NodeId>& children(NodeId id) const { return node(id).children; }
  bool is_leaf(NodeId id) const { return node(id).children.empty(); }
  int depth(NodeId id) const { return depth_.at(static_cast<std::size_t>(id)); }

  NodeId leaf_of(Point p) const {
    if (p < 0 || static_cast<std::size_t>(p) >= num_points_) {
      throw std::out_of_range("point " + std::to_string(p) + " is not in the tree");
    }
    NodeId id = leaf_of_[p];
    if (id == kNoNode) throw std::out_of_range("point " + std::to_string(p) + " has no leaf");
    return id;
  }

  bool is_binary() const {
    for (const auto& n : nodes_)
      if (!n.children.empty() && n.children.size() != 2) return false;
    return true;
  }

  // Points under `id`, in DFS order.
  std::vector<Point> leaves_under(NodeId id) const {
    std::vector<Point> out;
    std::vector<NodeId> stack{id};
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      const auto& n = node(v);
      if (n.children.empty()) {
        out.push_back(n.point);
      } else {
        for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
      }
    }
    return out;
  }

  // Smallest point index under each node; used for canonical child ordering.
  std::vector<Point> min_leaf() const {
    std::vector<Point> out(nodes_.size(), kNoPoint);
    for (NodeId v : postorder()) {
      const auto& n = nodes_[v];
      if (n.children.empty()) {
        out[v] = n.point;
      } else {
        Point m = out[n.children.front()];
        for (NodeId c : n.children) m = std::min(m, out[c]);
        out[v] = m;
      }
    }
    return out;
  }

  std::vector<NodeId> postorder() const {
    std::vector<NodeId> order;
    if (root_ == kNoNode) return order;
    std::vector<std::pair<NodeId, std::size_t>> stack{{root_, 0}};
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      const auto& ch = nodes_[v].children;
      if (i < ch.size()) {
        NodeId c = ch[i++];
        stack.emplace_back(c, 0);
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
    return order;
  }

 private:
  std::vector<TreeNode> nodes_;
  NodeId root_ = kNoNode;
  std::size_t num_points_ = 0;
  Arity arity_ = Arity::kMultiway;
  std::vector<NodeId> leaf_of_;
  std::vector<int> depth_;
};

class TreeBuilder {
 public:
  explicit TreeBuilder(std::size_t num_points) : num_points_(num_points) {}

  NodeId add_leaf(Point p) {
    nodes_.push_back(TreeNode{kNoNode, {}, p});
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  NodeId add_internal(std::span<const NodeId> children) {
    NodeId id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(TreeNode{kNoNode, {children.begin(), children.end()}, kNoPoint});
    for (NodeId c : children) nodes_.at(static_cast<std::size_t>(c)).parent = id;
    return id;
  }
  NodeId add_internal(std::initializer_list<NodeId> children) {
    return add_internal(std::span<const NodeId>(children.begin(), children.size()));
  }

  std::size_t size() const noexcept { return nodes_.size(); }

  HierarchicalTree build(NodeId root, Arity arity = Arity::kMultiway) && {
    return HierarchicalTree(std::move(nodes_), root, num_points_, arity);
  }

 private:
  std::size_t num_points_;
  std::vector<TreeNode> nodes_;
};

struct TreeViolation {
  std::string invariant;  // "single-root", "unary-node", "leaf-bijection", "binary-arity"
  std::string detail;
};

// Reports the first violated invariant, or nullopt when the tree is valid.
inline std::optional<TreeViolation> validate_tree(const HierarchicalTree& t) {
  const auto& nodes = t.nodes();
  const auto n = static_cast<NodeId>(nodes.size());
  if (t.root() < 0 || t.root() >= n) return TreeViolation{"single-root", "root id out of range"};
  if (nodes[t.root()].parent != kNoNode) return TreeViolation{"single-root", "root has a parent"};

  std::vector<int> seen(nodes.size(), 0);
  std::vector<NodeId> stack{t.root()};
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    if (seen[v]++) return TreeViolation{"single-root", "node " + std::to_string(v) + " reached twice"};
    for (NodeId c : nodes[v].children) {
      if (c < 0 || c >= n) return TreeViolation{"single-root", "child id out of range"};
      if (nodes[c].parent != v) return TreeViolation{"single-root", "parent link mismatch"};
      stack.push_back(c);
    }
  }
  for (NodeId v = 0; v < n; ++v)
    if (!seen[v]) return TreeViolation{"single-root", "node " + std::to_string(v) + " unreachable"};

  for (NodeId v = 0; v < n; ++v) {
    if (nodes[v].children.size() == 1)
      return TreeViolation{"unary-node", "node " + std::to_string(v) + " has one child"};
  }

  std::vector<int> count(t.num_points(), 0);
  for (NodeId v = 0; v < n; ++v) {
    const auto& nd = nodes[v];
    if (nd.children.empty()) {
      if (nd.point < 0 || static_cast<std::size_t>(nd.point) >= t.num_points())
        return TreeViolation{"leaf-bijection", "leaf without a valid point"};
      if (count[nd.point]++)
        return TreeViolation{"leaf-bijection", "point " + std::to_string(nd.point) + " on two leaves"};
    } else if (nd.point != kNoPoint) {
      return TreeViolation{"leaf-bijection", "internal node carries a point"};
    }
  }
  for (std::size_t p = 0; p < count.size(); ++p)
    if (!count[p]) return TreeViolation{"leaf-bijection", "point " + std::to_string(p) + " missing"};

  if (t.arity() == Arity::kBinary) {
    for (NodeId v = 0; v < n; ++v)
      if (!nodes[v].children.empty() && nodes[v].children.size() != 2)
        return TreeViolation{"binary-arity", "node " + std::to_string(v) + " is not binary"};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Newick

namespace detail {

class NewickReader {
 public:
  NewickReader(std::string_view text, PointSet& points, bool add_points)
      : text_(text), points_(points), add_points_(add_points) {}

  // Returns builder + root; leaves record point indices in `points`.
  std::pair<std::vector<TreeNode>, NodeId> read() {
    skip_ws();
    NodeId root = parse_node();
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != ';') fail("expected ';'");
    ++pos_;
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters after ';'");
    return {std::move(nodes_), root};
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(0, "newick: " + msg + " at offset " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string read_name() {
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char ch = text_[pos_];
      if (ch == ',' || ch == '(' || ch == ')' || ch == ';' || ch == '|' ||
          std::isspace(static_cast<unsigned char>(ch)))
        break;
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  NodeId parse_node() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (text_[pos_] == '(') {
      ++pos_;
      std::vector<NodeId> kids;
      while (true) {
        kids.push_back(parse_node());
        skip_ws();
        if (pos_ >= text_.size()) fail("unterminated '('");
        if (text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        fail("expected ',' or ')'");
      }
      skip_ws();
      if (!read_name().empty()) fail("internal nodes must be unnamed");
      NodeId id = static_cast<NodeId>(nodes_.size());
      nodes_.push_back(TreeNode{kNoNode, kids, kNoPoint});
      for (NodeId c : kids) nodes_[c].parent = id;
      return id;
    }
    std::string name = read_name();
    if (name.empty()) fail("expected a leaf name");
    if (!is_valid_point_name(name)) fail("invalid leaf name '" + name + "'");
    Point p = points_.find(name);
    if (p == kNoPoint) {
      if (!add_points_) fail("unknown point '" + name + "'");
      p = points_.add(name);
    }
    nodes_.push_back(TreeNode{kNoNode, {}, p});
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  PointSet& points_;
  bool add_points_;
  std::vector<TreeNode> nodes_;
};

}  // namespace detail

// Parses without checking invariants (duplicate leaves, unary nodes survive).
inline HierarchicalTree parse_newick_unchecked(std::string_view text, PointSet& points,
                                               bool add_points = true) {
  detail::NewickReader reader(text, points, add_points);
  auto [nodes, root] = reader.read();
  return HierarchicalTree(std::move(nodes), root, points.size());
}

// Parses a tree whose leaves must be exactly the points of `points` after
// interning. Throws ParseError on grammar or invariant violations.
inline HierarchicalTree parse_newick(std::string_view text, PointSet& points,
                                     bool add_points = true) {
  HierarchicalTree t = parse_newick_unchecked(text, points, add_points);
  if (auto v = validate_tree(t)) throw ParseError(0, "newick: " + v->invariant + ": " + v->detail);
  Arity a = t.is_binary() ? Arity::kBinary : Arity::kMultiway;
  return HierarchicalTree(std::vector<TreeNode>(t.nodes()), t.root(), t.num_points(), a);
}

// Writes children ordered by their lexicographically smallest leaf name, so
// equal trees print identically.
inline std::string write_newick(const HierarchicalTree& t, const PointSet& points) {
  const auto& nodes = t.nodes();
  std::vector<std::string> min_name(nodes.size());
  for (NodeId v : t.postorder()) {
    const auto& n = nodes[v];
    if (n.children.empty()) {
      min_name[v] = points.name(n.point);
    } else {
      min_name[v] = min_name[n.children.front()];
      for (NodeId c : n.children) min_name[v] = std::min(min_name[v], min_name[c]);
    }
  }
  std::string out;
  // iterative to survive ladders on 10^4 points
  struct Frame {
    NodeId v;
    std::vector<NodeId> kids;
    std::size_t next;
  };
  std::vector<Frame> stack;
  auto push = [&](NodeId v) {
    const auto& n = nodes[v];
    if (n.children.empty()) {
      out += points.name(n.point);
      return false;
    }
    std::vector<NodeId> kids = n.children;
    std::sort(kids.begin(), kids.end(),
              [&](NodeId a, NodeId b) { return min_name[a] < min_name[b]; });
    out += '(';
    stack.push_back(Frame{v, std::move(kids), 0});
    return true;
  };
  push(t.root());
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next == f.kids.size()) {
      out += ')';
      stack.pop_back();
      continue;
    }
    if (f.next > 0) out += ',';
    NodeId c = f.kids[f.next++];
    push(c);
  }
  out += ';';
  return out;
}

}  // namespace hct
