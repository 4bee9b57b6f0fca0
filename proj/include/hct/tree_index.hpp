#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hct/constraint.hpp"
#include "hct/tree_ops.hpp"

namespace hct {

class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t bits, bool fill = false)
      : bits_(bits), words_((bits + 63) / 64, fill ? ~std::uint64_t{0} : 0) {
    if (fill) trim();
  }

  std::size_t size() const noexcept { return bits_; }
  // Grows (new bits clear) or shrinks.
  void resize(std::size_t bits) {
    bits_ = bits;
    words_.resize((bits + 63) / 64, 0);
    trim();
  }
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }

  Bitset& operator&=(const Bitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  friend Bitset operator&(Bitset a, const Bitset& b) { return a &= b; }

  bool any() const {
    for (auto w : words_)
      if (w) return true;
    return false;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  // Popcount of (*this & o) without materializing it.
  std::size_t count_and(const Bitset& o) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) c += static_cast<std::size_t>(std::popcount(words_[i] & o.words_[i]));
    return c;
  }
  bool intersects(const Bitset& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & o.words_[i]) return true;
    return false;
  }
  // Index of the lowest set bit, or size() when empty.
  std::size_t first() const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i]) return i * 64 + static_cast<std::size_t>(std::countr_zero(words_[i]));
    return bits_;
  }
  friend bool operator==(const Bitset&, const Bitset&) = default;

 private:
  void trim() {
    if (bits_ % 64) words_.back() &= (std::uint64_t{1} << (bits_ % 64)) - 1;
  }
  std::size_t bits_ = 0;
  std::vector<std::uint64_t> words_;
};

// Every tree on n points (binary or multiway) indexed by which orientation
// it induces on each k-subset: satisfiability of any set of k-subset
// orientations is a bitset intersection.
class TreeIndex {
 public:
  TreeIndex(std::size_t n, std::size_t k, Arity arity, std::size_t cap = kDefaultEnumerationCap,
            bool keep_trees = false, bool keep_labels = true)
      : n_(n), k_(k), keep_labels_(keep_labels) {
    if (k < 3 || k > n) throw std::invalid_argument("tuple size must be in [3, n]");
    if (n > cap) throw BudgetExceeded("enumeration-cap", "tree index over " + std::to_string(n) + " points");
    // k-subsets in lexicographic order
    std::vector<Point> cur(k);
    for (std::size_t i = 0; i < k; ++i) cur[i] = static_cast<Point>(i);
    while (true) {
      tuple_id_.emplace(cur, tuples_.size());
      tuples_.push_back(cur);
      std::size_t i = k;
      while (i > 0 && cur[i - 1] == static_cast<Point>(n - k + i - 1)) --i;
      if (i == 0) break;
      ++cur[i - 1];
      for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
    // orientations of one tuple: every tree shape on k points, relabeled
    std::vector<Point> local(k);
    for (std::size_t i = 0; i < k; ++i) local[i] = static_cast<Point>(i);
    std::vector<HierarchicalTree> small;
    auto keep = [&](const HierarchicalTree& t) { small.push_back(t); };
    if (arity == Arity::kBinary) {
      for_each_binary_tree(k, keep, k);
    } else {
      for_each_multiway_tree(k, keep, k);
    }
    orientations_.resize(tuples_.size());
    for (std::size_t s = 0; s < tuples_.size(); ++s) {
      const auto& tp = tuples_[s];
      auto& os = orientations_[s];
      for (const auto& t : small) {
        if (k == 3) {
          Constraint c = triplet_relation(t, 0, 1, 2);
          if (c.is_split_pair()) {
            const auto& sp = c.as_split_pair();
            os.push_back(Constraint::split_pair(tp[sp.first], tp[sp.second], tp[sp.cut]));
          } else {
            os.push_back(Constraint::three_way(tp[0], tp[1], tp[2]));
          }
        } else {
          os.push_back(Constraint::ktuple(tp, restrict_tree(t, local)));
        }
      }
      std::sort(os.begin(), os.end());
      os.erase(std::unique(os.begin(), os.end()), os.end());
    }
    members_.resize(tuples_.size());
    std::vector<std::vector<std::uint32_t>> rows;
    std::size_t count = 0;
    auto visit = [&](const HierarchicalTree& t) {
      ++count;
      if (keep_trees) trees_.push_back(t);
      std::vector<std::uint32_t> row;
      if (keep_labels_) row.resize(tuples_.size());
      for (std::size_t s = 0; s < tuples_.size(); ++s) {
        const auto& os = orientations_[s];
        Constraint c = tuple_orientation(t, tuples_[s]);
        auto it = std::lower_bound(os.begin(), os.end(), c);
        auto o = static_cast<std::size_t>(it - os.begin());
        if (members_[s].empty()) members_[s].assign(os.size(), Bitset());
        auto& bits = members_[s][o];
        if (bits.size() < count) bits.resize(count);
        bits.set(count - 1);
        if (keep_labels_) row[s] = static_cast<std::uint32_t>(o);
      }
      if (keep_labels_) labels_.push_back(std::move(row));
    };
    if (arity == Arity::kBinary) {
      for_each_binary_tree(n, visit, cap);
    } else {
      for_each_multiway_tree(n, visit, cap);
    }
    num_trees_ = count;
    for (auto& per : members_)
      for (auto& bits : per) bits.resize(num_trees_);
  }

  std::size_t num_points() const noexcept { return n_; }
  std::size_t tuple_size() const noexcept { return k_; }
  std::size_t num_trees() const noexcept { return num_trees_; }
  std::size_t num_tuples() const noexcept { return tuples_.size(); }
  const std::vector<Point>& tuple(std::size_t s) const { return tuples_.at(s); }
  const std::vector<Constraint>& orientations(std::size_t s) const { return orientations_.at(s); }
  const Bitset& satisfying(std::size_t s, std::size_t o) const { return members_.at(s).at(o); }
  // Orientation index tree t induces on tuple s.
  std::size_t label(std::size_t t, std::size_t s) const {
    if (!keep_labels_) throw std::logic_error("tree index built without per-tree labels");
    return labels_[t][s];
  }
  bool has_labels() const noexcept { return keep_labels_; }
  const std::vector<HierarchicalTree>& trees() const noexcept { return trees_; }
  Bitset all() const { return Bitset(num_trees_, true); }

  std::optional<std::size_t> tuple_index(std::vector<Point> pts) const {
    std::sort(pts.begin(), pts.end());
    auto it = tuple_id_.find(pts);
    if (it == tuple_id_.end()) return std::nullopt;
    return it->second;
  }

  // (tuple, orientation) of a constraint, or nullopt when no tree realizes it.
  std::optional<std::pair<std::size_t, std::size_t>> locate(const Constraint& c) const {
    auto s = tuple_index(c.points());
    if (!s) return std::nullopt;
    const auto& os = orientations_[*s];
    auto it = std::find(os.begin(), os.end(), c);
    if (it == os.end()) return std::nullopt;
    return std::pair{*s, static_cast<std::size_t>(it - os.begin())};
  }

  // Trees satisfying every constraint (k-subset orientations only).
  Bitset consistent(std::span<const Constraint> cs) const {
    Bitset b = all();
    for (const auto& c : cs) {
      auto loc = locate(c);
      if (!loc) return Bitset(num_trees_);
      b &= satisfying(loc->first, loc->second);
    }
    return b;
  }

 private:
  std::size_t n_, k_;
  bool keep_labels_;
  std::size_t num_trees_ = 0;
  std::vector<std::vector<Point>> tuples_;
  std::map<std::vector<Point>, std::size_t> tuple_id_;
  std::vector<std::vector<Constraint>> orientations_;
  std::vector<std::vector<Bitset>> members_;
  std::vector<std::vector<std::uint32_t>> labels_;
  std::vector<HierarchicalTree> trees_;
};

}  // namespace hct
