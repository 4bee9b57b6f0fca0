#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "hct/builder.hpp"
#include "hct/constraint_io.hpp"
#include "hct/dimension.hpp"
#include "hct/parallel.hpp"
#include "hct/tree_index.hpp"
#include "hct/tree_ops.hpp"

namespace hct {

// Ordered point list; rank i (0-based) is order[i]. As a tree it is the
// caterpillar in which order[0] splits off first.
struct Ladder {
  std::vector<Point> order;
  friend bool operator==(const Ladder&, const Ladder&) = default;
};

// Constraint a ladder imposes on its points (k >= 3).
inline Constraint ladder_constraint(const Ladder& l) {
  if (l.order.size() < 3) throw std::invalid_argument("ladder constraints need at least 3 points");
  std::vector<Point> local(l.order.size());
  for (std::size_t i = 0; i < local.size(); ++i) local[i] = static_cast<Point>(i);
  return orientation_from_shape(l.order, ladder(local));
}

using Partition = std::vector<std::vector<Point>>;

// Complete binary tree in heap layout: node i has children 2i+1 (left, the
// lexicographic ladder) and 2i+2 (right, the reversed ladder). Partitions
// are kept at every block boundary, leaves included.
class LittlestoneTree {
 public:
  struct Node {
    std::vector<Point> tuple;  // sorted
    Ladder left, right;
  };

  LittlestoneTree() = default;
  LittlestoneTree(std::size_t num_points, std::size_t k, std::size_t depth)
      : num_points_(num_points), k_(k), depth_(depth), nodes_((std::size_t{1} << depth) - 1) {}

  std::size_t num_points() const noexcept { return num_points_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t depth() const noexcept { return depth_; }
  std::size_t num_internal() const noexcept { return nodes_.size(); }
  std::size_t num_leaves() const noexcept { return std::size_t{1} << depth_; }
  // Heap index of the leaf reached by `path` (bit d set = right at depth d).
  std::size_t leaf_index(std::uint64_t path) const {
    std::size_t v = 0;
    for (std::size_t d = 0; d < depth_; ++d) v = 2 * v + 1 + ((path >> d) & 1U);
    return v;
  }
  Node& node(std::size_t v) { return nodes_.at(v); }
  const Node& node(std::size_t v) const { return nodes_.at(v); }
  const Ladder& edge_label(std::size_t v, bool right) const { return right ? node(v).right : node(v).left; }
  Ladder& edge_label(std::size_t v, bool right) { return right ? node(v).right : node(v).left; }

  std::map<std::size_t, Partition>& partitions() noexcept { return partitions_; }
  const std::map<std::size_t, Partition>& partitions() const noexcept { return partitions_; }

 private:
  std::size_t num_points_ = 0, k_ = 2, depth_ = 0;
  std::vector<Node> nodes_;
  std::map<std::size_t, Partition> partitions_;
};

inline constexpr std::size_t kLittlestoneDepthCap = 22;

inline std::size_t largest_power_at_most(std::size_t n, std::size_t k) {
  std::size_t p = 1;
  while (p <= n / k) p *= k;
  return p;
}

inline std::size_t integer_log(std::size_t x, std::size_t k) {
  std::size_t l = 0;
  while (x > 1) {
    x /= k;
    ++l;
  }
  return l;
}

// Builds the shattered tree over the first n' points (n' the largest power
// of k not above n): each block of n'/k layers plays one round of tuples,
// points are then regrouped by (old set, rank) and the next block recurses.
inline LittlestoneTree build_littlestone_tree(std::size_t n, std::size_t k, std::size_t depth_cap = kLittlestoneDepthCap,
                                              bool check_set_sizes = true) {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  const std::size_t np = largest_power_at_most(n, k);
  if (np < k) throw std::invalid_argument("need at least k points");
  const std::size_t block = np / k;
  const std::size_t depth = block * integer_log(np, k);
  if (depth > depth_cap)
    throw BudgetExceeded("littlestone-depth", "depth " + std::to_string(depth) + " is above the cap " + std::to_string(depth_cap));
  LittlestoneTree L(n, k, depth);

  std::function<void(std::size_t, const Partition&)> rec = [&](std::size_t v, const Partition& X) {
    L.partitions()[v] = X;
    if (check_set_sizes) {
      const std::size_t want = np / X.size();
      for (const auto& s : X)
        if (s.size() != want) throw std::logic_error("partition set size differs from n'/l");
    }
    if (X.front().size() == 1) return;
    std::vector<std::vector<Point>> tuples;  // tournament: sorted chunks
    std::vector<std::size_t> ind(n, 0), layer(n, 0);
    for (std::size_t i = 0; i < X.size(); ++i) {
      std::vector<Point> s = X[i];
      std::sort(s.begin(), s.end());
      for (std::size_t c = 0; c < s.size(); c += k) {
        for (std::size_t j = c; j < c + k; ++j) {
          ind[s[j]] = i;
          layer[s[j]] = tuples.size();
        }
        tuples.emplace_back(s.begin() + static_cast<std::ptrdiff_t>(c), s.begin() + static_cast<std::ptrdiff_t>(c + k));
      }
    }
    // label the block
    std::vector<std::size_t> level{v};
    for (std::size_t tau = 0; tau < block; ++tau) {
      std::vector<std::size_t> next;
      for (std::size_t u : level) {
        auto& nd = L.node(u);
        nd.tuple = tuples[tau];
        nd.left.order = tuples[tau];
        nd.right.order.assign(tuples[tau].rbegin(), tuples[tau].rend());
        next.push_back(2 * u + 1);
        next.push_back(2 * u + 2);
      }
      level = std::move(next);
    }
    // regroup below every block leaf; path bits follow the heap layout
    for (std::size_t li = 0; li < level.size(); ++li) {
      std::size_t u = level[li];
      std::vector<char> right(block);
      std::size_t w = u;
      for (std::size_t tau = block; tau-- > 0;) {
        right[tau] = (w % 2 == 0);
        w = (w - 1) / 2;
      }
      Partition Y(X.size() * k);
      for (std::size_t i = 0; i < X.size(); ++i) {
        for (Point x : X[i]) {
          std::size_t tau = layer[x];
          const auto& t = tuples[tau];
          std::size_t pos = static_cast<std::size_t>(std::find(t.begin(), t.end(), x) - t.begin());
          std::size_t rank = right[tau] ? k - 1 - pos : pos;  // 0-based
          Y[ind[x] * k + rank].push_back(x);
        }
      }
      rec(u, Y);
    }
  };
  Partition root(1);
  for (std::size_t i = 0; i < np; ++i) root[0].push_back(static_cast<Point>(i));
  rec(0, root);
  return L;
}

// Order of the singleton partition at a leaf.
inline std::vector<Point> leaf_order(const LittlestoneTree& L, std::size_t leaf) {
  auto it = L.partitions().find(leaf);
  if (it == L.partitions().end()) throw std::invalid_argument("leaf has no recorded partition");
  std::vector<Point> order;
  for (const auto& s : it->second) {
    if (s.size() != 1) throw std::invalid_argument("leaf partition is not made of singletons");
    order.push_back(s[0]);
  }
  return order;
}

inline constexpr std::size_t kPathBudget = std::size_t{1} << 22;

// Every root-to-leaf labeling is realized: by the ladder over the leaf's
// partition order when partitions are recorded, by the builder otherwise.
// Ladders on two points are checked as rank orders.
inline bool verify_shattered(const LittlestoneTree& L, std::size_t jobs = 1) {
  if (L.num_leaves() > kPathBudget) throw BudgetExceeded("path-budget", "too many root-to-leaf paths");
  if (L.k() < 3 && L.partitions().empty()) throw std::invalid_argument("two-point ladders need recorded partitions");
  auto check = [&](std::uint64_t path) {
    std::size_t leaf = L.leaf_index(path);
    std::vector<std::pair<std::size_t, bool>> edges;
    std::size_t v = 0;
    for (std::size_t d = 0; d < L.depth(); ++d) {
      bool right = (path >> d) & 1U;
      edges.emplace_back(v, right);
      v = 2 * v + 1 + right;
    }
    if (L.partitions().count(leaf)) {
      std::vector<Point> order = leaf_order(L, leaf);
      std::vector<std::size_t> pos(L.num_points(), 0);
      for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
      std::optional<HierarchicalTree> witness;
      if (L.k() >= 3) witness = ladder(order);
      for (auto [u, right] : edges) {
        const Ladder& lab = L.edge_label(u, right);
        if (L.k() >= 3) {
          if (!satisfies(*witness, ladder_constraint(lab))) return false;
        } else {
          for (std::size_t i = 0; i + 1 < lab.order.size(); ++i)
            if (pos[lab.order[i]] > pos[lab.order[i + 1]]) return false;
        }
      }
    } else {
      OrientedSet o;
      o.points = PointSet::numbered(L.num_points());
      for (auto [u, right] : edges) o.add(ladder_constraint(L.edge_label(u, right)));
      if (!check_satisfiable(o).accepted()) return false;
    }
    return true;
  };
  std::atomic<bool> ok{true};
  constexpr std::size_t kChunk = 256;
  const std::size_t paths = L.num_leaves();
  parallel_for((paths + kChunk - 1) / kChunk, jobs, [&](std::size_t c) {
    for (std::size_t p = c * kChunk; p < std::min(paths, (c + 1) * kChunk) && ok.load(std::memory_order_relaxed); ++p)
      if (!check(p)) ok = false;
  });
  return ok.load();
}


// Every ladder on an edge keeps its rank order in the set indices of every
// recorded partition below it, and every recorded partition of l sets has
// sets of size n'/l.
inline bool rank_order_check(const LittlestoneTree& L) {
  std::size_t np = 0;
  if (auto it = L.partitions().find(0); it != L.partitions().end())
    for (const auto& s : it->second) np += s.size();
  for (const auto& [v, X] : L.partitions()) {
    std::size_t total = 0;
    for (const auto& s : X) total += s.size();
    if (total != np) return false;
    for (const auto& s : X)
      if (s.size() * X.size() != np) return false;
    std::vector<std::size_t> ind(L.num_points(), 0);
    for (std::size_t i = 0; i < X.size(); ++i)
      for (Point x : X[i]) ind[x] = i;
    // every edge above v
    std::size_t w = v;
    while (w != 0) {
      std::size_t parent = (w - 1) / 2;
      bool right = (w % 2 == 0);
      const Ladder& lab = L.edge_label(parent, right);
      for (std::size_t i = 0; i + 1 < lab.order.size(); ++i)
        if (ind[lab.order[i]] >= ind[lab.order[i + 1]]) return false;
      w = parent;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Online learners

class OnlineLearner {
 public:
  virtual ~OnlineLearner() = default;
  virtual std::string name() const = 0;
  virtual Constraint predict(const std::vector<Point>& tuple) = 0;
  virtual void update(const std::vector<Point>& tuple, const Constraint& truth) = 0;
};

// Always answers the first orientation in canonical order.
class ConstantLearner final : public OnlineLearner {
 public:
  std::string name() const override { return "constant"; }
  Constraint predict(const std::vector<Point>& tuple) override { return tuple_orientations(tuple, false).front(); }
  void update(const std::vector<Point>&, const Constraint&) override {}
};

// Version space over every binary tree on n points; predicts the plurality
// orientation (lowest canonical index on ties).
class HalvingLearner final : public OnlineLearner {
 public:
  explicit HalvingLearner(std::shared_ptr<const TreeIndex> index)
      : index_(std::move(index)), version_(index_->all()) {}
  HalvingLearner(std::size_t n, std::size_t k, std::size_t cap = kDefaultEnumerationCap)
      : HalvingLearner(std::make_shared<const TreeIndex>(n, k, Arity::kBinary, cap)) {}

  std::string name() const override { return "halving"; }

  Constraint predict(const std::vector<Point>& tuple) override {
    std::size_t s = tuple_id(tuple);
    return index_->orientations(s)[vote(s)];
  }

  void update(const std::vector<Point>& tuple, const Constraint& truth) override {
    auto loc = index_->locate(truth);
    if (!loc || loc->first != tuple_id(tuple)) throw std::invalid_argument("label does not orient the tuple");
    version_ &= index_->satisfying(loc->first, loc->second);
    if (!version_.any()) throw std::runtime_error("version space is empty: labels are not realizable");
  }

  std::size_t vote(std::size_t s) const {
    std::size_t best = 0, best_count = 0;
    for (std::size_t o = 0; o < index_->orientations(s).size(); ++o) {
      std::size_t c = version_.count_and(index_->satisfying(s, o));
      if (c > best_count) {
        best = o;
        best_count = c;
      }
    }
    return best;
  }

  const Bitset& version_space() const noexcept { return version_; }
  void set_version_space(Bitset b) { version_ = std::move(b); }
  const TreeIndex& index() const noexcept { return *index_; }

 private:
  std::size_t tuple_id(const std::vector<Point>& tuple) const {
    auto s = index_->tuple_index(tuple);
    if (!s) throw std::invalid_argument("tuple is not a k-subset of the learner's points");
    return *s;
  }
  std::shared_ptr<const TreeIndex> index_;
  Bitset version_;
};

// Predicts from the tree the builder makes from everything seen so far.
class TreeConsistentLearner final : public OnlineLearner {
 public:
  explicit TreeConsistentLearner(std::size_t n) : n_(n) { seen_.points = PointSet::numbered(n); }
  std::string name() const override { return "tree-consistent"; }

  Constraint predict(const std::vector<Point>& tuple) override {
    if (!tree_) {
      BuildOutcome b = check_satisfiable(seen_);
      if (!b.accepted()) throw std::runtime_error("seen labels are not realizable");
      tree_ = b.tree();
    }
    std::vector<Point> sorted = tuple;
    std::sort(sorted.begin(), sorted.end());
    return tuple_orientation(*tree_, sorted);
  }

  void update(const std::vector<Point>&, const Constraint& truth) override {
    seen_.add(truth);
    tree_.reset();
  }

 private:
  std::size_t n_;
  OrientedSet seen_;
  std::optional<HierarchicalTree> tree_;
};

// Multiplicative weights over every tree in the index; used for regret
// measurements on noisy streams.
class WeightedMajorityLearner final : public OnlineLearner {
 public:
  WeightedMajorityLearner(std::shared_ptr<const TreeIndex> index, double beta)
      : index_(std::move(index)), beta_(beta), weight_(index_->num_trees(), 1.0) {}
  std::string name() const override { return "weighted-majority"; }

  Constraint predict(const std::vector<Point>& tuple) override {
    std::size_t s = *index_->tuple_index(tuple);
    std::vector<double> mass(index_->orientations(s).size(), 0.0);
    for (std::size_t t = 0; t < weight_.size(); ++t) mass[index_->label(t, s)] += weight_[t];
    return index_->orientations(s)[static_cast<std::size_t>(std::max_element(mass.begin(), mass.end()) - mass.begin())];
  }

  void update(const std::vector<Point>& tuple, const Constraint& truth) override {
    std::size_t s = *index_->tuple_index(tuple);
    auto loc = index_->locate(truth);
    double total = 0;
    for (std::size_t t = 0; t < weight_.size(); ++t) {
      if (!loc || index_->label(t, s) != loc->second) weight_[t] *= beta_;
      total += weight_[t];
    }
    for (auto& w : weight_) w /= total;
  }

 private:
  std::shared_ptr<const TreeIndex> index_;
  double beta_;
  std::vector<double> weight_;
};

struct GameRound {
  std::vector<Point> tuple;
  Constraint prediction;
  Constraint label;
  bool mistake;
};

struct GameResult {
  std::size_t mistakes = 0;
  std::vector<GameRound> rounds;
};

// Walks the tree, always revealing an edge label that differs from the
// prediction (the left one when both do).
inline GameResult adversary_game(const LittlestoneTree& L, OnlineLearner& learner) {
  if (L.k() < 3) throw std::invalid_argument("the game needs tuples of at least 3 points");
  GameResult out;
  std::size_t v = 0;
  for (std::size_t d = 0; d < L.depth(); ++d) {
    const auto& nd = L.node(v);
    Constraint pred = learner.predict(nd.tuple);
    Constraint left = ladder_constraint(nd.left);
    Constraint right = ladder_constraint(nd.right);
    bool go_right = !(left != pred);
    const Constraint& label = go_right ? right : left;
    bool mistake = label != pred;
    out.mistakes += mistake;
    out.rounds.push_back({nd.tuple, pred, label, mistake});
    learner.update(nd.tuple, label);
    v = 2 * v + 1 + go_right;
  }
  return out;
}

inline std::string game_transcript_csv(const GameResult& g, const PointSet& points) {
  std::string out = "round,tuple,prediction,label,mistake\n";
  for (std::size_t i = 0; i < g.rounds.size(); ++i) {
    const auto& r = g.rounds[i];
    out += std::to_string(i + 1) + "," + format_tuple(r.tuple, points) + "," + format_constraint(r.prediction, points) +
           "," + format_constraint(r.label, points) + "," + (r.mistake ? "1" : "0") + "\n";
  }
  return out;
}

// Most mistakes any realizable adversary can force on the halving learner,
// by exhaustive play from its current version space. Only moves that shrink
// the version space are explored (others cannot cause a mistake).
inline std::size_t halving_worst_case(const HalvingLearner& learner) {
  const TreeIndex& index = learner.index();
  struct Hash {
    std::size_t operator()(const Bitset& b) const {
      std::size_t h = b.count();
      for (std::size_t i = b.first(); i < b.size(); i = next(b, i)) h = h * 1000003u ^ i;
      return h;
    }
    static std::size_t next(const Bitset& b, std::size_t i) {
      for (++i; i < b.size(); ++i)
        if (b.test(i)) return i;
      return b.size();
    }
  };
  std::unordered_map<Bitset, std::size_t, Hash> memo;
  std::function<std::size_t(const Bitset&)> solve = [&](const Bitset& vs) -> std::size_t {
    if (auto it = memo.find(vs); it != memo.end()) return it->second;
    const std::size_t size = vs.count();
    std::size_t best = 0;
    if (size > 1) {
      HalvingLearner probe(learner);
      probe.set_version_space(vs);
      for (std::size_t s = 0; s < index.num_tuples(); ++s) {
        std::size_t pred = probe.vote(s);
        for (std::size_t o = 0; o < index.orientations(s).size(); ++o) {
          std::size_t c = vs.count_and(index.satisfying(s, o));
          if (c == 0 || c == size) continue;
          best = std::max(best, (o != pred ? 1 : 0) + solve(vs & index.satisfying(s, o)));
        }
      }
    }
    memo.emplace(vs, best);
    return best;
  };
  return solve(learner.version_space());
}

struct RegretReport {
  std::size_t rounds = 0;
  std::size_t learner_mistakes = 0;
  std::size_t best_tree_mistakes = 0;
  double regret() const { return static_cast<double>(learner_mistakes) - static_cast<double>(best_tree_mistakes); }
};

// Noisy stream: triples labeled by a random hidden tree, each label replaced
// by a different orientation with probability `flip`. Regret is against the
// best tree in hindsight over the whole enumeration.
inline RegretReport regret_harness(std::shared_ptr<const TreeIndex> index, OnlineLearner& learner, std::size_t rounds,
                                   double flip, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_tree(0, index->num_trees() - 1);
  std::uniform_int_distribution<std::size_t> pick_tuple(0, index->num_tuples() - 1);
  std::bernoulli_distribution noisy(flip);
  const std::size_t hidden = pick_tree(rng);
  std::vector<std::size_t> tree_mistakes(index->num_trees(), 0);
  RegretReport rep;
  rep.rounds = rounds;
  for (std::size_t r = 0; r < rounds; ++r) {
    std::size_t s = pick_tuple(rng);
    std::size_t o = index->label(hidden, s);
    if (noisy(rng)) {
      std::size_t m = index->orientations(s).size();
      std::uniform_int_distribution<std::size_t> other(1, m - 1);
      o = (o + other(rng)) % m;
    }
    const Constraint& truth = index->orientations(s)[o];
    Constraint pred = learner.predict(index->tuple(s));
    if (pred != truth) ++rep.learner_mistakes;
    learner.update(index->tuple(s), truth);
    for (std::size_t t = 0; t < index->num_trees(); ++t)
      if (index->label(t, s) != o) ++tree_mistakes[t];
  }
  rep.best_tree_mistakes = *std::min_element(tree_mistakes.begin(), tree_mistakes.end());
  return rep;
}

}  // namespace hct
