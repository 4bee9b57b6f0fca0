// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. Every check compares the library against an independent
// brute-force computation or a fixed numeric band.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>

#include "hct/hct.hpp"
#include "oracles.hpp"

using namespace hct;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

// Collects failures without stopping at the first one.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_++ < 5) notes_ += (notes_.empty() ? "" : "; ") + what;
  }
  void note(const std::string& s) { info_ += (info_.empty() ? "" : ", ") + s; }
  Verdict verdict() const {
    if (failures_ == 0) return {true, info_};
    return {false, std::to_string(failures_) + " failure(s): " + notes_ + (info_.empty() ? "" : " | " + info_)};
  }

 private:
  std::size_t failures_ = 0;
  std::string notes_, info_;
};

std::string fixed(double x, int p = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(p);
  os << x;
  return os.str();
}

using Triple = std::array<int, 3>;

std::vector<Triple> triples_of(int n) {
  std::vector<Triple> out;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) out.push_back({a, b, c});
  return out;
}

OrientedSet make_set(int n, const std::vector<Constraint>& cs) {
  OrientedSet s;
  s.points = PointSet::numbered(static_cast<std::size_t>(n));
  for (const auto& c : cs) s.add(c);
  return s;
}

bool all_satisfied(const HierarchicalTree& t, const OrientedSet& s) {
  for (const auto& c : s.constraints)
    if (!satisfies(t, c)) return false;
  return true;
}

// ---------------------------------------------------------------------------

Verdict satisfiability_oracle() {
  Checker ck;
  std::size_t exhaustive = 0;
  for (int n = 3; n <= 5; ++n)
    for (bool binary : {true, false}) {
      oracle::Table table(n, binary);
      std::vector<Constraint> options;
      for (auto t : triples_of(n))
        for (int r = 0; r < (binary ? 3 : 4); ++r) options.push_back(oracle::make_constraint(t[0], t[1], t[2], r));
      // multisets of size 1..4 as nondecreasing index sequences
      std::vector<std::size_t> idx;
      std::function<void(std::size_t)> rec = [&](std::size_t from) {
        if (!idx.empty()) {
          std::vector<Constraint> cs;
          for (auto i : idx) cs.push_back(options[i]);
          auto s = make_set(n, cs);
          auto b = binary ? build_binary(s) : build_nonbinary(s);
          bool expect = table.satisfiable(cs);
          ++exhaustive;
          ck.expect(b.accepted() == expect, "exhaustive n=" + std::to_string(n) + " disagrees");
          if (b.accepted()) ck.expect(all_satisfied(b.tree(), s), "accepted tree violates input");
        }
        if (idx.size() == 4) return;
        for (std::size_t i = from; i < options.size(); ++i) {
          idx.push_back(i);
          rec(i);
          idx.pop_back();
        }
      };
      rec(0);
    }

  std::map<std::pair<int, bool>, std::unique_ptr<oracle::Table>> tables;
  std::mt19937_64 rng(2024);
  std::size_t sat = 0;
  const int kRandom = 10000;
  for (int rep = 0; rep < kRandom; ++rep) {
    int n = 4 + static_cast<int>(rng() % 5);
    bool binary = rep % 2 == 0;
    auto& table = tables[{n, binary}];
    if (!table) table = std::make_unique<oracle::Table>(n, binary);
    auto tr = triples_of(n);
    std::vector<Constraint> cs;
    if (rng() % 2) {
      auto truth = binary ? random_binary_tree(static_cast<std::size_t>(n), rng)
                          : random_multiway_tree(static_cast<std::size_t>(n), rng, 4);
      auto cl = oracle::clusters_of(truth);
      int m = n + static_cast<int>(rng() % static_cast<std::uint64_t>(2 * n));
      for (int i = 0; i < m; ++i) {
        auto t = tr[rng() % tr.size()];
        cs.push_back(oracle::make_constraint(t[0], t[1], t[2], oracle::relation(cl, t[0], t[1], t[2])));
      }
      if (rng() % 2) {
        auto& c = cs[rng() % cs.size()];
        auto p = c.points();
        c = oracle::make_constraint(p[0], p[1], p[2], static_cast<int>(rng() % (binary ? 3 : 4)));
      }
    } else {
      int m = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n + 2));
      for (int i = 0; i < m; ++i) {
        auto t = tr[rng() % tr.size()];
        cs.push_back(oracle::make_constraint(t[0], t[1], t[2], static_cast<int>(rng() % (binary ? 3 : 4))));
      }
    }
    auto s = make_set(n, cs);
    auto b = binary ? build_binary(s) : build_nonbinary(s);
    bool expect = table->satisfiable(cs);
    sat += expect;
    ck.expect(b.accepted() == expect, "random n=" + std::to_string(n) + " disagrees");
    if (b.accepted()) ck.expect(all_satisfied(b.tree(), s), "accepted tree violates input");
  }
  ck.note(std::to_string(exhaustive) + " exhaustive sets");
  ck.note(std::to_string(kRandom) + " random sets (" + std::to_string(sat) + " sat)");
  return ck.verdict();
}

Verdict engine_differential() {
  Checker ck;
  std::mt19937_64 rng(77);
  std::size_t rejected = 0;
  for (std::size_t n : {8u, 64u, 256u})
    for (bool mutate : {false, true})
      for (int rep = 0; rep < 1000; ++rep) {
        auto truth = random_binary_tree(n, rng);
        auto s = sample_training(n, 2 * n, tree_labeler(truth), rng);
        if (mutate) {
          int flips = 1 + static_cast<int>(rng() % 3);
          for (int f = 0; f < flips; ++f) {
            auto& c = s.constraints[rng() % s.constraints.size()];
            auto p = c.points();
            int cur = oracle::relation_of(c);
            c = oracle::make_constraint(p[0], p[1], p[2], (cur + 1 + static_cast<int>(rng() % 2)) % 3);
          }
        }
        auto msf = build_via_msf(s, {MsfBackendKind::kNaive, false, nullptr});
        auto base = build_binary(s);
        ck.expect(msf.outcome.accepted() == base.accepted(), "engines disagree at n=" + std::to_string(n));
        if (!mutate) ck.expect(base.accepted(), "consistent set rejected");
        if (msf.outcome.accepted()) ck.expect(all_satisfied(msf.outcome.tree(), s), "msf tree violates input");
        if (base.accepted()) ck.expect(all_satisfied(base.tree(), s), "baseline tree violates input");
        rejected += !base.accepted();
      }
  ck.note("6000 sets, " + std::to_string(rejected) + " rejected");
  return ck.verdict();
}

Verdict contradiction_size_bound() {
  Checker ck;
  std::size_t checked = 0;
  auto run = [&](int n, const std::vector<Triple>& pick, const oracle::Table& table) {
    ConstraintSet s;
    s.points = PointSet::numbered(static_cast<std::size_t>(n));
    for (auto t : pick) s.add({t[0], t[1], t[2]});
    auto found = exists_contradictory_orientation(s, false);
    ++checked;
    ck.expect(found.has_value(), "no contradiction found at n=" + std::to_string(n));
    if (found) ck.expect(!table.satisfiable(found->constraints), "reported orientation is satisfiable");
  };
  {
    oracle::Table table(4, true);
    auto tr = triples_of(4);
    for (std::size_t skip = 0; skip < tr.size(); ++skip) {
      std::vector<Triple> pick;
      for (std::size_t i = 0; i < tr.size(); ++i)
        if (i != skip) pick.push_back(tr[i]);
      run(4, pick, table);
    }
  }
  {
    oracle::Table table(5, true);
    auto tr = triples_of(5);
    // every 4-subset of the 10 triples, then random draws on top
    for (std::uint32_t mask = 0; mask < (1U << tr.size()); ++mask) {
      if (std::popcount(mask) != 4) continue;
      std::vector<Triple> pick;
      for (std::size_t i = 0; i < tr.size(); ++i)
        if (mask >> i & 1) pick.push_back(tr[i]);
      run(5, pick, table);
    }
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 1000; ++rep) {
      std::shuffle(tr.begin(), tr.end(), rng);
      run(5, std::vector<Triple>(tr.begin(), tr.begin() + 4), table);
    }
  }
  ck.note(std::to_string(checked) + " triplet sets");
  return ck.verdict();
}

Verdict natarajan_values() {
  Checker ck;
  std::size_t a = natarajan_dimension(4, 3, false);
  std::size_t b = natarajan_dimension(5, 3, false);
  std::size_t c = natarajan_dimension(4, 3, true);
  ck.expect(a == 2, "n=4 binary gave " + std::to_string(a));
  ck.expect(b == 3, "n=5 binary gave " + std::to_string(b));
  ck.expect(c == 2, "n=4 nonbinary gave " + std::to_string(c));
  ck.note("n=4:" + std::to_string(a) + " n=5:" + std::to_string(b) + " n=4 nonbinary:" + std::to_string(c));
  return ck.verdict();
}

Verdict tuple_bounds() {
  Checker ck;
  oracle::Table table(6, true);
  auto flat_sat = [&](const std::vector<Constraint>& cs) {
    std::vector<Constraint> flat;
    for (const auto& c : cs)
      for (auto& t : oracle::triplets_of(c)) flat.push_back(t);
    return table.satisfiable(flat);
  };
  std::vector<std::vector<Point>> quads;
  for (std::uint32_t mask = 0; mask < 64; ++mask)
    if (std::popcount(mask) == 4) {
      std::vector<Point> q;
      for (int p = 0; p < 6; ++p)
        if (mask >> p & 1) q.push_back(p);
      quads.push_back(q);
    }
  std::mt19937_64 rng(6);
  const int kSets = 200;
  for (int rep = 0; rep < kSets; ++rep) {
    ConstraintSet s;
    s.points = PointSet::numbered(6);
    for (int i = 0; i < 3; ++i) s.add(quads[rng() % quads.size()]);
    auto found = tuple_threshold_check(s);
    ck.expect(found.has_value(), "3-tuple set without contradiction");
    if (found) ck.expect(!flat_sat(found->constraints), "reported tuple orientation is satisfiable");
  }
  auto chain = construct_tuple_chain(PointSet::numbered(6), 4);
  ck.expect(chain.size() == 2, "chain size");
  ck.expect(!exists_contradictory_tuple_orientation(chain, false).has_value(), "chain has a contradiction");
  // and by the oracle: every pair of shapes is satisfiable
  std::size_t pairs = 0;
  for (auto& s1 : enumerate_binary_trees(4))
    for (auto& s2 : enumerate_binary_trees(4)) {
      ++pairs;
      ck.expect(flat_sat({Constraint::ktuple(chain.tuples[0], s1), Constraint::ktuple(chain.tuples[1], s2)}),
                "oracle finds an unsatisfiable chain orientation");
    }
  ck.note(std::to_string(kSets) + " random 3-tuple sets, chain checked over " + std::to_string(pairs) + " orientations");
  return ck.verdict();
}

Verdict littlestone_construction() {
  Checker ck;
  for (auto [n, k, depth] : std::vector<std::array<std::size_t, 3>>{{8, 2, 12}, {9, 3, 6}, {16, 4, 8}}) {
    auto L = build_littlestone_tree(n, k);
    std::string tag = "(" + std::to_string(n) + "," + std::to_string(k) + ")";
    ck.expect(L.depth() == depth, tag + " depth " + std::to_string(L.depth()));
    ck.expect(verify_shattered(L), tag + " not shattered");
    ck.expect(rank_order_check(L), tag + " rank order");
    auto bad = L;
    std::size_t v = (std::size_t{1} << (bad.depth() - 1)) - 1;
    auto& lab = bad.edge_label(v, false);
    std::swap(lab.order[0], lab.order[1]);
    ck.expect(!verify_shattered(bad), tag + " edge mutation still shattered");
    ck.expect(!rank_order_check(bad), tag + " edge mutation passes rank check");
    auto moved = L;
    auto& X = moved.partitions().rbegin()->second;
    std::swap(X.front(), X.back());
    ck.expect(!rank_order_check(moved), tag + " partition mutation passes rank check");
    ck.note(tag + " depth " + std::to_string(L.depth()));
  }
  return ck.verdict();
}

Verdict halving_bound() {
  Checker ck;
  const auto bound = static_cast<std::size_t>(std::floor(std::log(105.0) / std::log(1.5)));
  std::size_t worst = halving_worst_case(HalvingLearner(5, 3));
  ck.expect(worst <= bound, "worst case " + std::to_string(worst) + " above " + std::to_string(bound));
  ck.note("n=5 worst case " + std::to_string(worst) + " <= " + std::to_string(bound));
  auto L = build_littlestone_tree(9, 3);
  std::vector<std::unique_ptr<OnlineLearner>> learners;
  learners.push_back(std::make_unique<ConstantLearner>());
  learners.push_back(std::make_unique<TreeConsistentLearner>(9));
  learners.push_back(
      std::make_unique<HalvingLearner>(std::make_shared<const TreeIndex>(9, 3, Arity::kBinary, 9, false, false)));
  for (auto& l : learners) {
    auto g = adversary_game(L, *l);
    ck.expect(g.mistakes == L.depth(), l->name() + " made " + std::to_string(g.mistakes));
    ck.note(l->name() + " " + std::to_string(g.mistakes) + "/" + std::to_string(L.depth()));
  }
  return ck.verdict();
}

Verdict realizable_constant() {
  Checker ck;
  ExperimentConfig cfg;
  cfg.ns = {100, 500};
  cfg.k_ratios = {2, 4, 8};
  cfg.trials = 10;
  cfg.seed = 7;
  auto rep = run_realizable(cfg);
  for (const auto& a : rep.aggregate) {
    double p = a.product();
    ck.expect(p >= 0.25 && p <= 0.55, "n=" + std::to_string(a.n) + " k=" + fixed(a.k_ratio, 0) + " product " + fixed(p));
    ck.note(std::to_string(a.n) + "/" + fixed(a.k_ratio, 0) + ":" + fixed(p));
  }
  return ck.verdict();
}

Verdict threshold_ratio() {
  Checker ck;
  ExperimentConfig cfg;
  cfg.mode = PacMode::kAgnosticVectors;
  cfg.ns = {50, 100, 200};
  cfg.trials = 10;
  cfg.seed = 7;
  auto rep = contradiction_threshold(cfg);
  for (std::size_t n : cfg.ns) {
    auto it = rep.mean.find(n);
    ck.expect(it != rep.mean.end(), "no contradiction at n=" + std::to_string(n));
    if (it == rep.mean.end()) continue;
    double r = it->second / static_cast<double>(n);
    ck.expect(r >= 0.9 && r <= 1.6, "n=" + std::to_string(n) + " ratio " + fixed(r));
    ck.note(std::to_string(n) + ":" + fixed(r));
  }
  return ck.verdict();
}

Verdict agnostic_error() {
  Checker ck;
  ExperimentConfig cfg;
  cfg.mode = PacMode::kAgnosticVectors;
  cfg.ns = {100};
  cfg.k_ratios = {1, 2, 4};
  cfg.trials = 10;
  cfg.seed = 7;
  auto uniform = run_agnostic(cfg);
  cfg.mode = PacMode::kAgnosticHierarchical;
  auto hier = run_agnostic(cfg);
  for (std::size_t i = 0; i < uniform.aggregate.size(); ++i) {
    double u = uniform.aggregate[i].mean, h = hier.aggregate[i].mean;
    std::string k = fixed(uniform.aggregate[i].k_ratio, 0);
    ck.expect(u >= 0.55 && u <= 0.72, "uniform k=" + k + " error " + fixed(u));
    ck.expect(h < u, "hierarchical k=" + k + " not lower");
    ck.note("k=" + k + " uniform " + fixed(u) + " hierarchical " + fixed(h));
  }
  return ck.verdict();
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string title;
    std::function<Verdict()> run;
  };
  std::vector<Criterion> criteria{
      {1, "builders agree with full tree enumeration", satisfiability_oracle},
      {2, "msf engine (naive backend) agrees with the baseline builder", engine_differential},
      {3, "n-1 triplets always admit a contradictory orientation", contradiction_size_bound},
      {4, "Natarajan dimension is n-2", natarajan_values},
      {5, "k-tuple contradiction bound and chain at n=6, k=4", tuple_bounds},
      {6, "Littlestone tree depth, shattering and mutations", littlestone_construction},
      {7, "halving mistake bound and forced adversary mistakes", halving_bound},
      {8, "realizable k-ratio times error in [0.25, 0.55]", realizable_constant},
      {9, "contradiction threshold / n in [0.9, 1.6]", threshold_ratio},
      {10, "agnostic uniform-vector error in [0.55, 0.72], hierarchical lower", agnostic_error},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !v.pass;
    std::cout << "criterion " << c.id << ": " << (v.pass ? "PASS" : "FAIL") << "  " << c.title << "  [" << v.detail
              << "] (" << fixed(secs, 1) << "s)" << std::endl;
  }
  std::cout << "criterion 11: N/A  dataset curves and existential online regret constants are not reproduced here"
            << std::endl;
  std::cout << (failed ? std::to_string(failed) + " criterion(s) failed" : std::string("all criteria passed"))
            << std::endl;
  return failed ? 1 : 0;
}
