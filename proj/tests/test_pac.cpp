#include <gtest/gtest.h>

#include <map>
#include <random>
#include <sstream>

#include "hct/hct.hpp"
#include "oracles.hpp"

using namespace hct;

namespace {

ExperimentConfig small_config(PacMode mode) {
  ExperimentConfig cfg;
  cfg.mode = mode;
  cfg.ns = {30};
  cfg.k_ratios = {1, 4};
  cfg.trials = 3;
  cfg.seed = 5;
  cfg.dimension = 10;
  cfg.test_size = 500;
  return cfg;
}

}  // namespace

TEST(DistanceLabel, AgreesWithPlainLoops) {
  Rng rng(1);
  auto v = uniform_vectors(40, 7, rng);
  auto label = distance_labeler(v);
  for (int i = 0; i < 1000; ++i) {
    auto [a, b, c] = sample_triple(40, rng);
    ASSERT_EQ(label(a, b, c), oracle::distance_label(v, a, b, c));
    ASSERT_EQ(label(c, a, b), label(a, b, c));
  }
}

TEST(DistanceLabel, TiesAndCollinearPoints) {
  // equilateral: every pair ties, the first pair wins
  Vectors eq{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  EXPECT_EQ(label_by_distance(eq, 0, 1, 2), Constraint::split_pair(0, 1, 2));
  // ac and bc tie below ab: ac wins
  Vectors iso{{0, 0}, {4, 0}, {2, 1}};
  EXPECT_EQ(label_by_distance(iso, 0, 1, 2), Constraint::split_pair(0, 2, 1));
  Vectors tall{{0, 0}, {2, 0}, {1, 5}};
  EXPECT_EQ(label_by_distance(tall, 0, 1, 2), Constraint::split_pair(0, 1, 2));
  // collinear: the middle point is closest to the nearer end
  Vectors line{{0}, {3}, {1}};
  EXPECT_EQ(label_by_distance(line, 0, 1, 2), Constraint::split_pair(0, 2, 1));
  Vectors same{{1, 1}, {1, 1}, {1, 1}};
  EXPECT_EQ(label_by_distance(same, 2, 1, 0), Constraint::split_pair(0, 1, 2));
  Vectors ragged{{1, 1}, {1}, {1, 1}};
  EXPECT_THROW(distance_labeler(ragged), std::invalid_argument);
}

TEST(DistanceLabel, PermutationCovariance) {
  Rng rng(2);
  auto v = uniform_vectors(12, 3, rng);
  std::vector<Point> perm(12);
  for (int i = 0; i < 12; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  Vectors w(12);
  for (int i = 0; i < 12; ++i) w[perm[i]] = v[i];
  for (auto [a, b, c] : all_triples(12)) {
    auto l = label_by_distance(v, a, b, c).as_split_pair();
    auto m = label_by_distance(w, perm[a], perm[b], perm[c]).as_split_pair();
    // random coordinates never tie, so the relabeled pair must match
    EXPECT_EQ(perm[l.cut], m.cut);
  }
}

TEST(Sampling, TriplesAreUniform) {
  Rng rng(3);
  std::map<std::array<Point, 3>, int> freq;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) ++freq[sample_triple(5, rng)];
  ASSERT_EQ(freq.size(), 10u);
  double chi2 = 0, e = draws / 10.0;
  for (auto& [t, f] : freq) chi2 += (f - e) * (f - e) / e;
  // 9 degrees of freedom, 0.999 quantile is about 27.9
  EXPECT_LT(chi2, 27.9);
}

TEST(Sampling, LabeledTripletsFollowTheTree) {
  PointSet ps;
  auto t = parse_newick("(((a,b),c),d);", ps);
  Rng rng(4);
  std::map<Constraint, int> freq;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) ++freq[sample_labeled_triplet(t, rng)];
  ASSERT_EQ(freq.size(), 4u);
  auto cl = oracle::clusters_of(t);
  double chi2 = 0, e = draws / 4.0;
  for (auto& [c, f] : freq) {
    auto p = c.points();
    EXPECT_EQ(oracle::relation_of(c), oracle::relation(cl, p[0], p[1], p[2]));
    chi2 += (f - e) * (f - e) / e;
  }
  // 3 degrees of freedom, 0.999 quantile is about 16.3
  EXPECT_LT(chi2, 16.3);
}

TEST(Realizable, FullInformationGivesZeroError) {
  Rng rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    auto truth = random_binary_tree(15, rng);
    OrientedSet s = extract_triplets(truth, PointSet::numbered(15));
    auto b = build_multiway(s);
    ASSERT_TRUE(b.accepted());
    auto model = binarize(b.tree(), rng);
    EXPECT_EQ(test_error(model, 15, tree_labeler(truth), 2000, rng), 0.0);
  }
}

TEST(Realizable, ErrorFallsWithMoreSamples) {
  ExperimentConfig cfg;
  cfg.ns = {60};
  cfg.k_ratios = {1, 2, 4, 8, 16};
  cfg.trials = 8;
  cfg.seed = 11;
  auto rep = run_realizable(cfg);
  ASSERT_EQ(rep.aggregate.size(), 5u);
  for (std::size_t i = 1; i < rep.aggregate.size(); ++i)
    EXPECT_LT(rep.aggregate[i].mean, rep.aggregate[i - 1].mean) << i;
  for (const auto& a : rep.aggregate) {
    EXPECT_LE(a.q10, a.mean);
    EXPECT_GE(a.q90, a.mean);
  }
}

TEST(Nonbinary, StarTreeIsRecoveredExactly) {
  PointSet ps;
  auto star = parse_newick("(a,b,c,d,e,f);", ps);
  OrientedSet s = extract_triplets(star, ps);
  auto b = build_nonbinary(s);
  ASSERT_TRUE(b.accepted());
  Rng rng(1);
  EXPECT_EQ(test_error(b.tree(), 6, tree_labeler(star), 100, rng), 0.0);
}

TEST(Nonbinary, ExperimentRuns) {
  auto rep = run_nonbinary(small_config(PacMode::kNonbinary));
  ASSERT_EQ(rep.rows.size(), 6u);
  EXPECT_EQ(rep.mode, PacMode::kNonbinary);
  EXPECT_LT(rep.aggregate[1].mean, rep.aggregate[0].mean);
}

TEST(Nonbinary, ProductRoughlyConstant) {
  ExperimentConfig cfg;
  cfg.ns = {100};
  cfg.k_ratios = {1, 2, 4};
  cfg.trials = 10;
  cfg.seed = 7;
  auto rep = run_nonbinary(cfg);
  double mean = 0;
  for (const auto& a : rep.aggregate) mean += a.product() / 3;
  for (const auto& a : rep.aggregate) {
    EXPECT_GE(a.product(), 0.5 * mean) << a.k_ratio;
    EXPECT_LE(a.product(), 1.5 * mean) << a.k_ratio;
  }
}

TEST(Agnostic, SingleTripletIsReproduced) {
  Vectors v{{0, 0}, {1, 0}, {5, 5}};
  auto label = distance_labeler(v);
  OrientedSet s;
  s.points = PointSet::numbered(3);
  s.add(label(0, 1, 2));
  auto model = build_agnostic(s, SplitStyle::kMultiway).tree;
  Rng rng(1);
  EXPECT_EQ(test_error(binarize(model, rng), 3, label, 10, rng), 0.0);
}

TEST(Experiment, DeterministicAcrossJobs) {
  for (auto mode : {PacMode::kRealizable, PacMode::kAgnosticVectors, PacMode::kAgnosticHierarchical}) {
    auto cfg = small_config(mode);
    auto a = report_csv(run_experiment(cfg));
    cfg.jobs = 3;
    auto b = report_csv(run_experiment(cfg));
    EXPECT_EQ(a, b);
    cfg.seed = 6;
    EXPECT_NE(a, report_csv(run_experiment(cfg)));
  }
}

TEST(Experiment, CsvShapes) {
  auto rep = run_realizable(small_config(PacMode::kRealizable));
  auto csv = report_csv(rep);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "mode,n,k_ratio,trial,error,seconds");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  EXPECT_NE(csv.find("realizable,30,4,2,"), std::string::npos);
  EXPECT_NE(csv.find(",0.000\n"), std::string::npos);
  auto agg = aggregate_csv(rep);
  EXPECT_EQ(agg.substr(0, agg.find('\n')), "mode,n,k_ratio,mean,q10,q90,product");
  EXPECT_EQ(std::count(agg.begin(), agg.end(), '\n'), 3);
  auto svg = report_svg(rep);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Experiment, ConfigValidation) {
  ExperimentConfig cfg;
  cfg.trials = 0;
  EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
  cfg = {};
  cfg.ns = {2};
  EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
  cfg = {};
  cfg.k_ratios = {0};
  EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
  cfg = {};
  cfg.mode = PacMode::kAgnosticFile;
  EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
  cfg.vector_file = "/nonexistent/vectors.csv";
  EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
  EXPECT_EQ(parse_pac_mode("agnostic-vectors"), PacMode::kAgnosticVectors);
  EXPECT_FALSE(parse_pac_mode("bogus"));
  for (auto m : {PacMode::kRealizable, PacMode::kAgnosticVectors, PacMode::kAgnosticHierarchical,
                 PacMode::kAgnosticFile, PacMode::kNonbinary})
    EXPECT_EQ(parse_pac_mode(to_string(m)), m);
}

TEST(VectorCsv, ParsesNamesAndRejectsBadRows) {
  std::istringstream ok("x,1,2\ny,3,4\r\n\nz,5,6\n");
  std::vector<std::string> names;
  auto v = parse_vector_csv(ok, &names);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(names, (std::vector<std::string>{"x", "y", "z"}));
  EXPECT_EQ(v[2], (std::vector<double>{5, 6}));
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      parse_vector_csv(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("1,2\n3,4,5\n6,7\n"), 2u);
  EXPECT_EQ(line_of("1,2\n3,oops\n6,7\n"), 2u);
  EXPECT_EQ(line_of("name\n"), 1u);
  EXPECT_EQ(line_of("1,2\n3,4\n"), 2u);
}

TEST(VectorCsv, FileModeUsesEveryRow) {
  ExperimentConfig cfg;
  cfg.mode = PacMode::kAgnosticFile;
  cfg.vector_file = std::string(HCT_DATA_DIR) + "/vectors.csv";
  cfg.k_ratios = {2};
  cfg.trials = 2;
  auto rep = run_agnostic(cfg);
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_EQ(rep.rows[0].n, 12u);
  for (const auto& r : rep.rows) {
    EXPECT_GE(r.error, 0.0);
    EXPECT_LE(r.error, 1.0);
  }
}

TEST(Threshold, ConsistentLabelsNeverContradict) {
  Rng rng(8);
  for (int rep = 0; rep < 5; ++rep) {
    auto t = random_binary_tree(10, rng);
    EXPECT_FALSE(first_contradiction(10, tree_labeler(t), rng));
  }
}

TEST(Threshold, CountIsTheFirstUnsatisfiablePrefix) {
  Rng rng(21);
  auto v = uniform_vectors(12, 20, rng);
  auto label = distance_labeler(v);
  Rng a(99), b(99);
  auto count = first_contradiction(12, label, a);
  ASSERT_TRUE(count);
  // replay the same draw order
  auto order = all_triples(12);
  std::shuffle(order.begin(), order.end(), b);
  std::vector<Constraint> prefix;
  for (std::size_t i = 0; i < *count; ++i) prefix.push_back(label(order[i][0], order[i][1], order[i][2]));
  OrientedSet s;
  s.points = PointSet::numbered(12);
  for (std::size_t i = 0; i + 1 < prefix.size(); ++i) s.add(prefix[i]);
  EXPECT_TRUE(build_binary(s).accepted());
  s.add(prefix.back());
  EXPECT_FALSE(build_binary(s).accepted());
}

TEST(Threshold, GrowsLinearlyInN) {
  ExperimentConfig cfg;
  cfg.mode = PacMode::kAgnosticVectors;
  cfg.ns = {50, 100, 200};
  cfg.trials = 10;
  cfg.seed = 3;
  auto rep = contradiction_threshold(cfg);
  std::vector<double> xs, ys;
  for (auto [n, m] : rep.mean) {
    xs.push_back(static_cast<double>(n));
    ys.push_back(m);
  }
  ASSERT_EQ(xs.size(), 3u);
  const double k = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / k;
    my += ys[i] / k;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  double r2 = sxy * sxy / (sxx * syy);
  EXPECT_GE(r2, 0.9);
  EXPECT_GT(sxy / sxx, 0.0);
  auto csv = threshold_csv(rep);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,trial,count");
}
