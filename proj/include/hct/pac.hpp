#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hct/builder.hpp"
#include "hct/parallel.hpp"
#include "hct/tree_ops.hpp"

namespace hct {

using Rng = std::mt19937_64;
using Vectors = std::vector<std::vector<double>>;
using Labeler = std::function<Constraint(Point, Point, Point)>;

// Uniform 3-subset (sorted) of n points.
inline std::array<Point, 3> sample_triple(std::size_t n, Rng& rng) {
  if (n < 3) throw std::invalid_argument("need at least 3 points");
  std::uniform_int_distribution<Point> pick(0, static_cast<Point>(n) - 1);
  std::array<Point, 3> t{};
  t[0] = pick(rng);
  do t[1] = pick(rng);
  while (t[1] == t[0]);
  do t[2] = pick(rng);
  while (t[2] == t[0] || t[2] == t[1]);
  std::sort(t.begin(), t.end());
  return t;
}

inline Constraint sample_labeled_triplet(const HierarchicalTree& t, Rng& rng) {
  auto [a, b, c] = sample_triple(t.num_points(), rng);
  return triplet_relation(t, a, b, c);
}

inline double squared_distance(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return s;
}

// The closest pair stays together. Ties go to the lexicographically smallest
// pair of the sorted triple.
inline Constraint label_by_distance(const Vectors& v, Point a, Point b, Point c) {
  std::array<Point, 3> t{a, b, c};
  std::sort(t.begin(), t.end());
  const double dab = squared_distance(v[t[0]], v[t[1]]);
  const double dac = squared_distance(v[t[0]], v[t[2]]);
  const double dbc = squared_distance(v[t[1]], v[t[2]]);
  if (dab <= dac && dab <= dbc) return Constraint::split_pair(t[0], t[1], t[2]);
  if (dac <= dbc) return Constraint::split_pair(t[0], t[2], t[1]);
  return Constraint::split_pair(t[1], t[2], t[0]);
}

inline Labeler distance_labeler(const Vectors& v) {
  for (const auto& x : v)
    if (x.size() != v.front().size()) throw std::invalid_argument("vectors differ in dimension");
  return [&v](Point a, Point b, Point c) { return label_by_distance(v, a, b, c); };
}

inline Labeler tree_labeler(const HierarchicalTree& t) {
  return [&t](Point a, Point b, Point c) { return triplet_relation(t, a, b, c); };
}

inline Vectors uniform_vectors(std::size_t n, std::size_t dim, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vectors v(n, std::vector<double>(dim));
  for (auto& x : v)
    for (auto& c : x) c = u(rng);
  return v;
}

// Leaves of a balanced binary tree: each node adds a Gaussian offset whose
// scale halves per level, so nearby leaves in the tree are nearby in space.
inline Vectors hierarchical_vectors(std::size_t n, std::size_t dim, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vectors v(n, std::vector<double>(dim, 0.0));
  struct Span {
    std::size_t lo, hi;
    double scale;
  };
  std::vector<Span> stack{{0, n, 1.0}};
  while (!stack.empty()) {
    Span s = stack.back();
    stack.pop_back();
    std::vector<double> off(dim);
    for (auto& c : off) c = s.scale * g(rng);
    for (std::size_t i = s.lo; i < s.hi; ++i)
      for (std::size_t d = 0; d < dim; ++d) v[i][d] += off[d];
    if (s.hi - s.lo > 1) {
      std::size_t mid = s.lo + (s.hi - s.lo) / 2;
      stack.push_back({s.lo, mid, s.scale / 2});
      stack.push_back({mid, s.hi, s.scale / 2});
    }
  }
  return v;
}

// One row per point; a non-numeric first column is taken as the name.
inline Vectors parse_vector_csv(std::istream& in, std::vector<std::string>* names = nullptr) {
  Vectors out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    std::vector<double> row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string& c = cells[i];
      char* end = nullptr;
      double x = std::strtod(c.c_str(), &end);
      bool numeric = end != c.c_str() && std::string_view(end).find_first_not_of(" \t") == std::string_view::npos;
      if (!numeric) {
        if (i == 0) {
          if (names) names->push_back(c);
          continue;
        }
        throw ParseError(lineno, "non-numeric cell '" + c + "'");
      }
      row.push_back(x);
    }
    if (row.empty()) throw ParseError(lineno, "row has no numeric columns");
    if (!out.empty() && row.size() != out.front().size())
      throw ParseError(lineno, "expected " + std::to_string(out.front().size()) + " columns, got " +
                                   std::to_string(row.size()));
    out.push_back(std::move(row));
  }
  if (out.size() < 3) throw ParseError(lineno, "need at least 3 vectors");
  return out;
}

enum class PacMode { kRealizable, kAgnosticVectors, kAgnosticHierarchical, kAgnosticFile, kNonbinary };

inline std::string to_string(PacMode m) {
  switch (m) {
    case PacMode::kRealizable: return "realizable";
    case PacMode::kAgnosticVectors: return "agnostic-vectors";
    case PacMode::kAgnosticHierarchical: return "agnostic-hierarchical";
    case PacMode::kAgnosticFile: return "agnostic-file";
    case PacMode::kNonbinary: return "nonbinary";
  }
  return "?";
}

inline std::optional<PacMode> parse_pac_mode(std::string_view s) {
  for (auto m : {PacMode::kRealizable, PacMode::kAgnosticVectors, PacMode::kAgnosticHierarchical,
                 PacMode::kAgnosticFile, PacMode::kNonbinary})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

struct ExperimentConfig {
  PacMode mode = PacMode::kRealizable;
  std::vector<std::size_t> ns{100};
  std::vector<double> k_ratios{1, 2, 4, 8};
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  std::size_t dimension = 100;
  std::size_t test_size = 2000;
  std::size_t max_children = 4;  // nonbinary ground truth
  std::string vector_file;       // agnostic-file
  std::size_t jobs = 1;
  bool timing = false;  // fill the seconds column (otherwise 0, keeping output byte-stable)

  void validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (ns.empty() || k_ratios.empty()) throw std::invalid_argument("need at least one n and one k-ratio");
    for (double k : k_ratios)
      if (!(k > 0)) throw std::invalid_argument("k-ratio must be positive");
    for (std::size_t n : ns)
      if (n < 3) throw std::invalid_argument("n must be >= 3");
    if (mode == PacMode::kAgnosticFile && vector_file.empty()) throw std::invalid_argument("agnostic-file needs a file");
  }
};

struct TrialRow {
  std::size_t n;
  double k_ratio;
  std::size_t trial;
  double error;
  double seconds;
};

struct AggregateRow {
  std::size_t n;
  double k_ratio;
  double mean, q10, q90;
  double product() const { return k_ratio * mean; }
};

struct ErrorReport {
  PacMode mode;
  std::vector<TrialRow> rows;  // sorted by (n, k_ratio, trial)
  std::vector<AggregateRow> aggregate;
};

inline std::uint64_t choose3(std::uint64_t n) { return n < 3 ? 0 : n * (n - 1) * (n - 2) / 6; }

// Every triple in lexicographic order.
inline std::vector<std::array<Point, 3>> all_triples(std::size_t n) {
  std::vector<std::array<Point, 3>> out;
  out.reserve(choose3(n));
  for (Point a = 0; a < static_cast<Point>(n); ++a)
    for (Point b = a + 1; b < static_cast<Point>(n); ++b)
      for (Point c = b + 1; c < static_cast<Point>(n); ++c) out.push_back({a, b, c});
  return out;
}

// Fraction of test triples whose relation in `model` differs from the label:
// `test_size` uniform draws, or every triple when there are fewer.
inline double test_error(const HierarchicalTree& model, std::size_t n, const Labeler& truth, std::size_t test_size,
                         Rng& rng) {
  std::size_t wrong = 0, total = 0;
  auto score = [&](Point a, Point b, Point c) {
    ++total;
    if (triplet_relation(model, a, b, c) != truth(a, b, c)) ++wrong;
  };
  if (choose3(n) <= test_size) {
    for (auto [a, b, c] : all_triples(n)) score(a, b, c);
  } else {
    for (std::size_t i = 0; i < test_size; ++i) {
      auto [a, b, c] = sample_triple(n, rng);
      score(a, b, c);
    }
  }
  return static_cast<double>(wrong) / static_cast<double>(total);
}

inline OrientedSet sample_training(std::size_t n, std::size_t m, const Labeler& truth, Rng& rng) {
  OrientedSet set;
  set.points = PointSet::numbered(n);
  for (std::size_t i = 0; i < m; ++i) {
    auto [a, b, c] = sample_triple(n, rng);
    set.add(truth(a, b, c));
  }
  return set;
}

inline std::size_t sample_count(double k_ratio, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(k_ratio * static_cast<double>(n)));
}

// One trial of one (n, k-ratio) cell. `vectors` is only read in agnostic-file mode.
inline double run_trial(const ExperimentConfig& cfg, std::size_t n, double k_ratio, std::uint64_t seed,
                        const Vectors* file_vectors) {
  Rng rng(seed);
  const std::size_t m = sample_count(k_ratio, n);
  switch (cfg.mode) {
    case PacMode::kRealizable: {
      HierarchicalTree truth = random_binary_tree(n, rng);
      OrientedSet train = sample_training(n, m, tree_labeler(truth), rng);
      BuildOutcome b = build_multiway(train);
      if (!b.accepted()) throw std::logic_error("realizable sample was rejected");
      HierarchicalTree model = binarize(b.tree(), rng);
      for (const auto& c : train.constraints)
        if (!satisfies(model, c)) throw std::logic_error("model violates a training label");
      return test_error(model, n, tree_labeler(truth), cfg.test_size, rng);
    }
    case PacMode::kAgnosticVectors:
    case PacMode::kAgnosticHierarchical:
    case PacMode::kAgnosticFile: {
      Vectors local;
      const Vectors* v = file_vectors;
      if (cfg.mode == PacMode::kAgnosticVectors) {
        local = uniform_vectors(n, cfg.dimension, rng);
        v = &local;
      } else if (cfg.mode == PacMode::kAgnosticHierarchical) {
        local = hierarchical_vectors(n, cfg.dimension, rng);
        v = &local;
      }
      Labeler truth = distance_labeler(*v);
      OrientedSet train = sample_training(n, m, truth, rng);
      HierarchicalTree model = binarize(build_agnostic(train, SplitStyle::kMultiway).tree, rng);
      return test_error(model, n, truth, cfg.test_size, rng);
    }
    case PacMode::kNonbinary: {
      HierarchicalTree truth = random_multiway_tree(n, rng, cfg.max_children);
      OrientedSet train = sample_training(n, m, tree_labeler(truth), rng);
      BuildOutcome b = build_nonbinary(train);
      if (!b.accepted()) throw std::logic_error("realizable sample was rejected");
      for (const auto& c : train.constraints)
        if (!satisfies(b.tree(), c)) throw std::logic_error("model violates a training label");
      return test_error(b.tree(), n, tree_labeler(truth), cfg.test_size, rng);
    }
  }
  throw std::logic_error("unknown mode");
}

inline double quantile(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  if (xs.empty()) return 0;
  double pos = q * static_cast<double>(xs.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

// Every (n, k-ratio, trial) cell; trial t of a cell is seeded with seed ^ t.
inline ErrorReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  Vectors file_vectors;
  std::vector<std::size_t> ns = cfg.ns;
  if (cfg.mode == PacMode::kAgnosticFile) {
    std::ifstream in(cfg.vector_file);
    if (!in) throw std::invalid_argument("cannot open " + cfg.vector_file);
    file_vectors = parse_vector_csv(in);
    ns = {file_vectors.size()};
  }
  ErrorReport rep{cfg.mode, {}, {}};
  for (std::size_t n : ns)
    for (double k : cfg.k_ratios)
      for (std::size_t t = 0; t < cfg.trials; ++t) rep.rows.push_back({n, k, t, 0.0, 0.0});
  parallel_for(rep.rows.size(), cfg.jobs, [&](std::size_t i) {
    auto& r = rep.rows[i];
    auto start = std::chrono::steady_clock::now();
    r.error = run_trial(cfg, r.n, r.k_ratio, cfg.seed ^ r.trial, &file_vectors);
    if (cfg.timing) r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });
  for (std::size_t i = 0; i < rep.rows.size(); i += cfg.trials) {
    std::vector<double> errs;
    for (std::size_t t = 0; t < cfg.trials; ++t) errs.push_back(rep.rows[i + t].error);
    double mean = 0;
    for (double e : errs) mean += e;
    mean /= static_cast<double>(errs.size());
    rep.aggregate.push_back({rep.rows[i].n, rep.rows[i].k_ratio, mean, quantile(errs, 0.1), quantile(errs, 0.9)});
  }
  return rep;
}

inline ErrorReport run_realizable(ExperimentConfig cfg) {
  cfg.mode = PacMode::kRealizable;
  return run_experiment(cfg);
}

inline ErrorReport run_agnostic(ExperimentConfig cfg) {
  if (cfg.mode != PacMode::kAgnosticVectors && cfg.mode != PacMode::kAgnosticHierarchical &&
      cfg.mode != PacMode::kAgnosticFile)
    cfg.mode = PacMode::kAgnosticVectors;
  return run_experiment(cfg);
}

inline ErrorReport run_nonbinary(ExperimentConfig cfg) {
  cfg.mode = PacMode::kNonbinary;
  return run_experiment(cfg);
}

// Draws distinct uniform triples one at a time, labels them, and returns the
// number drawn when the set first becomes unsatisfiable; nullopt when every
// triple was drawn without a contradiction.
inline std::optional<std::size_t> first_contradiction(std::size_t n, const Labeler& label, Rng& rng) {
  const std::uint64_t pool = choose3(n);
  OrientedSet set;
  set.points = PointSet::numbered(n);
  std::set<std::array<Point, 3>> seen;
  std::vector<std::array<Point, 3>> order;
  if (pool <= 4096) {
    order = all_triples(n);
    std::shuffle(order.begin(), order.end(), rng);
  }
  for (std::uint64_t i = 0; i < pool; ++i) {
    std::array<Point, 3> t;
    if (!order.empty()) {
      t = order[i];
    } else {
      do t = sample_triple(n, rng);
      while (!seen.insert(t).second);
    }
    set.add(label(t[0], t[1], t[2]));
    if (!build_binary(set).accepted()) return static_cast<std::size_t>(i + 1);
  }
  return std::nullopt;
}

struct ThresholdRow {
  std::size_t n;
  std::size_t trial;
  std::optional<std::size_t> count;
};

struct ThresholdReport {
  std::vector<ThresholdRow> rows;
  // mean over trials that hit a contradiction, per n
  std::map<std::size_t, double> mean;
};

// Distance-labeled uniform vectors (or hierarchical ones), trial t seeded
// with seed ^ t.
inline ThresholdReport contradiction_threshold(const ExperimentConfig& cfg) {
  cfg.validate();
  ThresholdReport rep;
  for (std::size_t n : cfg.ns)
    for (std::size_t t = 0; t < cfg.trials; ++t) rep.rows.push_back({n, t, std::nullopt});
  parallel_for(rep.rows.size(), cfg.jobs, [&](std::size_t i) {
    auto& r = rep.rows[i];
    Rng rng(cfg.seed ^ r.trial);
    Vectors v = cfg.mode == PacMode::kAgnosticHierarchical ? hierarchical_vectors(r.n, cfg.dimension, rng)
                                                           : uniform_vectors(r.n, cfg.dimension, rng);
    r.count = first_contradiction(r.n, distance_labeler(v), rng);
  });
  std::map<std::size_t, std::pair<double, std::size_t>> acc;
  for (const auto& r : rep.rows)
    if (r.count) {
      acc[r.n].first += static_cast<double>(*r.count);
      acc[r.n].second += 1;
    }
  for (auto& [n, a] : acc) rep.mean[n] = a.first / static_cast<double>(a.second);
  return rep;
}

// ---------------------------------------------------------------------------
// Output

inline std::string fmt_double(double x, int precision = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << x;
  return os.str();
}

inline std::string fmt_ratio(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

inline std::string report_csv(const ErrorReport& r) {
  std::string out = "mode,n,k_ratio,trial,error,seconds\n";
  for (const auto& row : r.rows)
    out += to_string(r.mode) + "," + std::to_string(row.n) + "," + fmt_ratio(row.k_ratio) + "," +
           std::to_string(row.trial) + "," + fmt_double(row.error) + "," + fmt_double(row.seconds, 3) + "\n";
  return out;
}

inline std::string aggregate_csv(const ErrorReport& r) {
  std::string out = "mode,n,k_ratio,mean,q10,q90,product\n";
  for (const auto& a : r.aggregate)
    out += to_string(r.mode) + "," + std::to_string(a.n) + "," + fmt_ratio(a.k_ratio) + "," + fmt_double(a.mean) +
           "," + fmt_double(a.q10) + "," + fmt_double(a.q90) + "," + fmt_double(a.product()) + "\n";
  return out;
}

inline std::string threshold_csv(const ThresholdReport& r) {
  std::string out = "n,trial,count\n";
  for (const auto& row : r.rows)
    out += std::to_string(row.n) + "," + std::to_string(row.trial) + "," +
           (row.count ? std::to_string(*row.count) : std::string("none")) + "\n";
  return out;
}

// Mean error against k-ratio, one polyline per n.
inline std::string report_svg(const ErrorReport& r) {
  const double W = 640, H = 400, L = 60, R = 140, T = 30, B = 50;
  double xmax = 0, ymax = 0;
  for (const auto& a : r.aggregate) {
    xmax = std::max(xmax, a.k_ratio);
    ymax = std::max(ymax, a.mean);
  }
  if (xmax <= 0) xmax = 1;
  if (ymax <= 0) ymax = 1;
  auto px = [&](double x) { return L + (W - L - R) * x / xmax; };
  auto py = [&](double y) { return H - B - (H - T - B) * y / ymax; };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
     << to_string(r.mode) << ": mean test error</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double y = ymax * i / 4;
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
       << "font-size=\"11\">" << fmt_double(y, 2) << "</text>\n";
  }
  std::set<double> ks;
  for (const auto& a : r.aggregate) ks.insert(a.k_ratio);
  for (double k : ks)
    os << "<text x=\"" << px(k) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"11\">" << fmt_ratio(k) << "</text>\n";
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">samples / n</text>\n";
  std::map<std::size_t, std::vector<const AggregateRow*>> by_n;
  for (const auto& a : r.aggregate) by_n[a.n].push_back(&a);
  std::size_t ci = 0;
  for (const auto& [n, pts] : by_n) {
    const char* col = colors[ci++ % 6];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\" points=\"";
    for (const auto* a : pts) os << px(a->k_ratio) << "," << py(a->mean) << " ";
    os << "\"/>\n";
    double ly = T + 20.0 * static_cast<double>(ci);
    os << "<text x=\"" << W - R + 10 << "\" y=\"" << ly << "\" fill=\"" << col
       << "\" font-family=\"sans-serif\" font-size=\"12\">n=" << n << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace hct
