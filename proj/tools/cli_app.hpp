#pragma once

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hct/hct.hpp"

namespace hct::cli {

enum Exit : int { kOk = 0, kUnsat = 1, kInputError = 2, kBudget = 3 };

inline std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot write " + path);
  f << text;
}

inline OrientedSet read_oriented(const std::string& path) {
  auto parsed = parse_constraints(read_input(path));
  if (!std::holds_alternative<OrientedSet>(parsed))
    throw std::invalid_argument(path + ": expected labeled constraints, found unlabeled tuples");
  return std::get<OrientedSet>(std::move(parsed));
}

inline void print_witness(const OrientedSet& set, const ClosedSetWitness& w, std::ostream& out) {
  out << "UNSAT\nwitness:";
  for (Point p : w.points) out << ' ' << set.points.name(p);
  out << '\n';
  for (const auto& c : w.constraints) out << "  " << format_constraint(c, set.points) << '\n';
}

// Every constraint must hold in a tree we print.
inline void verify_all(const HierarchicalTree& t, const OrientedSet& set) {
  for (const auto& c : set.constraints)
    if (!satisfies(t, c)) throw std::logic_error("built tree violates " + format_constraint(c, set.points));
}

// key=value lines become --key=value arguments placed ahead of the command
// line, so explicit flags win.
inline std::vector<std::string> config_arguments(const std::string& path) {
  std::istringstream in(read_input(path));
  std::vector<std::string> args;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = hct::detail::trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno, "config: expected key=value");
    std::string key(hct::detail::trim(body.substr(0, eq)));
    std::string value(hct::detail::trim(body.substr(eq + 1)));
    if (key.empty()) throw ParseError(lineno, "config: empty key");
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

inline std::uint64_t default_seed() {
  if (const char* s = std::getenv("HCT_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (end == s || *end != '\0') throw std::invalid_argument("HCT_SEED is not an unsigned integer");
    return v;
  }
  return 1;
}

struct Options {
  std::string file;
  bool nonbinary = false;
  std::string engine = "baseline";
  std::string backend = "naive";
  bool trace = false;
  bool ktuple = false;
  bool debug_checks = false;
  std::size_t n = 0;
  std::size_t k = 3;
  std::size_t m = 0;
  bool csv = false;
  bool verify = false;
  bool chain = false;
  std::string game;
  std::string transcript;
  std::size_t enum_cap = kDefaultEnumerationCap;
  std::string mode = "realizable";
  std::vector<std::size_t> ns;
  std::vector<double> k_ratios;
  std::size_t trials = 10;
  std::size_t dim = 100;
  std::size_t test_size = 2000;
  std::size_t max_children = 4;
  bool threshold = false;
  std::string out_csv, aggregate_csv_path, svg;
  std::uint64_t seed = 1;
  std::size_t jobs = 0;
  bool timing = false;
  std::string config;
};

inline int cmd_check(const Options& o, std::ostream& out) {
  OrientedSet set = read_oriented(o.file);
  const bool nb = o.nonbinary || set.has_three_way();
  BuildOutcome b = check_satisfiable(set, nb);
  if (!b.accepted()) {
    auto w = find_closed_set(set, nb);
    print_witness(set, w ? *w : b.witness(), out);
    return kUnsat;
  }
  verify_all(b.tree(), set);
  out << "SAT\n" << write_newick(b.tree(), set.points) << '\n';
  return kOk;
}

inline int cmd_build(const Options& o, std::ostream& out, std::ostream& err) {
  OrientedSet set = read_oriented(o.file);
  if (set.has_ktuple() && !o.ktuple) throw std::invalid_argument("file has k-tuple constraints; pass --ktuple");
  if (o.ktuple && !std::all_of(set.constraints.begin(), set.constraints.end(), [](auto& c) { return c.is_ktuple(); }))
    throw std::invalid_argument("--ktuple expects tree: lines only");
  if (set.has_three_way()) throw std::invalid_argument("build takes binary constraints; use check --nonbinary");
  BuildOutcome result = BuildOutcome::reject({});
  if (o.engine == "baseline") {
    result = o.ktuple ? check_satisfiable(set) : build_binary(set);
  } else if (o.engine == "msf") {
    MsfBuildOptions mo;
    if (o.backend == "naive") {
      mo.backend = MsfBackendKind::kNaive;
    } else if (o.backend == "fast") {
      mo.backend = MsfBackendKind::kFast;
    } else {
      throw std::invalid_argument("unknown backend '" + o.backend + "'");
    }
    mo.debug_checks = o.debug_checks;
    std::vector<std::string> trace;
    if (o.trace) mo.trace = &trace;
    result = (o.ktuple ? build_ktuple_via_msf(set, mo) : build_via_msf(set, mo)).outcome;
    for (const auto& line : trace) err << line << '\n';
  } else {
    throw std::invalid_argument("unknown engine '" + o.engine + "'");
  }
  if (!result.accepted()) {
    print_witness(set, result.witness(), out);
    return kUnsat;
  }
  verify_all(result.tree(), set);
  out << write_newick(result.tree(), set.points) << '\n';
  return kOk;
}

inline int cmd_extract(const Options& o, std::ostream& out) {
  PointSet points;
  HierarchicalTree t = parse_newick(hct::detail::trim(read_input(o.file)), points);
  out << serialize_constraints(extract_triplets(t, points));
  return kOk;
}

inline int cmd_ndim(const Options& o, std::ostream& out) {
  auto start = std::chrono::steady_clock::now();
  std::size_t d = natarajan_dimension(o.n, o.k, o.nonbinary);
  double secs = o.timing ? std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() : 0.0;
  if (o.csv) {
    out << "n,k,mode,dimension,seconds\n"
        << o.n << ',' << o.k << ',' << (o.nonbinary ? "nonbinary" : "binary") << ',' << d << ',' << fmt_double(secs, 3)
        << '\n';
  } else {
    out << d << '\n';
  }
  return kOk;
}

inline int cmd_shatter(const Options& o, std::ostream& out) {
  PointSet points = PointSet::numbered(o.n);
  if (o.chain) {
    ConstraintSet chain = construct_tuple_chain(points, o.k);
    for (const auto& t : chain.tuples) out << format_tuple(t, points) << '\n';
    auto bad = exists_contradictory_tuple_orientation(chain, o.nonbinary, kDefaultOrientationBudget);
    out << "tuples=" << chain.size() << " contradiction=" << (bad ? "true" : "false") << '\n';
    return kOk;
  }
  ShatteredConfig s = construct_shattered_set(points, o.k);
  for (const auto& p : s.pairs)
    out << format_constraint(p.f1, points) << "  /  " << format_constraint(p.f2, points) << '\n';
  bool ok = is_n_shattered(s.tuples, s.pairs, o.nonbinary);
  out << "tuples=" << s.tuples.size() << " shattered=" << (ok ? "true" : "false") << '\n';
  return kOk;
}

inline int cmd_littlestone(const Options& o, std::ostream& out) {
  LittlestoneTree L = build_littlestone_tree(o.n, o.k);
  out << "depth=" << L.depth();
  if (o.verify) out << " shattered=" << (verify_shattered(L, o.jobs) && rank_order_check(L) ? "true" : "false");
  out << '\n';
  if (o.game.empty()) return kOk;
  std::unique_ptr<OnlineLearner> learner;
  if (o.game == "constant") {
    learner = std::make_unique<ConstantLearner>();
  } else if (o.game == "halving") {
    learner = std::make_unique<HalvingLearner>(
        std::make_shared<const TreeIndex>(L.num_points(), o.k, Arity::kBinary, o.enum_cap, false, false));
  } else if (o.game == "tree-consistent") {
    learner = std::make_unique<TreeConsistentLearner>(L.num_points());
  } else {
    throw std::invalid_argument("unknown learner '" + o.game + "'");
  }
  GameResult g = adversary_game(L, *learner);
  out << "learner=" << learner->name() << " mistakes=" << g.mistakes << '\n';
  if (!o.transcript.empty()) write_output(o.transcript, game_transcript_csv(g, PointSet::numbered(L.num_points())), out);
  return kOk;
}

inline int cmd_pac(const Options& o, std::ostream& out) {
  ExperimentConfig cfg;
  auto mode = parse_pac_mode(o.mode);
  if (!mode) throw std::invalid_argument("unknown mode '" + o.mode + "'");
  cfg.mode = *mode;
  if (!o.ns.empty()) cfg.ns = o.ns;
  if (!o.k_ratios.empty()) cfg.k_ratios = o.k_ratios;
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.dimension = o.dim;
  cfg.test_size = o.test_size;
  cfg.max_children = o.max_children;
  cfg.vector_file = o.file;
  cfg.jobs = o.jobs;
  cfg.timing = o.timing;
  if (o.threshold) {
    if (cfg.mode != PacMode::kAgnosticVectors && cfg.mode != PacMode::kAgnosticHierarchical)
      throw std::invalid_argument("--threshold needs an agnostic vector mode");
    ThresholdReport r = contradiction_threshold(cfg);
    write_output(o.out_csv, threshold_csv(r), out);
    if (!o.aggregate_csv_path.empty()) {
      std::string agg = "n,mean,mean_over_n\n";
      for (auto [n, m] : r.mean)
        agg += std::to_string(n) + "," + fmt_double(m) + "," + fmt_double(m / static_cast<double>(n)) + "\n";
      write_output(o.aggregate_csv_path, agg, out);
    }
    return kOk;
  }
  ErrorReport r = run_experiment(cfg);
  write_output(o.out_csv, report_csv(r), out);
  if (!o.aggregate_csv_path.empty()) write_output(o.aggregate_csv_path, aggregate_csv(r), out);
  if (!o.svg.empty()) write_output(o.svg, report_svg(r), out);
  return kOk;
}

// Random consistent split pairs through both engines, timed.
inline int cmd_bench(const Options& o, std::ostream& out) {
  if (o.n < 3) throw std::invalid_argument("--n must be at least 3");
  Rng rng(o.seed);
  HierarchicalTree truth = random_binary_tree(o.n, rng);
  OrientedSet set = sample_training(o.n, o.m == 0 ? 10 * o.n : o.m, tree_labeler(truth), rng);
  out << "engine,backend,n,m,result,seconds\n";
  auto row = [&](const std::string& engine, const std::string& backend, auto&& run) {
    auto start = std::chrono::steady_clock::now();
    BuildOutcome b = run();
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (b.accepted()) verify_all(b.tree(), set);
    out << engine << ',' << backend << ',' << o.n << ',' << set.size() << ',' << (b.accepted() ? "sat" : "unsat")
        << ',' << fmt_double(s, 3) << '\n';
  };
  row("baseline", "-", [&] { return build_binary(set); });
  std::vector<std::string> backends;
  if (o.backend == "both") {
    backends = {"naive", "fast"};
  } else {
    backends = {o.backend};
  }
  for (const auto& be : backends) {
    MsfBuildOptions mo;
    if (be == "naive") {
      mo.backend = MsfBackendKind::kNaive;
    } else if (be == "fast") {
      mo.backend = MsfBackendKind::kFast;
    } else {
      throw std::invalid_argument("unknown backend '" + be + "'");
    }
    row("msf", be, [&] { return build_via_msf(set, mo).outcome; });
  }
  return kOk;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  try {
    o.seed = default_seed();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  CLI::App app{"Hierarchical clustering from triplet constraints"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  auto common = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "Random seed (default: $HCT_SEED or 1)");
    c->add_option("--jobs", o.jobs, "Worker threads; 0 = hardware default, 1 = serial");
    c->add_flag("--timing", o.timing, "Fill wall-clock columns (outputs are no longer byte-stable)");
    c->add_option("--config", o.config, "key=value file preloading flags; explicit flags win");
  };

  auto* check = app.add_subcommand("check", "Decide satisfiability; print a tree or a closed-set witness");
  check->add_option("file", o.file, "Constraint file ('-' for stdin)")->required();
  check->add_flag("--nonbinary", o.nonbinary, "Allow multiway trees (implied by three-way lines)");
  common(check);

  auto* build = app.add_subcommand("build", "Build a binary tree with the chosen engine");
  build->add_option("file", o.file, "Constraint file ('-' for stdin)")->required();
  build->add_option("--engine", o.engine, "baseline | msf")->check(CLI::IsMember({"baseline", "msf"}));
  build->add_option("--backend", o.backend, "Forest backend for msf: naive | fast")
      ->check(CLI::IsMember({"naive", "fast"}));
  build->add_flag("--trace", o.trace, "Print the edge deletion log to stderr (msf engine)");
  build->add_flag("--ktuple", o.ktuple, "Input is tree: lines with binary shapes");
  build->add_flag("--debug-checks", o.debug_checks, "Assert the round invariants (msf engine)");
  common(build);

  auto* extract = app.add_subcommand("extract", "Print every triple's relation in a Newick tree");
  extract->add_option("file", o.file, "Newick file ('-' for stdin)")->required();
  common(extract);

  auto* ndim = app.add_subcommand("ndim", "Natarajan dimension of trees on n points over k-tuples");
  ndim->add_option("--n", o.n, "Number of points")->required();
  ndim->add_option("--k", o.k, "Tuple size");
  ndim->add_flag("--nonbinary", o.nonbinary, "Multiway trees");
  ndim->add_flag("--csv", o.csv, "CSV output");
  common(ndim);

  auto* shatter = app.add_subcommand("shatter", "Build and check an N-shattered tuple set, or the tuple chain");
  shatter->add_option("--n", o.n, "Number of points")->required();
  shatter->add_option("--k", o.k, "Tuple size");
  shatter->add_flag("--chain", o.chain, "Search the tuple chain for a contradictory orientation instead");
  shatter->add_flag("--nonbinary", o.nonbinary, "Multiway trees");
  common(shatter);

  auto* little = app.add_subcommand("littlestone", "Build the ladder tree; optionally verify it or play the game");
  little->add_option("--n", o.n, "Number of points (rounded down to a power of k)")->required();
  little->add_option("--k", o.k, "Ladder size");
  little->add_flag("--verify", o.verify, "Check every path and the rank-order property");
  little->add_option("--game", o.game, "constant | halving | tree-consistent")
      ->check(CLI::IsMember({"constant", "halving", "tree-consistent"}));
  little->add_option("--transcript", o.transcript, "Write the game transcript CSV here ('-' for stdout)");
  little->add_option("--enum-cap", o.enum_cap, "Largest n the halving learner may enumerate");
  common(little);

  auto* pac = app.add_subcommand("pac", "Sampling experiments: error against samples per point");
  pac->add_option("--mode", o.mode, "realizable | agnostic-vectors | agnostic-hierarchical | agnostic-file | nonbinary");
  pac->add_option("--n", o.ns, "Point counts")->delimiter(',');
  pac->add_option("--k-ratio", o.k_ratios, "Samples per point")->delimiter(',');
  pac->add_option("--trials", o.trials, "Trials per cell");
  pac->add_option("--dim", o.dim, "Vector dimension");
  pac->add_option("--test-size", o.test_size, "Test triples per trial");
  pac->add_option("--max-children", o.max_children, "Largest fan-out of the nonbinary ground truth");
  pac->add_option("--file", o.file, "Vector CSV for agnostic-file");
  pac->add_flag("--threshold", o.threshold, "Count samples until the first contradiction instead");
  pac->add_option("--out", o.out_csv, "Per-trial CSV (default stdout)");
  pac->add_option("--aggregate", o.aggregate_csv_path, "Aggregate CSV");
  pac->add_option("--svg", o.svg, "Line chart");
  common(pac);

  auto* bench = app.add_subcommand("bench", "Time both engines on random consistent constraints");
  bench->add_option("--n", o.n, "Number of points")->required();
  bench->add_option("--m", o.m, "Number of constraints (default 10n)");
  bench->add_option("--backend", o.backend, "naive | fast | both")->check(CLI::IsMember({"naive", "fast", "both"}));
  common(bench);

  // A --config file is spliced in right after the subcommand name.
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    for (std::size_t i = 0; i < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config" && i + 1 < args.size()) {
        path = args[i + 1];
      } else if (args[i].rfind("--config=", 0) == 0) {
        path = args[i].substr(9);
      }
      if (path.empty()) continue;
      auto extra = config_arguments(path);
      args.insert(args.begin() + (args.empty() ? 0 : 1), extra.begin(), extra.end());
      break;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*check) return cmd_check(o, out);
    if (*build) return cmd_build(o, out, err);
    if (*extract) return cmd_extract(o, out);
    if (*ndim) return cmd_ndim(o, out);
    if (*shatter) return cmd_shatter(o, out);
    if (*little) return cmd_littlestone(o, out);
    if (*pac) return cmd_pac(o, out);
    if (*bench) return cmd_bench(o, out);
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded [" << e.cap() << "]: " << e.what() << '\n';
    return kBudget;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace hct::cli
