#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "../tools/cli_app.hpp"

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "hct");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = hct::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(HCT_DATA_DIR) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& body) {
  auto p = std::filesystem::temp_directory_path() / ("hct_cli_test_" + name);
  std::ofstream(p) << body;
  return p.string();
}

}  // namespace

TEST(CliCheck, CyclicFourIsUnsatWithWitness) {
  auto r = run({"check", data("cyclic_four.txt")});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out.rfind("UNSAT\nwitness: a b c d\n", 0), 0u) << r.out;
}

TEST(CliCheck, SingleTripletAndTwoQueries) {
  auto r = run({"check", data("single.txt")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "SAT\n((a,b),c);\n");
  auto q = run({"check", data("two_queries.txt")});
  EXPECT_EQ(q.code, 0);
  EXPECT_EQ(q.out.rfind("SAT\n", 0), 0u);
}

TEST(CliCheck, NonbinaryAndKTupleInputs) {
  auto m = run({"check", data("mixed_nonbinary.txt")});
  EXPECT_EQ(m.code, 0) << m.err;
  auto k = run({"check", data("four_tuples.txt")});
  EXPECT_EQ(k.code, 0) << k.err;
}

TEST(CliCheck, ParseErrorsExitTwoWithLine) {
  auto f = temp_file("bad.txt", "a b | c\na b c | d\n");
  auto r = run({"check", f});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
  EXPECT_EQ(run({"check", "/nonexistent/file.txt"}).code, 2);
}

TEST(CliBuild, EnginesAgree) {
  for (std::string file : {"single.txt", "two_queries.txt", "cyclic_four.txt"}) {
    auto base = run({"build", data(file)});
    auto naive = run({"build", "--engine", "msf", "--backend", "naive", data(file)});
    auto fast = run({"build", "--engine", "msf", "--backend", "fast", data(file)});
    EXPECT_EQ(base.code, naive.code) << file;
    EXPECT_EQ(base.code, fast.code) << file;
    EXPECT_EQ(naive.out, fast.out) << file;
  }
  EXPECT_EQ(run({"build", data("cyclic_four.txt")}).code, 1);
}

TEST(CliBuild, TraceGoesToStderr) {
  auto r = run({"build", "--engine", "msf", "--trace", data("single.txt")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("del 1 kind=red replaced=none\n"), std::string::npos) << r.err;
  EXPECT_NE(r.out.find("((a,b),c);"), std::string::npos);
}

TEST(CliBuild, KTupleEngine) {
  auto r = run({"build", "--engine", "msf", "--ktuple", data("four_tuples.txt")});
  EXPECT_EQ(r.code, 0) << r.err;
  auto bad = run({"build", "--engine", "warp", data("single.txt")});
  EXPECT_EQ(bad.code, 2);
}

TEST(CliExtract, RoundTripsThroughCheck) {
  auto e = run({"extract", data("abc.nwk")});
  EXPECT_EQ(e.code, 0);
  EXPECT_EQ(e.out, "a b | c\n");
  auto seven = run({"extract", data("seven.nwk")});
  ASSERT_EQ(seven.code, 0);
  EXPECT_EQ(std::count(seven.out.begin(), seven.out.end(), '\n'), 35);
  auto f = temp_file("seven.txt", seven.out);
  auto c = run({"check", f});
  EXPECT_EQ(c.code, 0);
  std::ifstream in(data("seven.nwk"));
  std::string nwk((std::istreambuf_iterator<char>(in)), {});
  hct::PointSet ps;
  auto t = hct::parse_newick(std::string(hct::detail::trim(nwk)), ps);
  EXPECT_EQ(c.out, "SAT\n" + hct::write_newick(t, ps) + "\n");
  auto star = run({"extract", data("star.nwk")});
  std::istringstream lines(star.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    ++count;
    EXPECT_EQ(std::count(line.begin(), line.end(), '|'), 2) << line;
  }
  EXPECT_EQ(count, 4);
}

TEST(CliNdim, SmallValues) {
  EXPECT_EQ(run({"ndim", "--n", "4", "--k", "3"}).out, "2\n");
  EXPECT_EQ(run({"ndim", "--n", "4", "--k", "3", "--nonbinary"}).out, "2\n");
  EXPECT_EQ(run({"ndim", "--n", "5", "--k", "3", "--csv"}).out, "n,k,mode,dimension,seconds\n5,3,binary,3,0.000\n");
}

TEST(CliNdim, CapExitsThreeNamingTheCap) {
  auto r = run({"ndim", "--n", "9", "--k", "3"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("natarajan-cap"), std::string::npos);
}

TEST(CliLittlestone, DepthAndVerification) {
  auto r = run({"littlestone", "--n", "9", "--k", "3", "--verify"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "depth=6 shattered=true\n");
  EXPECT_EQ(run({"littlestone", "--n", "8", "--k", "2"}).out, "depth=12\n");
  auto big = run({"littlestone", "--n", "27", "--k", "3"});
  EXPECT_EQ(big.code, 3);
  EXPECT_NE(big.err.find("depth"), std::string::npos) << big.err;
}

TEST(CliLittlestone, GameAndTranscript) {
  auto r = run({"littlestone", "--n", "9", "--k", "3", "--game", "tree-consistent", "--transcript", "-"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("learner=tree-consistent mistakes=6"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("round,tuple,prediction,label,mistake\n"), std::string::npos);
  auto h = run({"littlestone", "--n", "9", "--k", "3", "--game", "halving"});
  EXPECT_EQ(h.code, 3);
  EXPECT_NE(h.err.find("enumeration-cap"), std::string::npos);
  auto h5 = run({"littlestone", "--n", "3", "--k", "3", "--game", "halving"});
  EXPECT_EQ(h5.code, 0);
  EXPECT_NE(h5.out.find("mistakes=1"), std::string::npos) << h5.out;
}

TEST(CliShatter, ConstructionAndChain) {
  auto s = run({"shatter", "--n", "6", "--k", "3"});
  EXPECT_NE(s.out.find("tuples=4 shattered=true"), std::string::npos) << s.out;
  auto c = run({"shatter", "--n", "6", "--k", "4", "--chain"});
  EXPECT_NE(c.out.find("tuples=2 contradiction=false"), std::string::npos) << c.out;
}

TEST(CliPac, TenRowsAndRerunIdentical) {
  std::vector<std::string> args{"pac", "--mode", "realizable", "--n", "100", "--k-ratio", "4", "--trials", "10", "--seed", "7"};
  auto a = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 11);
  EXPECT_EQ(a.out, run(args).out);
  args.push_back("--jobs");
  args.push_back("1");
  EXPECT_EQ(a.out, run(args).out);
}

TEST(CliPac, FilesAndThreshold) {
  auto dir = std::filesystem::temp_directory_path();
  auto csv = (dir / "hct_cli_rows.csv").string(), agg = (dir / "hct_cli_agg.csv").string(),
       svg = (dir / "hct_cli.svg").string();
  auto r = run({"pac", "--mode", "nonbinary", "--n", "30", "--k-ratio", "1,2", "--trials", "2", "--out", csv,
                "--aggregate", agg, "--svg", svg});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::file_size(csv) > 0);
  EXPECT_TRUE(std::filesystem::file_size(agg) > 0);
  EXPECT_TRUE(std::filesystem::file_size(svg) > 0);
  auto t = run({"pac", "--mode", "agnostic-vectors", "--n", "20", "--threshold", "--trials", "2"});
  EXPECT_EQ(t.out.rfind("n,trial,count\n", 0), 0u);
  auto f = run({"pac", "--mode", "agnostic-file", "--file", data("vectors.csv"), "--k-ratio", "2", "--trials", "1"});
  EXPECT_EQ(f.code, 0) << f.err;
  EXPECT_NE(f.out.find("agnostic-file,12,2,0,"), std::string::npos) << f.out;
  EXPECT_EQ(run({"pac", "--mode", "nope"}).code, 2);
  EXPECT_EQ(run({"pac", "--trials", "0"}).code, 2);
}

TEST(CliConfig, FilePreloadsAndFlagsWin) {
  auto conf = temp_file("run.conf", "# sweep\nmode=realizable\nn=30\nk-ratio=2\ntrials=3\nseed=7\n");
  auto a = run({"pac", "--config", conf});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 4);
  auto b = run({"pac", "--config", conf, "--trials", "1"});
  EXPECT_EQ(std::count(b.out.begin(), b.out.end(), '\n'), 2);
  auto direct = run({"pac", "--n", "30", "--k-ratio", "2", "--trials", "3", "--seed", "7"});
  EXPECT_EQ(a.out, direct.out);
  auto bad = temp_file("bad.conf", "trials\n");
  EXPECT_EQ(run({"pac", "--config", bad}).code, 2);
  auto shipped = run({"pac", "--config", data("realizable.conf"), "--n", "30", "--trials", "1"});
  EXPECT_EQ(shipped.code, 0) << shipped.err;
}

TEST(CliConfig, SeedFromEnvironment) {
  std::vector<std::string> args{"pac", "--n", "30", "--k-ratio", "2", "--trials", "1"};
  ::setenv("HCT_SEED", "7", 1);
  auto env = run(args);
  ::unsetenv("HCT_SEED");
  args.push_back("--seed");
  args.push_back("7");
  EXPECT_EQ(env.out, run(args).out);
  ::setenv("HCT_SEED", "x7", 1);
  EXPECT_EQ(run({"pac", "--n", "30", "--trials", "1"}).code, 2);
  ::unsetenv("HCT_SEED");
}

TEST(CliBench, ReportsBothBackends) {
  auto r = run({"bench", "--n", "200", "--m", "400", "--backend", "both"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("msf,naive,200,400,sat,"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("msf,fast,200,400,sat,"), std::string::npos) << r.out;
}

TEST(CliHelp, ListsSubcommands) {
  auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  for (std::string sub : {"check", "build", "extract", "ndim", "shatter", "littlestone", "pac", "bench"})
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
  auto p = run({"pac", "--help"});
  EXPECT_EQ(p.code, 0);
  EXPECT_NE(p.out.find("--k-ratio"), std::string::npos);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"check"}).code, 2);
}
