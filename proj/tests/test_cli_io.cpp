#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <unistd.h>

#include "spherecover/cli.hpp"
#include "spherecover/construct.hpp"
#include "spherecover/io.hpp"

using namespace spherecover;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "spherecover");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("spherecover_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST(CoveringText, RoundTripIsExact) {
  const SphereSpec s(3, 1.5);
  Covering cov = grid_base_covering(s, 0.6);
  cov.provenance.seed = 42;
  cov.provenance.parents = {"eps_net:grid:0.10000000000000001:0:0", "mu_net:random:0.3:7:0.001"};
  const std::string text = write_covering_text(cov);
  const Covering back = read_covering_text(text);
  EXPECT_EQ(back, cov);
  EXPECT_EQ(write_covering_text(back), text);
  EXPECT_TRUE(text.starts_with("format_version: 1\n"));
}

TEST(CoveringText, RejectsMalformedInput) {
  const SphereSpec s(3, 1.5);
  const std::string good = write_covering_text(grid_base_covering(s, 1.2));
  auto replace = [&](const std::string& from, const std::string& to) {
    std::string t = good;
    t.replace(t.find(from), from.size(), to);
    return t;
  };
  EXPECT_THROW(read_covering_text(replace("format_version: 1", "format_version: 2")), std::invalid_argument);
  EXPECT_THROW(read_covering_text(replace("kind: covering", "kind: other")), std::invalid_argument);
  EXPECT_THROW(read_covering_text(replace("mode: grid", "mode: grid\ncolour: blue")), std::invalid_argument);
  EXPECT_THROW(read_covering_text(replace("center_count: ", "center_count: 1")), std::invalid_argument);
  EXPECT_THROW(read_covering_text(good.substr(0, good.size() - 10)), std::invalid_argument);
  EXPECT_THROW(read_covering_text(""), std::invalid_argument);
}

TEST(BoundsCsv, HeaderAndRow) {
  EXPECT_EQ(bounds_csv_header(), "n,lower(c1),d-sphe,est0,d-sph,d-ball,psi,phi,omega_relaxed\n");
  const std::string row = bounds_csv_row(breakdown(100));
  EXPECT_TRUE(row.starts_with("100,100,881.92430143670"));
}

TEST(Cli, ParamsGoldenValues) {
  const CliRun r = run({"params", "--n", "100", "--mode", "v2"});
  EXPECT_EQ(r.code, kExitPass);
  EXPECT_TRUE(contains(r.out, "s: 21\n"));
  EXPECT_TRUE(contains(r.out, "trials_exact: false\n"));
  EXPECT_TRUE(contains(r.out, "epsilon: 1.08573620475812"));
  const CliRun e = run({"params", "--n", "3", "--mode", "engineering", "--eps", "0.1", "--mu", "0.3"});
  EXPECT_EQ(e.code, kExitPass);
  EXPECT_TRUE(contains(e.out, "trials: 184\n"));
  const CliRun csv = run({"params", "--n", "100", "--mode", "v1", "--format", "csv"});
  EXPECT_EQ(csv.code, kExitPass);
  EXPECT_EQ(std::count(csv.out.begin(), csv.out.end(), '\n'), 2);
}

TEST(Cli, BoundsTableAndCrossovers) {
  const CliRun csv = run({"bounds", "--n-from", "3", "--n-to", "100", "--format", "csv"});
  EXPECT_EQ(csv.code, kExitPass);
  EXPECT_EQ(std::count(csv.out.begin(), csv.out.end(), '\n'), 99);
  EXPECT_TRUE(contains(csv.out, "100,100,881.92430143670"));
  const CliRun text = run({"bounds", "--n-from", "3", "--n-to", "5000"});
  EXPECT_EQ(text.code, kExitPass);
  EXPECT_TRUE(contains(text.out, "crossover d-sph < est0: 3681\n"));
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"params", "--n", "2", "--mode", "v2"}).code, kExitUsage);
  EXPECT_EQ(run({"params", "--n", "100", "--seed", "3"}).code, kExitUsage);  // not a params flag
  EXPECT_EQ(run({"params", "--n", "100", "--mode", "v2", "--eps", "0.1"}).code, kExitUsage);
  EXPECT_EQ(run({"params", "--n", "100", "--mode", "v9"}).code, kExitUsage);
  EXPECT_EQ(run({"params", "--n", "100", "--mode", "v2", "--r", "1"}).code, kExitUsage);
  EXPECT_EQ(run({"bounds", "--n-from", "10", "--n-to", "5"}).code, kExitUsage);
  EXPECT_EQ(run({"cover", "--verify-only"}).code, kExitUsage);
  EXPECT_EQ(run({"oracle", "--n", "3", "--r", "2", "--rho", "3"}).code, kExitUsage);
  const CliRun bad = run({"params", "--n", "x"});
  EXPECT_EQ(bad.code, kExitUsage);
  EXPECT_FALSE(bad.err.empty());
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, kExitPass); }

TEST(Cli, CoverIsByteIdenticalAndReverifies) {
  TempDir dir;
  const std::vector<std::string> args = {"cover", "--n", "3", "--r", "1.5", "--mode", "engineering", "--eps", "0.1",
                                         "--mu", "0.3", "--seed", "7", "--samples", "100000",
                                         "--out-dir", dir.path().string()};
  const CliRun first = run(args);
  ASSERT_EQ(first.code, kExitPass) << first.err;
  const fs::path cov_path = dir.path() / "two-level_n3_r1.5_seed7.covering.txt";
  const fs::path rep_path = dir.path() / "two-level_n3_r1.5_seed7.report.txt";
  ASSERT_TRUE(fs::exists(cov_path));
  ASSERT_TRUE(fs::exists(rep_path));
  const std::string cov1 = read_file(cov_path), rep1 = read_file(rep_path);
  EXPECT_TRUE(contains(rep1, "net.passed: true"));
  EXPECT_TRUE(contains(rep1, "mc.uncovered_count: 0\n"));

  const CliRun second = run(args);
  ASSERT_EQ(second.code, kExitPass);
  EXPECT_EQ(read_file(cov_path), cov1);
  EXPECT_EQ(read_file(rep_path), rep1);

  const Covering cov = read_covering_text(cov1);
  EXPECT_EQ(cov.provenance.mode, "two-level");
  EXPECT_EQ(cov.provenance.parents.size(), 2u);

  const CliRun again = run({"cover", "--verify-only", "--input", cov_path.string(), "--samples", "20000",
                            "--out-dir", dir.path().string()});
  EXPECT_EQ(again.code, kExitPass) << again.err;
  EXPECT_TRUE(fs::exists(dir.path() / "two-level_n3_r1.5_seed7.covering.verify.txt"));
}

TEST(Cli, VerifyOnlyRejectsADamagedCovering) {
  TempDir dir;
  const SphereSpec s(3, 1.5);
  // Too few caps: one hemisphere-sized cap of half-chord 1.
  PointSet one(4);
  one.push_back(std::vector<double>{1.5, 0, 0, 0});
  Covering cov(s, 1.0, one);
  cov.provenance.mode = "two-level";
  cov.provenance.parents = {format_base_spec(BaseSpec{"eps_net", "grid", 0.1, 0, 0.0})};
  const fs::path path = dir.path() / "damaged.covering.txt";
  atomic_write(path, write_covering_text(cov));
  const CliRun r = run({"cover", "--verify-only", "--input", path.string(), "--samples", "1000", "--out-dir",
                        dir.path().string()});
  EXPECT_EQ(r.code, kExitVerificationFailed);
}

TEST(Cli, LemmaAndOracleExitCodes) {
  const CliRun lemma = run({"lemma", "--n", "50", "--samples", "5000"});
  EXPECT_EQ(lemma.code, kExitPass) << lemma.err;
  EXPECT_TRUE(contains(lemma.out, "lemma_lower.uncovered_count: 0\n"));
  EXPECT_TRUE(contains(lemma.out, "moderation.est0_vs_fixpoint.holds: false\n"));
  const CliRun oracle = run({"oracle", "--n", "3", "--r", "2", "--rho", "1", "--samples", "200000"});
  EXPECT_EQ(oracle.code, kExitPass);
  EXPECT_TRUE(contains(oracle.out, "agrees_3sigma: true"));
}

TEST(AtomicWrite, ReplacesContent) {
  TempDir dir;
  const fs::path p = dir.path() / "x.txt";
  atomic_write(p, "one");
  atomic_write(p, "two");
  EXPECT_EQ(read_file(p), "two");
  EXPECT_EQ(std::distance(fs::directory_iterator(dir.path()), fs::directory_iterator{}), 1);
  EXPECT_THROW(read_file(dir.path() / "missing"), std::runtime_error);
}
