#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rtgibbs/analysis.hpp"
#include "rtgibbs/io.hpp"
#include "support/oracles.hpp"
#include "support/random_fixtures.hpp"

namespace fs = std::filesystem;
using rtgibbs::Index;
using rtgibbs::MatrixX;

namespace {

const fs::path kWork = fs::temp_directory_path() / "rtgibbs_cli_tests";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RTGIBBS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct WorkDir {
  WorkDir() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
};

}  // namespace

TEST_CASE("CSV round trip is exact at 17 significant digits") {
  WorkDir wd;
  rtgibbs::RngStream rng(91, 0);
  MatrixX<double> m = fixtures::random_gaussian(7, 5, rng);
  m(0, 0) = 1.0 / 3.0;
  m(1, 1) = 1e-17;
  m(2, 2) = -12345.678901234567;
  const fs::path path = kWork / "roundtrip.csv";
  rtgibbs::write_csv_matrix(path, m);
  const auto back = rtgibbs::read_csv_matrix(path);
  REQUIRE(back.rows() == m.rows());
  REQUIRE(back.cols() == m.cols());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) CHECK(back(i, j) == m(i, j));
}

TEST_CASE("CSV reader rejects ragged and non-numeric input") {
  WorkDir wd;
  {
    std::ofstream out(kWork / "ragged.csv");
    out << "1,2,3\n4,5\n";
  }
  CHECK_THROWS_AS(rtgibbs::read_csv_matrix(kWork / "ragged.csv"), rtgibbs::data_error);
  {
    std::ofstream out(kWork / "alpha.csv");
    out << "1,2\n3,x\n";
  }
  CHECK_THROWS_AS(rtgibbs::read_csv_matrix(kWork / "alpha.csv"), rtgibbs::data_error);
  CHECK_THROWS_AS(rtgibbs::read_csv_matrix(kWork / "missing.csv"), rtgibbs::data_error);
}

TEST_CASE("draws file round trip and checksum verification") {
  WorkDir wd;
  rtgibbs::RngStream rng(92, 0);
  std::vector<MatrixX<double>> draws;
  for (int i = 0; i < 5; ++i) draws.push_back(fixtures::random_spd(4, rng));

  const fs::path path = kWork / "draws.bin";
  rtgibbs::DrawsWriter writer(path, 4);
  for (const auto& d : draws) writer.append(d);
  writer.close();

  const auto back = rtgibbs::read_draws(path, 4, writer.count(), writer.checksum());
  REQUIRE(back.size() == draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i)
    CHECK((back[i] - draws[i]).cwiseAbs().maxCoeff() == 0.0);

  // corrupt one byte: the checksum must catch it
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(13);
    char b;
    f.seekg(13);
    f.get(b);
    b = static_cast<char>(b ^ 0x40);
    f.seekp(13);
    f.put(b);
  }
  CHECK_THROWS_AS(rtgibbs::read_draws(path, 4, writer.count(), writer.checksum()),
                  rtgibbs::data_error);
}

TEST_CASE("simulate writes truth, replicates and a manifest, deterministically") {
  WorkDir wd;
  const auto out1 = (kWork / "sim1").string();
  const auto out2 = (kWork / "sim2").string();
  REQUIRE(run_cli("simulate --structure tridiagonal --p 10 --n 20 --replicates 2 --seed 7 --out " +
                  out1) == 0);
  CHECK(fs::exists(fs::path(out1) / "theta0.csv"));
  CHECK(fs::exists(fs::path(out1) / "data_rep0.csv"));
  CHECK(fs::exists(fs::path(out1) / "data_rep1.csv"));
  CHECK(fs::exists(fs::path(out1) / "manifest.json"));

  REQUIRE(run_cli("simulate --structure tridiagonal --p 10 --n 20 --replicates 2 --seed 7 --out " +
                  out2) == 0);
  CHECK(slurp(fs::path(out1) / "data_rep0.csv") == slurp(fs::path(out2) / "data_rep0.csv"));
  CHECK(slurp(fs::path(out1) / "data_rep1.csv") == slurp(fs::path(out2) / "data_rep1.csv"));

  // configuration errors exit with code 2
  CHECK(run_cli("simulate --structure hubs --p 15 --n 10 --out " + (kWork / "bad").string()) == 2);
  CHECK(run_cli("simulate --structure nosuch --p 10 --n 10 --out " + (kWork / "bad2").string()) ==
        2);
}

TEST_CASE("sample end to end: outputs, draws, summarize idempotence, ci monotonicity") {
  WorkDir wd;
  const auto sim = (kWork / "sim").string();
  REQUIRE(run_cli("simulate --structure tridiagonal --p 6 --n 40 --replicates 1 --seed 3 --out " +
                  sim) == 0);

  const auto run = (kWork / "run").string();
  REQUIRE(run_cli("sample --input " + sim + "/data_rep0.csv" +
                  " --prior ghs --sampler rt --iters 400 --burnin 100 --seed 9 --store-draws --out " +
                  run) == 0);
  for (const char* f : {"mean.csv", "q25.csv", "q50.csv", "q75.csv", "edges.csv",
                        "loglik_trace.csv", "draws.bin", "manifest.json"})
    CHECK(fs::exists(fs::path(run) / f));

  const auto mean = rtgibbs::read_csv_matrix(fs::path(run) / "mean.csv");
  CHECK(mean.rows() == 6);
  CHECK(rtgibbs::is_symmetric(mean, 1e-12));

  // loglik trace has one row per iteration plus a header
  const auto trace = slurp(fs::path(run) / "loglik_trace.csv");
  CHECK(std::count(trace.begin(), trace.end(), '\n') == 401);

  // summarize reproduces the inline summaries byte for byte
  const auto re = (kWork / "re").string();
  REQUIRE(run_cli("summarize --from " + run + " --out " + re) == 0);
  CHECK(slurp(fs::path(re) / "mean.csv") == slurp(fs::path(run) / "mean.csv"));
  CHECK(slurp(fs::path(re) / "q25.csv") == slurp(fs::path(run) / "q25.csv"));
  CHECK(slurp(fs::path(re) / "edges.csv") == slurp(fs::path(run) / "edges.csv"));

  // widening the interval can only shrink the edge list
  const auto wide = (kWork / "wide").string();
  REQUIRE(run_cli("summarize --from " + run + " --ci 0.9 --out " + wide) == 0);
  CHECK(fs::exists(fs::path(wide) / "q5.csv"));
  CHECK(fs::exists(fs::path(wide) / "q95.csv"));
  const auto edges_n = [](const std::string& text) {
    return std::count(text.begin(), text.end(), '\n') - 1;
  };
  CHECK(edges_n(slurp(fs::path(wide) / "edges.csv")) <= edges_n(slurp(fs::path(run) / "edges.csv")));

  // corrupting the draws file breaks summarize with a data error
  {
    std::fstream f(fs::path(run) / "draws.bin", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(40);
    f.put('\x7f');
  }
  CHECK(run_cli("summarize --from " + run + " --out " + (kWork / "corrupt").string()) == 3);
}

TEST_CASE("sample validates sources and data") {
  WorkDir wd;
  // both sources at once
  CHECK(run_cli("sample --input a.csv --structure tridiagonal --p 4 --n 10 --out " +
                (kWork / "x1").string()) == 2);
  // neither source
  CHECK(run_cli("sample --out " + (kWork / "x2").string()) == 2);
  // missing file is a data error
  CHECK(run_cli("sample --input " + (kWork / "nope.csv").string() + " --out " +
                (kWork / "x3").string()) == 3);
  // constant column under standardization is a data error
  {
    std::ofstream out(kWork / "const.csv");
    for (int i = 0; i < 12; ++i) out << "1.0," << 0.1 * i << "\n";
  }
  CHECK(run_cli("sample --input " + (kWork / "const.csv").string() + " --standardize --out " +
                (kWork / "x4").string()) == 3);
  // unknown flag is a configuration error
  CHECK(run_cli("sample --no-such-flag --out " + (kWork / "x5").string()) == 2);
}

TEST_CASE("p = 1 sample recovers the conjugate posterior mean") {
  WorkDir wd;
  rtgibbs::RngStream rng(93, 0);
  MatrixX<double> y(30, 1);
  for (Index i = 0; i < 30; ++i) y(i, 0) = rng.normal();
  rtgibbs::write_csv_matrix(kWork / "y1.csv", y);
  const double exact = (30.0 / 2.0 + 1.0) / (y.col(0).squaredNorm() / 2.0);

  const auto run = (kWork / "p1").string();
  REQUIRE(run_cli("sample --input " + (kWork / "y1.csv").string() +
                  " --sampler rt --iters 6000 --burnin 1000 --seed 4 --out " + run) == 0);
  const auto mean = rtgibbs::read_csv_matrix(fs::path(run) / "mean.csv");
  // loose analytic check; the unit-level version asserts the exact 3 MCSE band
  CHECK(std::abs(mean(0, 0) - exact) / exact < 0.05);
}

TEST_CASE("benchmark subcommand writes reports and prints exponents") {
  WorkDir wd;
  const auto out = (kWork / "bench").string();
  REQUIRE(run_cli("benchmark --dims 15:8,15:12 --structures tridiagonal --priors ghs "
                  "--replicates 1 --iters 60 --burnin 20 --seed 2 --out " +
                  out) == 0);
  CHECK(fs::exists(fs::path(out) / "metrics.csv"));
  CHECK(fs::exists(fs::path(out) / "runtime.csv"));
  CHECK(fs::exists(fs::path(out) / "summary_tridiagonal_ghs.csv"));
  CHECK(fs::exists(fs::path(out) / "manifest.json"));

  CHECK(run_cli("benchmark --dims nonsense --out " + (kWork / "bb").string()) == 2);
}
