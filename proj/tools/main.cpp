// rtgibbs: posterior sampling for sparse Gaussian graphical models with
// element-wise shrinkage priors, via the reverse-telescoping and cyclical
// Gibbs samplers, plus a benchmark harness for their runtime scaling.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rtgibbs/analysis.hpp"
#include "rtgibbs/benchmark.hpp"
#include "rtgibbs/chain.hpp"
#include "rtgibbs/cyclical_sampler.hpp"
#include "rtgibbs/errors.hpp"
#include "rtgibbs/io.hpp"
#include "rtgibbs/priors.hpp"
#include "rtgibbs/rt_sampler.hpp"
#include "rtgibbs/simulation.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using rtgibbs::Index;
using rtgibbs::MatrixX;
using rtgibbs::VectorX;

namespace {

constexpr const char* kVersion = "0.1.0";

// exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric failure
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

std::string quantile_label(double q) {
  const double pct = q * 100.0;
  std::ostringstream os;
  if (std::abs(pct - std::round(pct)) < 1e-9)
    os << static_cast<long long>(std::llround(pct));
  else
    os << pct;
  return os.str();
}

void write_manifest(const fs::path& dir, json manifest) {
  manifest["tool"] = "rtgibbs";
  manifest["version"] = kVersion;
  const std::string config_dump = manifest.value("config", json::object()).dump();
  manifest["config_hash"] = hex64(rtgibbs::fnv1a64(config_dump.data(), config_dump.size()));
  std::ofstream out(dir / "manifest.json");
  if (!out) throw rtgibbs::data_error("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

json file_entry(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  return json{{"name", path.filename().string()},
              {"bytes", bytes.size()},
              {"checksum", hex64(rtgibbs::fnv1a64(bytes.data(), bytes.size()))}};
}

MatrixX<double> standardize_columns(const MatrixX<double>& y) {
  MatrixX<double> out = y;
  const auto n = static_cast<double>(y.rows());
  if (y.rows() < 2) throw rtgibbs::data_error("standardize: need at least 2 rows");
  for (Index j = 0; j < y.cols(); ++j) {
    const double mean = y.col(j).mean();
    const double ss = (y.col(j).array() - mean).square().sum();
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 0.0))
      throw rtgibbs::data_error("standardize: column " + std::to_string(j + 1) +
                                " has zero variance");
    out.col(j) = (y.col(j).array() - mean) / sd;
  }
  return out;
}

rtgibbs::PriorKind parse_prior(const std::string& name) {
  if (name == "ghs") return rtgibbs::PriorKind::GHS;
  if (name == "bgl") return rtgibbs::PriorKind::BGL;
  throw rtgibbs::config_error("unknown prior: " + name + " (expected ghs or bgl)");
}

rtgibbs::SamplerKind parse_sampler(const std::string& name) {
  if (name == "rt") return rtgibbs::SamplerKind::RT;
  if (name == "cyclical") return rtgibbs::SamplerKind::Cyclical;
  throw rtgibbs::config_error("unknown sampler: " + name + " (expected rt or cyclical)");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
  std::string structure = "tridiagonal";
  Index p = 10;
  Index n = 20;
  Index group_size = 10;
  Index clique_size = 3;
  int replicates = 1;
  std::uint64_t seed = 0;
  std::string out = ".";
};

int cmd_simulate(const SimulateOpts& o) {
  rtgibbs::StructureSpec spec{rtgibbs::parse_structure(o.structure), o.p, o.group_size,
                              o.clique_size};
  const MatrixX<double> theta0 = rtgibbs::make_structure(spec);
  fs::create_directories(o.out);
  const fs::path dir(o.out);

  rtgibbs::write_csv_matrix(dir / "theta0.csv", theta0);
  json files = json::array();
  files.push_back(file_entry(dir / "theta0.csv"));
  for (int r = 0; r < o.replicates; ++r) {
    rtgibbs::RngStream rng(o.seed, static_cast<std::uint64_t>(r));
    const MatrixX<double> y = rtgibbs::sample_mvn_data(theta0, o.n, rng);
    const auto name = "data_rep" + std::to_string(r) + ".csv";
    rtgibbs::write_csv_matrix(dir / name, y);
    files.push_back(file_entry(dir / name));
  }

  json cfg{{"structure", o.structure}, {"p", o.p},           {"n", o.n},
           {"group_size", o.group_size}, {"clique_size", o.clique_size},
           {"replicates", o.replicates}, {"seed", o.seed}};
  write_manifest(dir, json{{"command", "simulate"}, {"seed", o.seed}, {"config", cfg},
                           {"files", files}});
  std::cout << "wrote truth + " << o.replicates << " replicate(s) to " << dir.string() << "\n";
  return 0;
}

// ------------------------------------------------------------------ sample

struct SampleOpts {
  std::string input;
  std::string structure;
  Index p = 0;
  Index n = 0;
  std::uint64_t data_seed = 1;
  std::string prior = "ghs";
  std::string sampler = "rt";
  Index iters = 5000;
  Index burnin = 1000;
  Index thin = 1;
  std::uint64_t seed = 0;
  bool standardize = false;
  double ci = 0.5;
  bool store_draws = false;
  double limit_seconds = 0.0;
  Index group_size = 10;
  Index clique_size = 3;
  std::string out = ".";
};

void write_summary_files(const fs::path& dir, const rtgibbs::PosteriorSummary<double>& summary,
                         json& files) {
  const double q_lo = (1.0 - summary.ci) / 2.0;
  rtgibbs::write_csv_matrix(dir / "mean.csv", summary.mean);
  const auto lo_name = "q" + quantile_label(q_lo) + ".csv";
  const auto hi_name = "q" + quantile_label(1.0 - q_lo) + ".csv";
  rtgibbs::write_csv_matrix(dir / lo_name, summary.q_low);
  rtgibbs::write_csv_matrix(dir / "q50.csv", summary.q_med);
  rtgibbs::write_csv_matrix(dir / hi_name, summary.q_high);
  {
    std::ofstream edges(dir / "edges.csv");
    edges << "j,k,mean,q_low,q_high\n";
    for (auto [j, k] : summary.edge_set)
      edges << (j + 1) << ',' << (k + 1) << ',' << rtgibbs::format_double(summary.mean(j, k))
            << ',' << rtgibbs::format_double(summary.q_low(j, k)) << ','
            << rtgibbs::format_double(summary.q_high(j, k)) << '\n';
  }
  for (const auto& name : {std::string("mean.csv"), lo_name, std::string("q50.csv"), hi_name,
                           std::string("edges.csv")})
    files.push_back(file_entry(dir / name));
}

int cmd_sample(const SampleOpts& o) {
  const bool from_file = !o.input.empty();
  const bool synthetic = !o.structure.empty();
  if (from_file == synthetic)
    throw rtgibbs::config_error("sample: provide exactly one data source (--input or --structure)");

  fs::create_directories(o.out);
  const fs::path dir(o.out);
  json files = json::array();

  MatrixX<double> y;
  if (from_file) {
    y = rtgibbs::read_csv_matrix(o.input);
  } else {
    if (o.p < 1 || o.n < 1) throw rtgibbs::config_error("sample: synthetic source needs --p and --n");
    rtgibbs::StructureSpec spec{rtgibbs::parse_structure(o.structure), o.p, o.group_size,
                                o.clique_size};
    const MatrixX<double> theta0 = rtgibbs::make_structure(spec);
    rtgibbs::RngStream rng(o.data_seed, 0);
    y = rtgibbs::sample_mvn_data(theta0, o.n, rng);
    rtgibbs::write_csv_matrix(dir / "theta0.csv", theta0);
    rtgibbs::write_csv_matrix(dir / "data.csv", y);
    files.push_back(file_entry(dir / "theta0.csv"));
    files.push_back(file_entry(dir / "data.csv"));
  }
  if (!y.allFinite()) throw rtgibbs::data_error("sample: input contains non-finite values");
  if (o.standardize) y = standardize_columns(y);

  rtgibbs::ChainConfig cfg;
  cfg.iterations = o.iters;
  cfg.burnin = o.burnin;
  cfg.thin = o.thin;
  cfg.seed = o.seed;
  cfg.store_traces = true;
  cfg.time_limit_seconds = o.limit_seconds;
  const auto prior = rtgibbs::make_prior<double>(parse_prior(o.prior));

  rtgibbs::ChainResult<double> result;
  if (parse_sampler(o.sampler) == rtgibbs::SamplerKind::RT) {
    result = rtgibbs::rt_run(y, prior, cfg);
  } else {
    MatrixX<double> s = MatrixX<double>::Zero(y.cols(), y.cols());
    s.selfadjointView<Eigen::Lower>().rankUpdate(y.transpose());
    s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
    result = rtgibbs::cyclical_run(s, y.rows(), prior, cfg);
  }
  if (result.timed_out)
    std::cerr << "warning: chain hit the wall-clock limit after " << result.iterations_run
              << " iterations\n";

  const auto summary = rtgibbs::summarize(result, o.ci);
  write_summary_files(dir, summary, files);

  {
    std::ofstream trace(dir / "loglik_trace.csv");
    trace << "iteration,loglik\n";
    for (std::size_t i = 0; i < result.loglik_trace.size(); ++i)
      trace << (i + 1) << ',' << rtgibbs::format_double(result.loglik_trace[i]) << '\n';
    files.push_back(file_entry(dir / "loglik_trace.csv"));
  }
  const auto diag = rtgibbs::trace_diagnostics(result);

  json manifest{{"command", "sample"}, {"seed", o.seed}};
  json cfg_json{{"input", o.input},       {"structure", o.structure},
                {"p", y.cols()},          {"n", y.rows()},
                {"prior", o.prior},       {"sampler", o.sampler},
                {"iters", o.iters},       {"burnin", o.burnin},
                {"thin", o.thin},         {"seed", o.seed},
                {"standardize", o.standardize}, {"ci", o.ci},
                {"data_seed", o.data_seed}};
  manifest["config"] = cfg_json;
  manifest["diagnostics"] = json{{"stored_draws", result.draws.size()},
                                 {"edges", summary.edge_set.size()},
                                 {"degenerate_trace", diag.degenerate},
                                 {"loglik_lag1_autocorr", diag.lag1_autocorr},
                                 {"loglik_ess_proxy", diag.ess_proxy},
                                 {"timed_out", result.timed_out}};

  if (o.store_draws) {
    rtgibbs::DrawsWriter writer(dir / "draws.bin", y.cols());
    for (const auto& d : result.draws) writer.append(d);
    writer.close();
    manifest["draws"] = json{{"file", "draws.bin"},
                             {"p", y.cols()},
                             {"count", writer.count()},
                             {"layout", "upper_triangle_row_major_float64_le"},
                             {"checksum", hex64(writer.checksum())}};
  }
  manifest["files"] = files;
  write_manifest(dir, manifest);
  std::cout << "stored " << result.draws.size() << " draws; " << summary.edge_set.size()
            << " edges selected; outputs in " << dir.string() << "\n";
  return 0;
}

// --------------------------------------------------------------- benchmark

struct BenchmarkOpts {
  std::string dims;  // "n:p,n:p" or "paper"
  std::string structures = "cliques_positive";
  std::string priors = "ghs";
  std::string samplers = "rt,cyclical";
  int replicates = 1;
  Index iters = 200;
  Index burnin = 100;
  std::uint64_t seed = 0;
  double limit_seconds = 4.0 * 3600.0;
  int threads = 1;
  Index group_size = 10;
  Index clique_size = 3;
  std::string out = ".";
};

int cmd_benchmark(const BenchmarkOpts& o) {
  rtgibbs::BenchmarkPlan plan;
  if (o.dims == "paper") {
    plan.dims = rtgibbs::paper_dimension_grid();
  } else {
    for (const auto& tok : split(o.dims, ',')) {
      const auto parts = split(tok, ':');
      if (parts.size() != 2)
        throw rtgibbs::config_error("benchmark: --dims expects n:p pairs, got '" + tok + "'");
      try {
        plan.dims.emplace_back(std::stol(parts[0]), std::stol(parts[1]));
      } catch (const std::exception&) {
        throw rtgibbs::config_error("benchmark: cannot parse dims token '" + tok + "'");
      }
    }
  }
  plan.structures.clear();
  for (const auto& s : split(o.structures, ',')) plan.structures.push_back(rtgibbs::parse_structure(s));
  plan.priors.clear();
  for (const auto& s : split(o.priors, ',')) plan.priors.push_back(parse_prior(s));
  plan.samplers.clear();
  for (const auto& s : split(o.samplers, ',')) plan.samplers.push_back(parse_sampler(s));
  plan.replicates = o.replicates;
  plan.iterations = o.iters;
  plan.burnin = o.burnin;
  plan.wall_clock_limit_seconds = o.limit_seconds;
  plan.threads = o.threads;
  plan.group_size = o.group_size;
  plan.clique_size = o.clique_size;

  const auto records = rtgibbs::run_benchmark(plan, o.seed);
  fs::create_directories(o.out);
  rtgibbs::emit_report(records, o.out);

  for (auto sampler : plan.samplers) {
    try {
      const double slope = rtgibbs::fit_scaling_exponent(records, sampler);
      std::cout << "scaling exponent [" << rtgibbs::sampler_name(sampler)
                << "]: " << rtgibbs::format_double(slope) << "\n";
    } catch (const rtgibbs::config_error&) {
      std::cout << "scaling exponent [" << rtgibbs::sampler_name(sampler)
                << "]: n/a (need >= 3 distinct p)\n";
    }
  }
  int failures = 0, timeouts = 0;
  for (const auto& r : records) {
    if (!r.error.empty()) ++failures;
    if (r.timed_out) ++timeouts;
  }
  std::cout << records.size() << " records (" << timeouts << " timed out, " << failures
            << " failed); report in " << o.out << "\n";

  json cfg{{"dims", o.dims},          {"structures", o.structures}, {"priors", o.priors},
           {"samplers", o.samplers},  {"replicates", o.replicates}, {"iters", o.iters},
           {"burnin", o.burnin},      {"seed", o.seed},             {"limit_seconds", o.limit_seconds},
           {"threads", o.threads}};
  json files = json::array();
  for (const auto& entry : fs::directory_iterator(o.out))
    if (entry.path().extension() == ".csv") files.push_back(file_entry(entry.path()));
  write_manifest(o.out, json{{"command", "benchmark"}, {"seed", o.seed}, {"config", cfg},
                             {"files", files}});
  return 0;
}

// --------------------------------------------------------------- summarize

struct SummarizeOpts {
  std::string from;  // directory containing manifest.json + draws.bin
  double ci = 0.5;
  std::string out = ".";
};

int cmd_summarize(const SummarizeOpts& o) {
  const fs::path src(o.from);
  const fs::path manifest_path = fs::is_directory(src) ? src / "manifest.json" : src;
  std::ifstream in(manifest_path);
  if (!in) throw rtgibbs::data_error("summarize: cannot open manifest " + manifest_path.string());
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw rtgibbs::data_error("summarize: bad manifest: " + std::string(e.what()));
  }
  if (!manifest.contains("draws"))
    throw rtgibbs::data_error("summarize: manifest has no stored draws (re-run sample with --store-draws)");
  const auto& dj = manifest["draws"];
  const Index p = dj.at("p").get<Index>();
  const Index count = dj.at("count").get<Index>();
  const std::uint64_t checksum = std::stoull(dj.at("checksum").get<std::string>(), nullptr, 16);
  const fs::path draws_path = manifest_path.parent_path() / dj.at("file").get<std::string>();

  rtgibbs::ChainResult<double> result;
  result.draws = rtgibbs::read_draws(draws_path, p, count, checksum);
  const auto summary = rtgibbs::summarize(result, o.ci);

  fs::create_directories(o.out);
  json files = json::array();
  write_summary_files(o.out, summary, files);
  json cfg{{"from", o.from}, {"ci", o.ci}};
  write_manifest(o.out, json{{"command", "summarize"},
                             {"seed", manifest.value("seed", 0)},
                             {"config", cfg},
                             {"files", files}});
  std::cout << "recomputed summaries from " << count << " stored draws; " << summary.edge_set.size()
            << " edges at ci=" << o.ci << "; outputs in " << o.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gibbs samplers for sparse precision matrices under element-wise shrinkage priors"};
  app.set_config("--config");
  app.require_subcommand(1);

  SimulateOpts sim;
  auto* simulate = app.add_subcommand("simulate", "generate ground-truth structures and data");
  simulate->add_option("--structure", sim.structure,
                       "tridiagonal|hubs|cliques_positive|cliques_negative");
  simulate->add_option("--p", sim.p, "dimension");
  simulate->add_option("--n", sim.n, "sample size");
  simulate->add_option("--group-size", sim.group_size);
  simulate->add_option("--clique-size", sim.clique_size);
  simulate->add_option("--replicates", sim.replicates);
  simulate->add_option("--seed", sim.seed);
  simulate->add_option("--out", sim.out);

  SampleOpts smp;
  auto* sample = app.add_subcommand("sample", "run one MCMC chain and summarize the posterior");
  sample->add_option("--input", smp.input, "n x p CSV of observations");
  sample->add_option("--structure", smp.structure, "synthetic source instead of --input");
  sample->add_option("--p", smp.p);
  sample->add_option("--n", smp.n);
  sample->add_option("--data-seed", smp.data_seed);
  sample->add_option("--prior", smp.prior, "ghs|bgl");
  sample->add_option("--sampler", smp.sampler, "rt|cyclical");
  sample->add_option("--iters", smp.iters);
  sample->add_option("--burnin", smp.burnin);
  sample->add_option("--thin", smp.thin);
  sample->add_option("--seed", smp.seed);
  sample->add_flag("--standardize", smp.standardize, "center and scale columns first");
  sample->add_option("--ci", smp.ci, "credible-interval mass for edge selection");
  sample->add_flag("--store-draws", smp.store_draws, "write thinned draws to draws.bin");
  sample->add_option("--limit-seconds", smp.limit_seconds);
  sample->add_option("--group-size", smp.group_size);
  sample->add_option("--clique-size", smp.clique_size);
  sample->add_option("--out", smp.out);

  BenchmarkOpts bm;
  auto* benchmark = app.add_subcommand("benchmark", "runtime and equivalence study");
  benchmark->add_option("--dims", bm.dims, "n:p pairs, e.g. 50:100,50:200 (or 'paper')")->required();
  benchmark->add_option("--structures", bm.structures);
  benchmark->add_option("--priors", bm.priors);
  benchmark->add_option("--samplers", bm.samplers);
  benchmark->add_option("--replicates", bm.replicates);
  benchmark->add_option("--iters", bm.iters);
  benchmark->add_option("--burnin", bm.burnin);
  benchmark->add_option("--seed", bm.seed);
  benchmark->add_option("--limit-seconds", bm.limit_seconds);
  benchmark->add_option("--threads", bm.threads);
  benchmark->add_option("--group-size", bm.group_size);
  benchmark->add_option("--clique-size", bm.clique_size);
  benchmark->add_option("--out", bm.out);

  SummarizeOpts smz;
  auto* summarize = app.add_subcommand("summarize", "recompute summaries from stored draws");
  summarize->add_option("--from", smz.from, "directory with manifest.json and draws.bin")->required();
  summarize->add_option("--ci", smz.ci);
  summarize->add_option("--out", smz.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (sample->parsed()) return cmd_sample(smp);
    if (benchmark->parsed()) return cmd_benchmark(bm);
    if (summarize->parsed()) return cmd_summarize(smz);
    std::cerr << "no subcommand given\n";
    return kExitConfig;
  } catch (const rtgibbs::config_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const rtgibbs::data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const rtgibbs::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
