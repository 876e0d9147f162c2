#ifndef RTGIBBS_BENCHMARK_HPP
#define RTGIBBS_BENCHMARK_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rtgibbs/analysis.hpp"
#include "rtgibbs/chain.hpp"
#include "rtgibbs/cyclical_sampler.hpp"
#include "rtgibbs/errors.hpp"
#include "rtgibbs/io.hpp"
#include "rtgibbs/priors.hpp"
#include "rtgibbs/rt_sampler.hpp"
#include "rtgibbs/simulation.hpp"

namespace rtgibbs {

enum class SamplerKind { RT, Cyclical };

inline const char* sampler_name(SamplerKind k) {
  return k == SamplerKind::RT ? "rt" : "cyclical";
}

struct BenchmarkPlan {
  std::vector<std::pair<Index, Index>> dims;  // (n, p)
  std::vector<StructureKind> structures = {StructureKind::CliquesPositive};
  std::vector<PriorKind> priors = {PriorKind::GHS};
  int replicates = 1;
  Index iterations = 200;
  Index burnin = 100;
  Index thin = 1;
  double wall_clock_limit_seconds = 4.0 * 3600.0;
  std::vector<SamplerKind> samplers = {SamplerKind::RT, SamplerKind::Cyclical};
  int threads = 1;
  Index group_size = 10;
  Index clique_size = 3;

  void validate() const {
    if (dims.empty()) throw config_error("benchmark plan: need at least one (n, p) pair");
    if (replicates < 1) throw config_error("benchmark plan: replicates must be >= 1");
    if (!(wall_clock_limit_seconds > 0.0))
      throw config_error("benchmark plan: wall clock limit must be positive");
    if (samplers.empty()) throw config_error("benchmark plan: need at least one sampler");
  }
};

struct BenchmarkRecord {
  StructureKind structure;
  PriorKind prior;
  Index n = 0, p = 0;
  int replicate = 0;
  SamplerKind sampler;
  double frob_theta = std::numeric_limits<double>::quiet_NaN();   // ||Theta_hat||_F
  double frob_err = std::numeric_limits<double>::quiet_NaN();     // ||Theta_hat - Theta0||_F
  double frob_rt_vs_cyc = std::numeric_limits<double>::quiet_NaN();
  double seconds = std::numeric_limits<double>::quiet_NaN();      // sampling loop total
  double per_iter_seconds = std::numeric_limits<double>::quiet_NaN();
  bool timed_out = false;
  std::string error;
};

namespace detail {

template <typename Scalar>
MatrixX<Scalar> posterior_mean(const ChainResult<Scalar>& r) {
  MatrixX<Scalar> m = MatrixX<Scalar>::Zero(r.draws.front().rows(), r.draws.front().cols());
  for (const auto& d : r.draws) m += d;
  return m / static_cast<Scalar>(r.draws.size());
}

inline double median(std::vector<double> v) {
  const auto n = v.size();
  std::sort(v.begin(), v.end());
  return (n % 2) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

/// Run every (dim, structure, prior, replicate) cell of the plan. Each
/// replicate owns derived RNG streams, so results are reproducible for a
/// fixed master seed regardless of thread scheduling; failures are recorded
/// per cell and never abort sibling cells.
inline std::vector<BenchmarkRecord> run_benchmark(const BenchmarkPlan& plan,
                                                  std::uint64_t master_seed) {
  plan.validate();
  using Scalar = double;

  struct Task {
    StructureKind structure;
    PriorKind prior;
    Index n, p;
    int replicate;
    std::uint64_t stream_base;
    std::size_t record_offset;
  };
  std::vector<Task> tasks;
  std::size_t n_records = 0;
  std::uint64_t stream = 0;
  for (auto kind : plan.structures)
    for (auto prior : plan.priors)
      for (auto [n, p] : plan.dims)
        for (int r = 0; r < plan.replicates; ++r) {
          tasks.push_back({kind, prior, n, p, r, stream, n_records});
          stream += 8;  // data stream + one per sampler, with room to spare
          n_records += plan.samplers.size();
        }
  std::vector<BenchmarkRecord> records(n_records);

  const auto run_task = [&](const Task& task) {
    for (std::size_t si = 0; si < plan.samplers.size(); ++si) {
      auto& rec = records[task.record_offset + si];
      rec.structure = task.structure;
      rec.prior = task.prior;
      rec.n = task.n;
      rec.p = task.p;
      rec.replicate = task.replicate;
      rec.sampler = plan.samplers[si];
    }
    try {
      StructureSpec spec{task.structure, task.p, plan.group_size, plan.clique_size};
      const MatrixX<Scalar> theta0 = make_structure<Scalar>(spec);
      RngStream data_rng(master_seed, task.stream_base);
      const MatrixX<Scalar> y = sample_mvn_data(theta0, task.n, data_rng);
      MatrixX<Scalar> s = MatrixX<Scalar>::Zero(task.p, task.p);
      s.selfadjointView<Eigen::Lower>().rankUpdate(y.transpose());
      s.triangularView<Eigen::StrictlyUpper>() = s.transpose();

      const PriorSpec<Scalar> prior = make_prior<Scalar>(task.prior);
      std::map<SamplerKind, MatrixX<Scalar>> means;
      for (std::size_t si = 0; si < plan.samplers.size(); ++si) {
        auto& rec = records[task.record_offset + si];
        try {
          ChainConfig cfg;
          cfg.iterations = plan.iterations;
          cfg.burnin = plan.burnin;
          cfg.thin = plan.thin;
          cfg.seed = master_seed;
          cfg.stream = task.stream_base + 1 + si;
          cfg.store_traces = false;
          cfg.time_limit_seconds = plan.wall_clock_limit_seconds;
          ChainResult<Scalar> result = (rec.sampler == SamplerKind::RT)
                                           ? rt_run(y, prior, cfg)
                                           : cyclical_run(s, task.n, prior, cfg);
          rec.seconds = std::accumulate(result.per_iter_seconds.begin(),
                                        result.per_iter_seconds.end(), 0.0);
          if (result.timed_out) {
            rec.timed_out = true;  // no metric values for timed-out cells
            continue;
          }
          rec.per_iter_seconds = rec.seconds / static_cast<double>(result.iterations_run);
          const MatrixX<Scalar> mean = detail::posterior_mean(result);
          rec.frob_theta = mean.norm();
          rec.frob_err = frobenius(mean, theta0);
          means.emplace(rec.sampler, mean);
        } catch (const std::exception& e) {
          rec.error = e.what();
        }
      }
      if (means.count(SamplerKind::RT) && means.count(SamplerKind::Cyclical)) {
        const double gap = frobenius(means.at(SamplerKind::RT), means.at(SamplerKind::Cyclical));
        for (std::size_t si = 0; si < plan.samplers.size(); ++si)
          records[task.record_offset + si].frob_rt_vs_cyc = gap;
      }
    } catch (const std::exception& e) {
      for (std::size_t si = 0; si < plan.samplers.size(); ++si)
        records[task.record_offset + si].error = e.what();
    }
  };

  const int workers = std::max(1, std::min<int>(plan.threads, static_cast<int>(tasks.size())));
  if (workers == 1) {
    for (const auto& t : tasks) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= tasks.size()) return;
          run_task(tasks[i]);
        }
      });
    for (auto& th : pool) th.join();
  }
  return records;
}

/// Least-squares slope of log(median per-iteration seconds) against log(p)
/// for one sampler; needs at least three distinct p values.
inline double fit_scaling_exponent(const std::vector<BenchmarkRecord>& records,
                                   SamplerKind sampler) {
  std::map<Index, std::vector<double>> by_p;
  for (const auto& r : records)
    if (r.sampler == sampler && !r.timed_out && r.error.empty() && std::isfinite(r.per_iter_seconds))
      by_p[r.p].push_back(r.per_iter_seconds);
  if (by_p.size() < 3)
    throw config_error("fit_scaling_exponent: need at least 3 distinct p values, have " +
                       std::to_string(by_p.size()));
  std::vector<double> lx, ly;
  for (auto& [p, ts] : by_p) {
    lx.push_back(std::log(static_cast<double>(p)));
    ly.push_back(std::log(detail::median(ts)));
  }
  const auto k = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / k;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  return sxy / sxx;
}

namespace detail {

inline std::string cell(double v) { return std::isfinite(v) ? format_double(v) : std::string("-"); }

struct StatWithSe {
  double value = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
};

// Across-replicate summaries of a scalar metric. SE of the mean is s/sqrt(R);
// the other rows use a fixed-seed nonparametric bootstrap.
inline std::vector<std::pair<std::string, StatWithSe>> replicate_stats(std::vector<double> v) {
  std::vector<std::pair<std::string, StatWithSe>> rows{
      {"mean", {}}, {"var", {}}, {"q25", {}}, {"q50", {}}, {"q75", {}}};
  if (v.empty()) return rows;
  const auto r = v.size();
  const auto stat_of = [](std::vector<double> s, std::size_t which) {
    std::sort(s.begin(), s.end());
    const double m = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    switch (which) {
      case 0: return m;
      case 1: {
        if (s.size() < 2) return std::numeric_limits<double>::quiet_NaN();
        double ss = 0.0;
        for (double x : s) ss += (x - m) * (x - m);
        return ss / static_cast<double>(s.size() - 1);
      }
      default: {
        const double q = which == 2 ? 0.25 : which == 3 ? 0.5 : 0.75;
        const auto rank = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::ceil(q * static_cast<double>(s.size()))), 1, s.size());
        return s[rank - 1];
      }
    }
  };
  for (std::size_t which = 0; which < 5; ++which) rows[which].second.value = stat_of(v, which);
  // standard errors
  if (r >= 2) {
    const double var = rows[1].second.value;
    rows[0].second.se = std::sqrt(var / static_cast<double>(r));
    RngStream boot(0xb005u, 0);
    const int b_count = 500;
    std::vector<std::vector<double>> boots(5);
    std::vector<double> resample(r);
    for (int b = 0; b < b_count; ++b) {
      for (auto& x : resample)
        x = v[static_cast<std::size_t>(boot.uniform() * static_cast<double>(r)) % r];
      for (std::size_t which = 1; which < 5; ++which)
        boots[which].push_back(stat_of(resample, which));
    }
    for (std::size_t which = 1; which < 5; ++which) {
      const auto& bs = boots[which];
      const double bm = std::accumulate(bs.begin(), bs.end(), 0.0) / static_cast<double>(bs.size());
      double ss = 0.0;
      for (double x : bs) ss += (x - bm) * (x - bm);
      rows[which].second.se = std::sqrt(ss / static_cast<double>(bs.size() - 1));
    }
  }
  return rows;
}

}  // namespace detail

/// Write metrics.csv (one row per record), runtime.csv (raw and relative
/// runtimes, normalized to the smallest p per sampler), and one Table-1-style
/// summary CSV per (structure, prior). Missing values render as dashes in the
/// summaries and empty cells in metrics.csv.
inline void emit_report(const std::vector<BenchmarkRecord>& records,
                        const std::filesystem::path& outdir) {
  std::filesystem::create_directories(outdir);

  {
    std::ofstream out(outdir / "metrics.csv");
    if (!out) throw data_error("cannot open metrics.csv for writing");
    out << "structure,prior,n,p,replicate,sampler,frob_theta,frob_err,frob_rt_vs_cyc,seconds\n";
    for (const auto& r : records) {
      const auto opt = [&](double v) { return std::isfinite(v) ? format_double(v) : std::string(); };
      out << structure_name(r.structure) << ',' << prior_name(r.prior) << ',' << r.n << ',' << r.p
          << ',' << r.replicate << ',' << sampler_name(r.sampler) << ',' << opt(r.frob_theta) << ','
          << opt(r.frob_err) << ',' << opt(r.frob_rt_vs_cyc) << ',' << opt(r.seconds) << '\n';
    }
  }

  {
    // mean raw seconds per (sampler, p, n); relative to the smallest p
    std::map<std::pair<SamplerKind, std::pair<Index, Index>>, std::vector<double>> raw;
    for (const auto& r : records)
      if (r.error.empty() && std::isfinite(r.seconds)) raw[{r.sampler, {r.p, r.n}}].push_back(r.seconds);
    std::map<SamplerKind, std::pair<Index, double>> smallest;
    for (const auto& [key, ts] : raw) {
      const double mean = std::accumulate(ts.begin(), ts.end(), 0.0) / static_cast<double>(ts.size());
      auto it = smallest.find(key.first);
      if (it == smallest.end() || key.second.first < it->second.first)
        smallest[key.first] = {key.second.first, mean};
    }
    std::ofstream out(outdir / "runtime.csv");
    if (!out) throw data_error("cannot open runtime.csv for writing");
    out << "sampler,p,n,raw_seconds_mean,relative_mean\n";
    for (const auto& [key, ts] : raw) {
      const double mean = std::accumulate(ts.begin(), ts.end(), 0.0) / static_cast<double>(ts.size());
      const double rel = mean / smallest.at(key.first).second;
      out << sampler_name(key.first) << ',' << key.second.first << ',' << key.second.second << ','
          << format_double(mean) << ',' << format_double(rel) << '\n';
    }
  }

  struct CellKey {
    StructureKind structure;
    PriorKind prior;
    Index n, p;
    SamplerKind sampler;
    auto operator<=>(const CellKey&) const = default;
  };
  std::map<CellKey, std::vector<const BenchmarkRecord*>> cells;
  for (const auto& r : records) cells[{r.structure, r.prior, r.n, r.p, r.sampler}].push_back(&r);

  std::map<std::pair<StructureKind, PriorKind>, std::ofstream> tables;
  for (const auto& [key, recs] : cells) {
    auto tk = std::make_pair(key.structure, key.prior);
    auto it = tables.find(tk);
    if (it == tables.end()) {
      const auto name = std::string("summary_") + structure_name(key.structure) + "_" +
                        prior_name(key.prior) + ".csv";
      auto& out = tables[tk];
      out.open(outdir / name);
      if (!out) throw data_error("cannot open " + name + " for writing");
      out << "n,p,sampler,stat,frob_theta,frob_theta_se,frob_err,frob_err_se,"
             "frob_rt_vs_cyc,frob_rt_vs_cyc_se\n";
      it = tables.find(tk);
    }
    auto& out = it->second;
    std::vector<double> theta_v, err_v, gap_v;
    for (const auto* r : recs) {
      if (std::isfinite(r->frob_theta)) theta_v.push_back(r->frob_theta);
      if (std::isfinite(r->frob_err)) err_v.push_back(r->frob_err);
      if (std::isfinite(r->frob_rt_vs_cyc)) gap_v.push_back(r->frob_rt_vs_cyc);
    }
    const auto t_rows = detail::replicate_stats(theta_v);
    const auto e_rows = detail::replicate_stats(err_v);
    const auto g_rows = detail::replicate_stats(gap_v);
    for (std::size_t i = 0; i < t_rows.size(); ++i) {
      out << key.n << ',' << key.p << ',' << sampler_name(key.sampler) << ',' << t_rows[i].first
          << ',' << detail::cell(t_rows[i].second.value) << ',' << detail::cell(t_rows[i].second.se)
          << ',' << detail::cell(e_rows[i].second.value) << ',' << detail::cell(e_rows[i].second.se)
          << ',' << detail::cell(g_rows[i].second.value) << ',' << detail::cell(g_rows[i].second.se)
          << '\n';
    }
  }
}

}  // namespace rtgibbs

#endif
