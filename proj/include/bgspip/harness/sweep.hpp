// Copyright (c) 2026 The bgspip authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BGSPIP_HARNESS_SWEEP_HPP
#define BGSPIP_HARNESS_SWEEP_HPP

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "../metrics.hpp"
#include "config.hpp"

namespace bgspip::harness
{

/// One point of a kappa-plot.
struct RunRecord
{
  MatrixClass matrix_class = MatrixClass::Default;
  std::vector<double> knobs;
  double kappa = 0.0;
  Algorithm algorithm = Algorithm::BcgsPip;
  IntraorthId io = IntraorthId::HouseQR;
  std::string precision; // "double", or "low/high" for two-precision runs
  double loo = 0.0;
  double rel_residual = 0.0;
  double rel_chol_residual = 0.0;
  std::size_t sync_points = 0;
  bool had_nan = false;
  double wall_time = 0.0;
};

inline bool record_order(const RunRecord& a, const RunRecord& b)
{
  return std::tie(a.matrix_class, a.kappa, a.algorithm, a.io, a.precision, a.knobs) <
         std::tie(b.matrix_class, b.kappa, b.algorithm, b.io, b.precision, b.knobs);
}

/// Result of one algorithm run, reduced to what a record needs.
struct RunOutcome
{
  StabilityReport report;
  RunStats stats;
};

namespace detail
{

template <Scalar Low, Scalar High>
RunOutcome run_typed(Algorithm a, const BlockMatrix<double>& X, IntraorthId io, double kappa)
{
  const BlockMatrix<Low> Xw = X.converted<Low>();
  BgsResult<Low> res = run_bgs_mp<Low, High>(a, Xw, io);
  return {stability_report<Low, Low>(res.factors, Xw.matrix(), kappa), res.stats};
}

template <Scalar Low>
RunOutcome run_low(Algorithm a, const BlockMatrix<double>& X, IntraorthId io, PrecisionId high, double kappa)
{
  switch (high)
  {
    case PrecisionId::Single:
      if constexpr (precision_traits<Low>::rank <= 0)
        return run_typed<Low, float>(a, X, io, kappa);
      break;
    case PrecisionId::Double:
      if constexpr (precision_traits<Low>::rank <= 1)
        return run_typed<Low, double>(a, X, io, kappa);
      break;
    case PrecisionId::DoubleDouble:
      return run_typed<Low, DoubleDouble>(a, X, io, kappa);
  }
  throw contract_error("precision pair with high coarser than low");
}

} // namespace detail

/// Runs algorithm a on X (given in double) in the requested precisions and
/// measures the metrics against the working-precision copy of X.
/// Uniform algorithms use `low` only.
inline RunOutcome run_algorithm(Algorithm a, const BlockMatrix<double>& X, IntraorthId io, PrecisionId low,
                                PrecisionId high, double kappa)
{
  if (!is_mixed_precision(a))
    high = low;
  switch (low)
  {
    case PrecisionId::Single:
      return detail::run_low<float>(a, X, io, high, kappa);
    case PrecisionId::Double:
      return detail::run_low<double>(a, X, io, high, kappa);
    case PrecisionId::DoubleDouble:
      return detail::run_low<DoubleDouble>(a, X, io, high, kappa);
  }
  throw contract_error("unregistered precision");
}

inline std::string precision_label(const SweepConfig& cfg, Algorithm a)
{
  if (is_mixed_precision(a))
    return cfg.mp_pair->label();
  return std::string(to_string(cfg.precision));
}

/// All records for one sweep point: the matrix is generated and its kappa
/// measured once, then every (algorithm, io) pair runs on it.
inline std::vector<RunRecord> run_point(const SweepConfig& cfg, std::size_t point)
{
  const MatrixSpec spec = cfg.spec_at(point);
  const BlockMatrix<double> X = generate(spec);
  const double kappa = cond2<double>(X.matrix().view());

  std::vector<RunRecord> out;
  for (Algorithm a : cfg.algorithms)
    for (IntraorthId io : cfg.ios)
    {
      const PrecisionId low = is_mixed_precision(a) ? cfg.mp_pair->low() : cfg.precision;
      const PrecisionId high = is_mixed_precision(a) ? cfg.mp_pair->high() : cfg.precision;
      const RunOutcome r = run_algorithm(a, X, io, low, high, kappa);
      RunRecord rec;
      rec.matrix_class = spec.cls;
      rec.knobs = spec.knobs;
      rec.kappa = kappa;
      rec.algorithm = a;
      rec.io = io;
      rec.precision = precision_label(cfg, a);
      rec.loo = r.report.loo;
      rec.rel_residual = r.report.rel_residual;
      rec.rel_chol_residual = r.report.rel_chol_residual;
      rec.sync_points = r.stats.sync_points;
      rec.had_nan = r.stats.had_nan;
      rec.wall_time = r.stats.wall_time;
      out.push_back(std::move(rec));
    }
  return out;
}

/// Evaluates every sweep point (on up to `jobs` worker threads) and returns
/// the records in deterministic sorted order, independent of scheduling.
inline std::vector<RunRecord> run_sweep(const SweepConfig& cfg, unsigned jobs = 1)
{
  const std::size_t points = cfg.knob_sweep.size();
  std::vector<std::vector<RunRecord>> per_point(points);
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(points)));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < points; i = next++)
    {
      try
      {
        per_point[i] = run_point(cfg, i);
      }
      catch (...)
      {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
      }
    }
  };

  if (jobs == 1)
    worker();
  else
  {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j)
      pool.emplace_back(worker);
  }
  if (failure)
    std::rethrow_exception(failure);

  std::vector<RunRecord> records;
  for (auto& v : per_point)
    for (auto& r : v)
      records.push_back(std::move(r));
  std::stable_sort(records.begin(), records.end(), record_order);
  return records;
}

} // namespace bgspip::harness

#endif
