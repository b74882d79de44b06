// Copyright (c) 2026 The bgspip authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BGSPIP_ACCEPTANCE_HPP
#define BGSPIP_ACCEPTANCE_HPP

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "harness/emit.hpp"

namespace bgspip
{

//
// Built-in acceptance suite. Each criterion runs its own experiment and
// reports pass/fail with the measured quantities that decided it.
//

struct CriterionResult
{
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0; // 0: no runtime bound
};

namespace acceptance
{

inline constexpr double eps_double = 0x1p-53;
inline constexpr double eps_single = 0x1p-24;

// Glued generator knob t2 giving kappa(X) ~ 10^j for m=100, p=10, s=2,
// t1=1 (measured: kappa ~ 6.39 * 10^t2).
inline double glued_t2(int j) { return j - 0.806; }

inline constexpr std::uint64_t seed = 42;

/// One metric evaluation with its working precision, collected for the
/// residual criterion.
struct ResidualEntry
{
  std::string where;
  double rel_residual;
  bool single;
};

inline std::string sci(double x)
{
  if (std::isnan(x))
    return "NaN";
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

struct Point
{
  double kappa;
  harness::RunOutcome outcome;
};

} // namespace acceptance

class AcceptanceSuite
{
public:
  /// Runs every criterion in order. Progress lines go to `log` if given.
  std::vector<CriterionResult> run_all(std::ostream* log = nullptr)
  {
    std::vector<CriterionResult> out;
    const std::vector<std::pair<int, std::function<CriterionResult()>>> criteria = {
        {1, [this] { return sync_counts(); }},
        {2, [this] { return pip_quadratic(); }},
        {3, [this] { return reorthogonalized_loo(); }},
        {4, [this] { return cholesky_residual(); }},
        {5, [this] { return io_sensitivity(); }},
        {6, [this] { return breakdown(); }},
        {7, [this] { return mixed_precision_trend(); }},
        {8, [this] { return degenerate_pair(); }},
        {9, [this] { return residual_universality(); }},
        {10, [this] { return oracle_equivalence(); }},
        {11, [this] { return block_size_independence(); }},
        {12, [this] { return determinism(); }},
    };
    for (const auto& [id, fn] : criteria)
    {
      if (id == 9)
        logged_all_ = true; // 2-7 have just logged their residuals
      CriterionResult r = timed(fn);
      r.id = id;
      if (log)
        *log << format(r) << std::endl;
      out.push_back(std::move(r));
    }
    return out;
  }

  static std::string format(const CriterionResult& r)
  {
    std::ostringstream os;
    os << (r.passed ? "PASS" : "FAIL") << "  criterion " << r.id << ": " << r.name << " (" << acceptance::sci(r.seconds)
       << " s";
    if (r.time_limit > 0)
      os << ", limit " << r.time_limit << " s";
    os << ") " << r.detail;
    return os.str();
  }

  // Individual criteria. 4 uses the sweeps of 2 and 3, and 9 the residuals
  // logged by 2-7; each runs what it needs if called on its own.

  CriterionResult sync_counts()
  {
    CriterionResult r{0, "sync counts p, 2p, 2p-1", true, "", 0, 1.0};
    for (index_t p : {1, 5, 10})
    {
      const BlockMatrix<double> X = gen_default(60, p, 3, 2.0, acceptance::seed);
      for (Algorithm a : all_algorithms)
      {
        const std::size_t got =
            sync_count(run_bgs_mp<double, DoubleDouble>(a, X, IntraorthId::HouseQR).stats);
        const std::size_t want = expected_sync_points(a, p);
        if (got != want)
        {
          r.passed = false;
          r.detail += std::string(to_string(a)) + " p=" + std::to_string(p) + ": " + std::to_string(got) +
                      " != " + std::to_string(want) + "; ";
        }
      }
    }
    if (r.passed)
      r.detail = "all 18 (algorithm, p) counts exact";
    return r;
  }

  CriterionResult pip_quadratic()
  {
    CriterionResult r{0, "BCGS-PIP LOO <= 100 eps kappa^2 with quadratic growth", true, "", 0, 10.0};
    const auto& pts = glued_double(Algorithm::BcgsPip, IntraorthId::HouseQR);
    std::string worst;
    for (const auto& pt : pts)
    {
      const double bound = 100.0 * acceptance::eps_double * pt.kappa * pt.kappa;
      const double loo = pt.outcome.report.loo;
      if (!(loo <= bound))
      {
        r.passed = false;
        worst += "kappa=" + acceptance::sci(pt.kappa) + " LOO=" + acceptance::sci(loo) + " > " +
                 acceptance::sci(bound) + "; ";
      }
    }
    const double l3 = pts[1].outcome.report.loo; // kappa ~ 1e3
    const double l6 = pts[4].outcome.report.loo; // kappa ~ 1e6
    const double growth = l6 / l3;
    if (!(growth >= 1e3))
      r.passed = false;
    r.detail = worst + "LOO(1e6)/LOO(1e3) = " + acceptance::sci(l6) + "/" + acceptance::sci(l3) + " = " +
               acceptance::sci(growth);
    return r;
  }

  CriterionResult reorthogonalized_loo()
  {
    CriterionResult r{0, "BCGS-PIP+ and BCGS-PIPI+ (HouseQR) LOO <= 1e-13", true, "", 0, 20.0};
    double worst = 0.0;
    for (Algorithm a : {Algorithm::BcgsPipPlus, Algorithm::BcgsPipiPlus})
      for (const auto& pt : glued_double(a, IntraorthId::HouseQR))
      {
        const double loo = pt.outcome.report.loo;
        if (!(loo <= 1e-13))
        {
          r.passed = false;
          r.detail += std::string(to_string(a)) + " kappa=" + acceptance::sci(pt.kappa) + " LOO=" +
                      acceptance::sci(loo) + "; ";
        }
        worst = std::max(worst, std::isnan(loo) ? HUGE_VAL : loo);
      }
    r.detail += "max LOO " + acceptance::sci(worst);
    return r;
  }

  CriterionResult cholesky_residual()
  {
    CriterionResult r{0, "relative Cholesky residual <= 1e-12 (glued, HouseQR)", true, "", 0, 0.0};
    double worst = 0.0;
    for (Algorithm a : {Algorithm::BcgsPip, Algorithm::BcgsPipPlus, Algorithm::BcgsPipiPlus})
      for (const auto& pt : glued_double(a, IntraorthId::HouseQR))
      {
        const double c = pt.outcome.report.rel_chol_residual;
        if (!(c <= 1e-12))
        {
          r.passed = false;
          r.detail += std::string(to_string(a)) + " kappa=" + acceptance::sci(pt.kappa) + " res=" +
                      acceptance::sci(c) + "; ";
        }
        worst = std::max(worst, std::isnan(c) ? HUGE_VAL : c);
      }
    r.detail += "max residual " + acceptance::sci(worst);
    return r;
  }

  CriterionResult io_sensitivity()
  {
    CriterionResult r{0, "PIPI+ needs a stable IO, PIP+ does not (monomial)", true, "", 0, 60.0};
    const BlockMatrix<double> X = gen_monomial(400, 24, 10, 48, 5, acceptance::seed);
    const double kappa = cond2<double>(X.matrix().view());
    auto run = [&](Algorithm a, IntraorthId io) {
      const auto out = harness::run_algorithm(a, X, io, PrecisionId::Double, PrecisionId::Double, kappa);
      log_residual(std::string("monomial ") + std::string(to_string(a)), out, false);
      return out.report.loo;
    };
    const double chol = run(Algorithm::BcgsPipiPlus, IntraorthId::CholQR);
    const double house = run(Algorithm::BcgsPipiPlus, IntraorthId::HouseQR);
    const double plus_chol = run(Algorithm::BcgsPipPlus, IntraorthId::CholQR);
    // NaN from CholQR breakdown counts as total loss.
    const double chol_cmp = std::isnan(chol) ? HUGE_VAL : chol;
    r.passed = chol_cmp >= 10.0 * house && plus_chol <= 1e-13;
    r.detail = "kappa=" + acceptance::sci(kappa) + " PIPI+oCholQR=" + acceptance::sci(chol) +
               " PIPI+oHouseQR=" + acceptance::sci(house) + " PIP+oCholQR=" + acceptance::sci(plus_chol);
    return r;
  }

  CriterionResult breakdown()
  {
    CriterionResult r{0, "LOO > 1e-8 or NaN for kappa >= 1e10 (glued, double)", true, "", 0, 0.0};
    for (double t2 : {9.3, 11.2})
    {
      const BlockMatrix<double> X = gen_glued(100, 10, 2, 1.0, t2, acceptance::seed);
      const double kappa = cond2<double>(X.matrix().view());
      if (!(kappa >= 1e10))
      {
        r.passed = false;
        r.detail += "kappa=" + acceptance::sci(kappa) + " below 1e10; ";
        continue;
      }
      for (Algorithm a : {Algorithm::BcgsPip, Algorithm::BcgsPipPlus, Algorithm::BcgsPipiPlus})
        for (IntraorthId io : all_intraorth)
        {
          const auto out = harness::run_algorithm(a, X, io, PrecisionId::Double, PrecisionId::Double, kappa);
          log_residual("glued kappa>=1e10 " + std::string(to_string(a)), out, false);
          const double loo = out.report.loo;
          if (!(out.stats.had_nan || std::isnan(loo) || loo > 1e-8))
          {
            r.passed = false;
            r.detail += std::string(to_string(a)) + "o" + std::string(to_string(io)) +
                        " kappa=" + acceptance::sci(kappa) + " LOO=" + acceptance::sci(loo) + "; ";
          }
        }
    }
    if (r.passed)
      r.detail = "all 12 runs broke down or lost orthogonality";
    return r;
  }

  CriterionResult mixed_precision_trend()
  {
    CriterionResult r{0, "BCGS-PIPI+_MP (single/double) LOO <= 100 eps_s kappa, beats uniform single", true, "", 0,
                      30.0};
    double mp5 = HUGE_VAL, single5 = HUGE_VAL, kappa5 = 0;
    for (int j = 2; j <= 7; ++j)
    {
      const BlockMatrix<double> X = gen_glued(100, 10, 2, 1.0, acceptance::glued_t2(j), acceptance::seed);
      const double kappa = cond2<double>(X.matrix().view());
      const auto mp = harness::run_algorithm(Algorithm::BcgsPipiPlusMp, X, IntraorthId::HouseQR, PrecisionId::Single,
                                             PrecisionId::Double, kappa);
      log_residual("glued BCGS_PIPI+_MP single/double", mp, true);
      const double bound = 100.0 * acceptance::eps_single * kappa;
      if (!(mp.report.loo <= bound))
      {
        r.passed = false;
        r.detail += "kappa=" + acceptance::sci(kappa) + " LOO=" + acceptance::sci(mp.report.loo) + " > " +
                    acceptance::sci(bound) + "; ";
      }
      if (j == 5)
      {
        const auto uni = harness::run_algorithm(Algorithm::BcgsPipiPlus, X, IntraorthId::HouseQR, PrecisionId::Single,
                                                PrecisionId::Single, kappa);
        log_residual("glued BCGS_PIPI+ single", uni, true);
        mp5 = mp.report.loo;
        single5 = std::isnan(uni.report.loo) ? HUGE_VAL : uni.report.loo;
        kappa5 = kappa;
      }
    }
    if (!(10.0 * mp5 <= single5))
      r.passed = false;
    r.detail += "at kappa=" + acceptance::sci(kappa5) + ": MP LOO=" + acceptance::sci(mp5) +
                " uniform single LOO=" + (std::isinf(single5) ? std::string("NaN (breakdown)") : acceptance::sci(single5));
    return r;
  }

  CriterionResult degenerate_pair()
  {
    CriterionResult r{0, "(double, double) pair is bit-identical to uniform", true, "", 0, 0.0};
    CounterRng rng(acceptance::seed, 99);
    int compared = 0;
    for (int i = 0; i < 20; ++i)
    {
      const index_t s = 1 + static_cast<index_t>(rng.uniform() * 4);
      const index_t p = 1 + static_cast<index_t>(rng.uniform() * 6);
      const index_t m = p * s + static_cast<index_t>(rng.uniform() * 30);
      const double t = 1.0 + rng.uniform() * 9.0;
      const BlockMatrix<double> X = gen_default(m, p, s, t, acceptance::seed + static_cast<std::uint64_t>(i));
      for (Algorithm a : {Algorithm::BcgsPipMp, Algorithm::BcgsPipPlusMp, Algorithm::BcgsPipiPlusMp})
        for (IntraorthId io : all_intraorth)
        {
          const auto mp = run_bgs_mp<double, double>(a, X, io);
          const auto uni = run_bgs<double>(uniform_counterpart(a), X, io);
          ++compared;
          if (!bitwise_equal(mp.factors.Q, uni.factors.Q) || !bitwise_equal(mp.factors.R, uni.factors.R))
          {
            r.passed = false;
            r.detail += std::string(to_string(a)) + " spec " + std::to_string(i) + " differs; ";
          }
        }
    }
    if (r.passed)
      r.detail = std::to_string(compared) + " (Q, R) pairs identical";
    return r;
  }

  CriterionResult residual_universality()
  {
    CriterionResult r{0, "rel. residual <= 1e-13 (double) / 1e-5 (single) for NaN-free runs", true, "", 0, 0.0};
    if (!logged_all_)
    {
      glued_double(Algorithm::BcgsPip, IntraorthId::HouseQR);
      glued_double(Algorithm::BcgsPipPlus, IntraorthId::HouseQR);
      glued_double(Algorithm::BcgsPipiPlus, IntraorthId::HouseQR);
      io_sensitivity();
      breakdown();
      mixed_precision_trend();
      logged_all_ = true;
    }
    double worst_d = 0.0, worst_s = 0.0;
    std::size_t checked = 0;
    for (const auto& e : residuals_)
    {
      if (std::isnan(e.rel_residual))
        continue;
      ++checked;
      const double bound = e.single ? 1e-5 : 1e-13;
      (e.single ? worst_s : worst_d) = std::max(e.single ? worst_s : worst_d, e.rel_residual);
      if (!(e.rel_residual <= bound))
      {
        r.passed = false;
        r.detail += e.where + " res=" + acceptance::sci(e.rel_residual) + "; ";
      }
    }
    r.detail += std::to_string(checked) + " runs, max double " + acceptance::sci(worst_d) + ", max single " +
                acceptance::sci(worst_s);
    return r;
  }

  CriterionResult oracle_equivalence()
  {
    CriterionResult r{0, "tiny instances match the double-double Cholesky oracle to 1e-10", true, "", 0, 0.0};
    const BlockMatrix<double> X = gen_default(12, 3, 2, 1.5, acceptance::seed);
    const double kappa = cond2<double>(X.matrix().view());
    const Matrix<DoubleDouble> Xd = convert_matrix<DoubleDouble>(X.matrix());
    const Matrix<DoubleDouble> Rref = cholesky_nonstop<DoubleDouble>(matmul<DoubleDouble>(Xd, Trans::Yes, Xd).view());

    double worst_r = 0.0, worst_q = 0.0;
    for (Algorithm a : all_algorithms)
      for (IntraorthId io : all_intraorth)
      {
        const auto f = run_bgs_mp<double, DoubleDouble>(a, X, io).factors;
        // Normalize row signs so diag(R) >= 0 (Q columns flip with them).
        Matrix<DoubleDouble> R = convert_matrix<DoubleDouble>(f.R);
        Matrix<DoubleDouble> Q = convert_matrix<DoubleDouble>(f.Q);
        for (index_t i = 0; i < R.rows(); ++i)
          if (R(i, i) < DoubleDouble(0.0))
          {
            for (index_t j = 0; j < R.cols(); ++j)
              R(i, j) = -R(i, j);
            for (index_t l = 0; l < Q.rows(); ++l)
              Q(l, i) = -Q(l, i);
          }
        const double er = rel_max_diff(R, Rref);
        const double eq = rel_max_diff(Q, tri_solve_right<DoubleDouble>(Xd.view(), R.view()));
        worst_r = std::max(worst_r, std::isnan(er) ? HUGE_VAL : er);
        worst_q = std::max(worst_q, std::isnan(eq) ? HUGE_VAL : eq);
        if (!(er <= 1e-10 && eq <= 1e-10))
        {
          r.passed = false;
          r.detail += std::string(to_string(a)) + "o" + std::string(to_string(io)) + " R err " +
                      acceptance::sci(er) + " Q err " + acceptance::sci(eq) + "; ";
        }
      }
    r.detail += "kappa=" + acceptance::sci(kappa) + " max R err " + acceptance::sci(worst_r) + ", max Q err " +
                acceptance::sci(worst_q);
    if (!(kappa <= 1e2))
    {
      r.passed = false;
      r.detail += "; kappa above 1e2";
    }
    return r;
  }

  CriterionResult block_size_independence()
  {
    CriterionResult r{0, "PIPI+oHouseQR LOO independent of block size (ratio <= 10)", true, "", 0, 0.0};
    const BlockMatrix<double> base = gen_glued(100, 10, 2, 1.0, acceptance::glued_t2(5), acceptance::seed);
    double lo = HUGE_VAL, hi = 0.0;
    for (index_t s : {1, 2, 5})
    {
      const double loo = loss_of_orthogonality<double>(
          bcgs_pipi_plus<double>(base.repartition(s), IntraorthId::HouseQR).factors.Q.view());
      r.detail += "s=" + std::to_string(s) + ": " + acceptance::sci(loo) + "; ";
      lo = std::min(lo, std::isnan(loo) ? 0.0 : loo);
      hi = std::max(hi, std::isnan(loo) ? HUGE_VAL : loo);
    }
    const double ratio = hi / lo;
    r.passed = ratio <= 10.0;
    r.detail += "ratio " + acceptance::sci(ratio);
    return r;
  }

  /// Sweep configuration of the determinism criterion (also shipped as
  /// configs/acceptance.json).
  static harness::SweepConfig determinism_config()
  {
    harness::SweepConfig cfg;
    cfg.matrix_class = MatrixClass::Glued;
    cfg.m = 100;
    cfg.p = 10;
    cfg.s = 2;
    for (int j = 2; j <= 7; ++j)
      cfg.knob_sweep.push_back({1.0, acceptance::glued_t2(j)});
    cfg.seed = acceptance::seed;
    cfg.algorithms.assign(all_algorithms.begin(), all_algorithms.end());
    cfg.ios.assign(all_intraorth.begin(), all_intraorth.end());
    cfg.mp_pair = PrecisionPair(PrecisionId::Single, PrecisionId::Double);
    return cfg;
  }

  CriterionResult determinism()
  {
    CriterionResult r{0, "`run` twice gives byte-identical results.csv", true, "", 0, 0.0};
    const auto tmp = std::filesystem::temp_directory_path() /
                     ("bgspip-acceptance-" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    const harness::SweepConfig cfg = determinism_config();
    harness::run_and_emit(cfg, {tmp / "a", 1, false, ""});
    harness::run_and_emit(cfg, {tmp / "b", 2, false, ""});
    const std::string a = slurp(tmp / "a" / "results.csv");
    const std::string b = slurp(tmp / "b" / "results.csv");
    std::error_code ec;
    std::filesystem::remove_all(tmp, ec);
    r.passed = !a.empty() && a == b;
    r.detail = std::to_string(a.size()) + " and " + std::to_string(b.size()) + " bytes, " +
               (a == b ? "identical" : "different");
    return r;
  }

private:
  template <typename Fn>
  static CriterionResult timed(const Fn& fn)
  {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try
    {
      r = fn();
    }
    catch (const std::exception& e)
    {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.time_limit > 0 && r.seconds >= r.time_limit)
    {
      r.passed = false;
      r.detail += "; runtime limit exceeded";
    }
    return r;
  }

  /// The glued double-precision sweep of criteria 2-4, one run per
  /// (algorithm, io), cached so that criterion 4 reuses 2 and 3.
  const std::vector<acceptance::Point>& glued_double(Algorithm a, IntraorthId io)
  {
    const auto key = std::make_pair(a, io);
    for (const auto& [k, v] : glued_cache_)
      if (k == key)
        return v;
    std::vector<acceptance::Point> pts;
    for (int j = 2; j <= 7; ++j)
    {
      const BlockMatrix<double> X = gen_glued(100, 10, 2, 1.0, acceptance::glued_t2(j), acceptance::seed);
      const double kappa = glued_kappa(j, X);
      auto out = harness::run_algorithm(a, X, io, PrecisionId::Double, PrecisionId::Double, kappa);
      log_residual("glued " + std::string(to_string(a)), out, false);
      pts.push_back({kappa, out});
    }
    glued_cache_.emplace_back(key, std::move(pts));
    return glued_cache_.back().second;
  }

  double glued_kappa(int j, const BlockMatrix<double>& X)
  {
    for (const auto& [jj, k] : kappa_cache_)
      if (jj == j)
        return k;
    const double k = cond2<double>(X.matrix().view());
    kappa_cache_.emplace_back(j, k);
    return k;
  }

  void log_residual(std::string where, const harness::RunOutcome& out, bool single)
  {
    if (!out.stats.had_nan)
      residuals_.push_back({std::move(where), out.report.rel_residual, single});
  }

  static double rel_max_diff(const Matrix<DoubleDouble>& A, const Matrix<DoubleDouble>& B)
  {
    double diff = 0.0, ref = 0.0;
    for (index_t j = 0; j < A.cols(); ++j)
      for (index_t i = 0; i < A.rows(); ++i)
      {
        const double d = to_double(abs(A(i, j) - B(i, j)));
        if (std::isnan(d))
          return std::numeric_limits<double>::quiet_NaN();
        diff = std::max(diff, d);
        ref = std::max(ref, to_double(abs(B(i, j))));
      }
    return diff / ref;
  }

  static std::string slurp(const std::filesystem::path& p)
  {
    std::ifstream is(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is), {});
  }

  std::vector<std::pair<std::pair<Algorithm, IntraorthId>, std::vector<acceptance::Point>>> glued_cache_;
  std::vector<std::pair<int, double>> kappa_cache_;
  std::vector<acceptance::ResidualEntry> residuals_;
  bool logged_all_ = false;
};

} // namespace bgspip

#endif
