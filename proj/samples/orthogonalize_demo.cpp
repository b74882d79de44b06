// Copyright (c) 2026 The bgspip authors
// SPDX-License-Identifier: Apache-2.0

// Orthogonalizes one glued test matrix with each uniform-precision
// algorithm and prints the three stability metrics.

#include <cstdio>

#include "bgspip/bgspip.hpp"

int main()
{
  using namespace bgspip;

  const BlockMatrix<double> X = gen_glued(100, 10, 2, 1.0, 5.2, 42);
  const double kappa = cond2<double>(X.matrix().view());
  std::printf("glued 100 x 20, s = 2, kappa = %.3e\n\n", kappa);
  std::printf("%-12s %-8s %12s %12s %12s %5s\n", "algorithm", "io", "LOO", "residual", "chol res", "syncs");

  for (Algorithm a : {Algorithm::BcgsPip, Algorithm::BcgsPipPlus, Algorithm::BcgsPipiPlus})
    for (IntraorthId io : all_intraorth)
    {
      const BgsResult<double> res = run_bgs<double>(a, X, io);
      const StabilityReport rep = stability_report<double, double>(res.factors, X.matrix(), kappa);
      std::printf("%-12s %-8s %12.3e %12.3e %12.3e %5zu\n", std::string(to_string(a)).c_str(),
                  std::string(to_string(io)).c_str(), rep.loo, rep.rel_residual, rep.rel_chol_residual,
                  res.stats.sync_points);
    }
}
