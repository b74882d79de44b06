// Copyright (c) 2026 The bgspip authors
// SPDX-License-Identifier: Apache-2.0

// Uniform single precision against the (single, double) two-precision
// variant as the condition number grows past 1/sqrt(eps_single).

#include <cstdio>

#include "bgspip/bgspip.hpp"

int main()
{
  using namespace bgspip;

  std::printf("%10s %16s %16s\n", "kappa", "PIPI+ single", "PIPI+_MP s/d");
  for (int j = 2; j <= 7; ++j)
  {
    const BlockMatrix<double> X = gen_glued(100, 10, 2, 1.0, j - 0.806, 42);
    const double kappa = cond2<double>(X.matrix().view());
    const BlockMatrix<float> Xs = X.converted<float>();

    const auto uniform = bcgs_pipi_plus<float>(Xs, IntraorthId::HouseQR);
    const auto mixed = bcgs_pipi_plus_mp<float, double>(Xs, IntraorthId::HouseQR);
    std::printf("%10.2e %16.3e %16.3e\n", kappa, loss_of_orthogonality<float>(uniform.factors.Q.view()),
                loss_of_orthogonality<float>(mixed.factors.Q.view()));
  }
}
