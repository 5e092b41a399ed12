// SPDX-License-Identifier: Apache-2.0
//
// irsnoma - IRS phase and NOMA power optimization from channel statistics
// Copyright (C) 2026 The irsnoma authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "irsnoma/irs_opt.hpp"
#include "irsnoma/numerics.hpp"
#include "irsnoma/random.hpp"

#include <cmath>
#include <numbers>

namespace irsnoma::testing
{

inline ComplexMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng &rng)
{
    ComplexMatrix A(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            A(r, c) = complex_normal(rng);
    return A;
}

inline ComplexVector random_vector(Eigen::Index n, Rng &rng)
{
    return random_matrix(n, 1, rng).col(0);
}

inline HermitianMatrix random_hermitian(Eigen::Index n, Rng &rng)
{
    const ComplexMatrix A = random_matrix(n, n, rng);
    return 0.5 * (A + A.adjoint());
}

/// X X^H with X of n x rank.
inline HermitianMatrix random_psd(Eigen::Index n, Eigen::Index rank, Rng &rng)
{
    const ComplexMatrix X = random_matrix(n, rank, rng);
    HermitianMatrix S = X * X.adjoint();
    return 0.5 * (S + S.adjoint());
}

/// Fractional problem with signal R (.) (u u^H) and `interferers` rank-one
/// interference terms, all from random PSD R and random u.
inline FractionalProblem random_problem(Eigen::Index N, int interferers, double power_ratio, double noise,
                                        Rng &rng)
{
    const HermitianMatrix R = random_psd(N, N, rng);
    const ComplexVector u = random_vector(N, rng);
    FractionalProblem prob;
    prob.P = hadamard(R, u * u.adjoint());
    prob.Q = HermitianMatrix::Zero(N, N);
    for (int k = 0; k < interferers; ++k)
    {
        const ComplexVector v = random_vector(N, rng);
        prob.Q += uniform(rng, 0.2, 1.0) * hadamard(R, v * v.adjoint());
    }
    prob.P = 0.5 * (prob.P + prob.P.adjoint()).eval();
    prob.Q = 0.5 * (prob.Q + prob.Q.adjoint()).eval();
    prob.power_ratio = power_ratio;
    prob.noise_term = noise;
    return prob;
}

/// Largest sinr_weak over every theta with phases from a `levels`-point grid,
/// enumerated for all N elements.
inline double grid_max_sinr(const FractionalProblem &prob, int levels)
{
    const Eigen::Index N = prob.size();
    std::vector<int> idx(static_cast<std::size_t>(N), 0);
    RealVector ph(N);
    double best = 0.0;
    while (true)
    {
        for (Eigen::Index n = 0; n < N; ++n)
            ph(n) = 2.0 * std::numbers::pi * idx[static_cast<std::size_t>(n)] / levels;
        best = std::max(best, sinr_weak(IrsPhaseVector::from_phases(ph), prob));
        Eigen::Index n = 0;
        while (n < N && ++idx[static_cast<std::size_t>(n)] == levels)
            idx[static_cast<std::size_t>(n++)] = 0;
        if (n == N)
            break;
    }
    return best;
}

/// Phase-alignment optimum for Q = 0, power_ratio = 0 and P = p2 v v^H:
/// p2 (sum_n |v_n| / sqrt(N))^2 / noise.
inline double phase_alignment_sinr(const ComplexVector &v, double p2, double noise)
{
    const double s = v.cwiseAbs().sum() / std::sqrt(static_cast<double>(v.size()));
    return p2 * s * s / noise;
}

} // namespace irsnoma::testing
