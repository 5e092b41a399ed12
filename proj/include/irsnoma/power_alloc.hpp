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

#include "irsnoma/channel.hpp"
#include "irsnoma/error.hpp"
#include "irsnoma/irs_opt.hpp"
#include "irsnoma/numerics.hpp"
#include "irsnoma/powers.hpp"
#include "irsnoma/zeroforcing.hpp"

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

namespace irsnoma
{

/// Gains at or below this make a strong user unserviceable.
inline constexpr double kMinSignalGain = 1e-15;

/// T(m, k) = theta_m^H [R_g,m (.) (G_m^H w_k w_k^H G_m)] theta_m.
inline RealMatrix interference_gains(const std::vector<UserPairChannels> &pairs, const BeamSet &beams,
                                     const std::vector<IrsPhaseVector> &thetas)
{
    const auto M = pairs.size();
    if (beams.size() != M || thetas.size() != M)
        throw ContractViolation("interference_gains: pairs, beams and thetas differ in length");
    const auto Mi = static_cast<Eigen::Index>(M);
    RealMatrix T(Mi, Mi);
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t k = 0; k < M; ++k)
            T(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) =
                interference_term(thetas[m], pairs[m].R_g, pairs[m].G, beams.beams[k]);
    return T;
}

/// Power that puts the zeroforced strong user exactly at gamma_th.
inline double strong_user_power(double gamma_th, double sigma2_n, double c2_1, double signal_gain)
{
    if (!(signal_gain > kMinSignalGain))
        throw InfeasibleError("strong_user_power: signal gain " + std::to_string(signal_gain) +
                              " too small, user unserviceable");
    if (!(gamma_th > 0.0) || !(sigma2_n > 0.0) || !(c2_1 > 0.0))
        throw ContractViolation("strong_user_power: gamma_th, sigma2_n and c2_1 must be positive");
    return gamma_th * sigma2_n / (c2_1 * signal_gain);
}

inline RealVector strong_user_powers(const std::vector<UserPairChannels> &pairs, const BeamSet &beams,
                                     double gamma_th, double sigma2_n)
{
    RealVector p1(static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t m = 0; m < pairs.size(); ++m)
    {
        try
        {
            p1(static_cast<Eigen::Index>(m)) =
                strong_user_power(gamma_th, sigma2_n, pairs[m].c2_1, beams.signal_gain[m]);
        }
        catch (const InfeasibleError &e)
        {
            throw InfeasibleError("pair " + std::to_string(m) + ": " + e.what());
        }
    }
    return p1;
}

/// Strong-user SINR c2_1 p1 w^H R_h w / (c2_1 sum_{k != m} p_k w_k^H R_h w_k + sigma2).
/// The interference sum vanishes for zeroforcing beams.
inline RealVector sinr_strong(const std::vector<UserPairChannels> &pairs, const BeamSet &beams,
                              const PowerAllocation &powers, double sigma2_n)
{
    const auto M = pairs.size();
    RealVector out(static_cast<Eigen::Index>(M));
    for (std::size_t m = 0; m < M; ++m)
    {
        const auto mi = static_cast<Eigen::Index>(m);
        double interference = 0.0;
        for (std::size_t k = 0; k < M; ++k)
            if (k != m)
                interference += powers.beam_power(static_cast<Eigen::Index>(k)) *
                                quadratic_form(pairs[m].R_h, beams.beams[k]);
        const double c2 = pairs[m].c2_1;
        out(mi) = c2 * powers.p1(mi) * quadratic_form(pairs[m].R_h, beams.beams[m]) /
                  (c2 * interference + sigma2_n);
    }
    return out;
}

/// Weak-user SINR from the interference gains:
/// p2_m T_mm / (p1_m T_mm + sum_{k != m} p_k T_mk + sigma2 / c2_2,m).
inline RealVector sinr_weak_all(const RealMatrix &T, const PowerAllocation &powers, double sigma2_n,
                                const RealVector &c2_2)
{
    const Eigen::Index M = T.rows();
    if (T.cols() != M || powers.size() != M || c2_2.size() != M)
        throw ContractViolation("sinr_weak_all: dimension mismatch");
    RealVector out(M);
    for (Eigen::Index m = 0; m < M; ++m)
    {
        double den = powers.p1(m) * T(m, m) + sigma2_n / c2_2(m);
        for (Eigen::Index k = 0; k < M; ++k)
            if (k != m)
                den += powers.beam_power(k) * T(m, k);
        out(m) = powers.p2(m) * T(m, m) / den;
    }
    return out;
}

/// Weak-user SINR equations in the form p2 = C Lambda (T0 p2 + zeta).
struct BalanceProblem
{
    RealMatrix T;       ///< interference gains, T(m, k)
    RealMatrix T_off;   ///< T with its diagonal zeroed
    RealVector Lambda;  ///< gamma_th / T(m, m)
    RealVector zeta;    ///< sum_k p1_k T(m, k) + sigma2 / c2_2,m
    double Ptot2 = 0.0; ///< weak-user budget

    Eigen::Index size() const { return T.rows(); }

    /// Lambda T_off as a dense matrix.
    RealMatrix coupling() const { return Lambda.asDiagonal() * T_off; }

    void validate() const
    {
        const Eigen::Index M = size();
        if (T.cols() != M || T_off.rows() != M || T_off.cols() != M || Lambda.size() != M || zeta.size() != M)
            throw ContractViolation("BalanceProblem: dimension mismatch");
        if ((T.array() < 0.0).any())
            throw ContractViolation("BalanceProblem: negative interference gain");
        if (!(zeta.array() > 0.0).all())
            throw ContractViolation("BalanceProblem: zeta must be positive");
        if (!(Lambda.array() > 0.0).all() || !Lambda.allFinite())
            throw ContractViolation("BalanceProblem: Lambda must be positive and finite");
    }
};

/// The zeta term counts every strong-user power, including the pair's own p1:
/// the weak user decodes while its partner's signal is still present.
inline BalanceProblem make_balance_problem(const RealMatrix &T, const RealVector &p1, double gamma_th,
                                           double sigma2_n, const RealVector &c2_2, double Ptot2)
{
    const Eigen::Index M = T.rows();
    if (T.cols() != M || p1.size() != M || c2_2.size() != M)
        throw ContractViolation("make_balance_problem: dimension mismatch");
    BalanceProblem bp;
    bp.T = T;
    bp.T_off = T;
    bp.T_off.diagonal().setZero();
    bp.Lambda.resize(M);
    bp.zeta.resize(M);
    for (Eigen::Index m = 0; m < M; ++m)
    {
        if (!(T(m, m) > 0.0))
            throw InfeasibleError("make_balance_problem: weak user " + std::to_string(m) +
                                  " receives no signal through the IRS (T_mm = 0)");
        bp.Lambda(m) = gamma_th / T(m, m);
        bp.zeta(m) = T.row(m).dot(p1) + sigma2_n / c2_2(m);
    }
    bp.Ptot2 = Ptot2;
    bp.validate();
    return bp;
}

struct PerronResult
{
    double value = 0.0;
    RealVector vector; ///< nonnegative, unit infinity norm
    int iterations = 0;
};

namespace detail
{

inline void check_perron_residual(const RealMatrix &A, const PerronResult &res, double bound)
{
    const double resid = (A * res.vector - res.value * res.vector).cwiseAbs().maxCoeff();
    if (resid > 1e-8 * bound)
        throw NumericError("perron_eigenpair: dominant eigenpair residual " + std::to_string(resid) +
                           ", eigenvalue complex or defective");
}

/// Dense fallback: the eigenvalue with the largest real part is the Perron root.
inline PerronResult perron_dense(const RealMatrix &A, double bound)
{
    const Eigen::EigenSolver<RealMatrix> es(A);
    if (es.info() != Eigen::Success)
        throw NumericError("perron_eigenpair: dense eigensolver failed");
    Eigen::Index best = 0;
    es.eigenvalues().real().maxCoeff(&best);
    Eigen::VectorXcd v = es.eigenvectors().col(best);
    Eigen::Index big = 0;
    v.cwiseAbs().maxCoeff(&big);
    v /= v(big);
    PerronResult res;
    res.value = es.eigenvalues()(best).real();
    res.vector = v.real();
    if ((res.vector.array() < -1e-9).any())
        throw NumericError("perron_eigenpair: dense Perron vector has negative entries");
    res.vector = res.vector.cwiseMax(0.0);
    check_perron_residual(A, res, bound);
    return res;
}

} // namespace detail

/// Perron root and vector of a nonnegative square matrix by power iteration on
/// A + tau I, tau = 0.1 max row sum. The shift removes periodicity without
/// changing the eigenvector. When the iteration stalls (eigenvalue ratio close
/// to one) the pair comes from a dense eigensolver instead; iterations is then
/// reported as -1.
inline PerronResult perron_eigenpair(const RealMatrix &A, double rel_tol = 1e-12, int max_iterations = 100000)
{
    const Eigen::Index n = A.rows();
    if (A.cols() != n || n == 0)
        throw ContractViolation("perron_eigenpair: need a nonempty square matrix");
    if ((A.array() < 0.0).any() || !A.allFinite())
        throw ContractViolation("perron_eigenpair: matrix must be finite and nonnegative");

    PerronResult res;
    const double bound = A.rowwise().sum().maxCoeff();
    if (bound == 0.0)
    {
        res.vector = RealVector::Ones(n);
        return res;
    }
    const double tau = 0.1 * bound;
    RealVector x = RealVector::Ones(n);
    RealVector y(n);
    for (int it = 1; it <= max_iterations; ++it)
    {
        y = A * x + tau * x;
        const double scale = y.maxCoeff();
        y /= scale;
        const double change = (y - x).cwiseAbs().maxCoeff();
        x = y;
        res.iterations = it;
        if (change <= rel_tol)
        {
            res.value = scale - tau;
            res.vector = x;
            detail::check_perron_residual(A, res, bound);
            return res;
        }
    }
    res = detail::perron_dense(A, bound);
    res.iterations = -1;
    return res;
}

/// Spectral radius of the Lambda T_off coupling matrix.
inline double coupling_spectral_radius(const BalanceProblem &bp)
{
    return perron_eigenpair(bp.coupling()).value;
}

struct BalanceResult
{
    double C = 0.0;   ///< common SINR-to-threshold ratio
    RealVector p2;
    double lambda_max = 0.0;
};

/// Max-min SINR balancing under sum(p2) = Ptot2, from the Perron pair of
/// Upsilon = [[Lambda T_off, Lambda zeta], [1^T Lambda T_off / P, 1^T Lambda zeta / P]].
inline BalanceResult sinr_balance(const BalanceProblem &bp)
{
    bp.validate();
    if (!(bp.Ptot2 > 0.0))
        throw ContractViolation("sinr_balance: Ptot2 must be positive");
    const Eigen::Index M = bp.size();
    const RealMatrix A = bp.coupling();
    const RealVector b = bp.Lambda.cwiseProduct(bp.zeta);

    RealMatrix U(M + 1, M + 1);
    U.topLeftCorner(M, M) = A;
    U.topRightCorner(M, 1) = b;
    U.bottomLeftCorner(1, M) = A.colwise().sum() / bp.Ptot2;
    U(M, M) = b.sum() / bp.Ptot2;

    const PerronResult pr = perron_eigenpair(U);
    if (!(pr.value > 0.0))
        throw NumericError("sinr_balance: nonpositive Perron root");
    if (!(pr.vector(M) > 0.0))
        throw NumericError("sinr_balance: Perron vector has a vanishing last entry");

    BalanceResult res;
    res.lambda_max = pr.value;
    res.C = 1.0 / pr.value;
    res.p2 = pr.vector.head(M) / pr.vector(M);
    if ((res.p2.array() < -1e-12 * bp.Ptot2).any())
        throw NumericError("sinr_balance: Perron vector has negative entries");
    res.p2 = res.p2.cwiseMax(0.0);
    return res;
}

/// Threshold at which the coupling spectral radius counts as reaching 1.
inline constexpr double kSpectralRadiusLimit = 1.0 - 1e-9;

/// Weak-user powers meeting gamma_th with equality: (I - Lambda T_off)^-1 Lambda zeta.
inline RealVector min_power_solve(const BalanceProblem &bp)
{
    bp.validate();
    const Eigen::Index M = bp.size();
    const double radius = coupling_spectral_radius(bp);
    if (!(radius < kSpectralRadiusLimit))
        throw InfeasibleError("min_power_solve: coupling spectral radius " + std::to_string(radius) +
                              " >= 1, threshold unreachable at any power");
    const RealMatrix A = RealMatrix::Identity(M, M) - bp.coupling();
    RealVector p2 = linear_solve(A, bp.Lambda.cwiseProduct(bp.zeta));
    if (!(p2.array() > 0.0).all())
        throw NumericError("min_power_solve: solution has nonpositive entries");
    return p2;
}

/// Reports pairs whose weak user gets less power than the strong user.
inline bool check_noma_ordering(const PowerAllocation &powers, std::ostream *warn = &std::clog)
{
    bool ok = true;
    for (Eigen::Index m = 0; m < powers.size(); ++m)
    {
        if (powers.p2(m) < powers.p1(m))
        {
            ok = false;
            if (warn != nullptr)
                *warn << "warning: pair " << m << " violates NOMA ordering (p2 = " << powers.p2(m)
                      << " < p1 = " << powers.p1(m) << ")\n";
        }
    }
    return ok;
}

} // namespace irsnoma
