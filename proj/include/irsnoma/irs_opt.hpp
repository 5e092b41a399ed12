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

// IRS phase optimization for one user pair with powers and beams held fixed.
//
// The weak user's covariance-based SINR is a ratio of quadratic forms in the
// phase vector theta,
//
//     sinr(theta) = theta^H P theta / (theta^H (r P + Q) theta + n),
//
// with r = p1 / p2 and n = sigma^2 / c2_2. Every entry of theta is pinned to
// modulus 1/sqrt(N). Dinkelbach's method turns the ratio into a sequence of
// parametric problems max f - eta g, each recast as a constant-modulus
// quadratic minimization solved by ADMM.

#pragma once

#include "irsnoma/channel.hpp"
#include "irsnoma/numerics.hpp"
#include "irsnoma/powers.hpp"
#include "irsnoma/random.hpp"
#include "irsnoma/zeroforcing.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

namespace irsnoma
{

/// N reflection coefficients with |theta_n| = 1/sqrt(N), so ||theta|| = 1.
class IrsPhaseVector
{
  public:
    IrsPhaseVector() = default;

    /// Entries exp(j phase_n) / sqrt(N).
    static IrsPhaseVector from_phases(const RealVector &phases)
    {
        const double r = 1.0 / std::sqrt(static_cast<double>(phases.size()));
        ComplexVector v(phases.size());
        for (Eigen::Index n = 0; n < phases.size(); ++n)
            v(n) = std::polar(r, phases(n));
        return IrsPhaseVector(std::move(v));
    }

    /// Entrywise projection onto the circle of radius 1/sqrt(N). Zero entries
    /// keep the phase of `fallback` when given, and phase 0 otherwise.
    static IrsPhaseVector project(const ComplexVector &v, const ComplexVector *fallback = nullptr)
    {
        const double r = 1.0 / std::sqrt(static_cast<double>(v.size()));
        ComplexVector out(v.size());
        for (Eigen::Index n = 0; n < v.size(); ++n)
        {
            const double mag = std::abs(v(n));
            if (mag > 0.0)
                out(n) = v(n) * (r / mag);
            else if (fallback != nullptr && std::abs((*fallback)(n)) > 0.0)
                out(n) = (*fallback)(n) * (r / std::abs((*fallback)(n)));
            else
                out(n) = r;
        }
        return IrsPhaseVector(std::move(out));
    }

    /// Phases 2 pi U[0, 1), independent per element.
    static IrsPhaseVector random(int N, Rng &rng)
    {
        RealVector ph(N);
        for (int n = 0; n < N; ++n)
            ph(n) = 2.0 * std::numbers::pi * uniform01(rng);
        return from_phases(ph);
    }

    const ComplexVector &values() const noexcept { return theta_; }
    Eigen::Index size() const noexcept { return theta_.size(); }
    cdouble operator()(Eigen::Index n) const { return theta_(n); }

    /// max_n | |theta_n| - 1/sqrt(N) |
    double modulus_error() const
    {
        if (theta_.size() == 0)
            return 0.0;
        const double r = 1.0 / std::sqrt(static_cast<double>(theta_.size()));
        return (theta_.cwiseAbs().array() - r).abs().maxCoeff();
    }

  private:
    explicit IrsPhaseVector(ComplexVector v) : theta_(std::move(v)) {}

    ComplexVector theta_;
};

/// R_g (.) (G^H w w^H G): the matrix whose quadratic form in theta is the
/// power beam w delivers to the weak user through the IRS.
inline HermitianMatrix interference_matrix(const HermitianMatrix &R_g, const ComplexMatrix &G,
                                           const ComplexVector &w)
{
    const ComplexVector u = G.adjoint() * w;
    return hadamard(R_g, u * u.adjoint());
}

/// theta^H [R_g (.) (G^H w w^H G)] theta, i.e. T_{m,k} for w = w_k.
inline double interference_term(const ComplexVector &theta, const HermitianMatrix &R_g,
                                const ComplexMatrix &G, const ComplexVector &w)
{
    if (theta.size() != R_g.rows() || G.cols() != theta.size() || G.rows() != w.size())
        throw ContractViolation("interference_term: dimension mismatch");
    // x^H (R (.) u u^H) x = y^H R y with y = conj(u) (.) x
    const ComplexVector y = (G.adjoint() * w).conjugate().cwiseProduct(theta);
    return std::max(quadratic_form(R_g, y), 0.0);
}

inline double interference_term(const IrsPhaseVector &theta, const HermitianMatrix &R_g,
                                const ComplexMatrix &G, const ComplexVector &w)
{
    return interference_term(theta.values(), R_g, G, w);
}

/// Signal and interference covariances for one weak user.
struct FractionalProblem
{
    HermitianMatrix P;        ///< signal covariance
    HermitianMatrix Q;        ///< inter-pair interference covariance
    double power_ratio = 0.0; ///< p1 / p2 of this pair
    double noise_term = 1.0;  ///< sigma^2 / c2_2

    Eigen::Index size() const { return P.rows(); }

    /// theta^H P theta
    double f(const ComplexVector &theta) const { return quadratic_form(P, theta); }

    /// theta^H (r P + Q) theta + n ||theta||^2
    double g(const ComplexVector &theta) const
    {
        return power_ratio * quadratic_form(P, theta) + quadratic_form(Q, theta) +
               noise_term * theta.squaredNorm();
    }

    void validate() const
    {
        if (P.rows() != P.cols() || Q.rows() != P.rows() || Q.cols() != P.cols())
            throw ContractViolation("FractionalProblem: P and Q must be square of equal order");
        if (!(power_ratio >= 0.0) || !(noise_term > 0.0))
            throw ContractViolation("FractionalProblem: need power_ratio >= 0 and noise_term > 0");
        if (!is_hermitian(P, 1e-10) || !is_hermitian(Q, 1e-10))
            throw ContractViolation("FractionalProblem: P and Q must be Hermitian");
    }
};

/// P_m and Q_m for pair m under the given beams and powers.
inline FractionalProblem build_fractional_problem(const UserPairChannels &pair, const BeamSet &beams,
                                                  const PowerAllocation &powers, std::size_t m,
                                                  double sigma2_n)
{
    const auto M = beams.size();
    if (m >= M || static_cast<std::size_t>(powers.size()) != M)
        throw ContractViolation("build_fractional_problem: pair index or power vector size mismatch");
    if (!powers.nonnegative())
        throw ContractViolation("build_fractional_problem: negative power");
    const auto mi = static_cast<Eigen::Index>(m);
    if (!(powers.p2(mi) > 0.0))
        throw ContractViolation("build_fractional_problem: p2 of pair " + std::to_string(m) +
                                " is zero, power ratio undefined");

    const Eigen::Index N = pair.R_g.rows();
    const ComplexMatrix Gh = pair.G.adjoint();

    // Q = R_g (.) sum_k p_k u_k u_k^H, built as R_g (.) (U D U^H)
    Eigen::Index others = static_cast<Eigen::Index>(M) - 1;
    ComplexMatrix U(N, others);
    Eigen::Index c = 0;
    for (std::size_t k = 0; k < M; ++k)
    {
        if (k == m)
            continue;
        const double pk = powers.beam_power(static_cast<Eigen::Index>(k));
        U.col(c++) = std::sqrt(pk) * (Gh * beams.beams[k]);
    }

    const ComplexVector um = Gh * beams.beams[m];

    FractionalProblem prob;
    prob.P = powers.p2(mi) * hadamard(pair.R_g, um * um.adjoint());
    prob.Q = others > 0 ? hadamard(pair.R_g, U * U.adjoint()) : HermitianMatrix::Zero(N, N);
    prob.P = 0.5 * (prob.P + prob.P.adjoint()).eval();
    prob.Q = 0.5 * (prob.Q + prob.Q.adjoint()).eval();
    prob.power_ratio = powers.p1(mi) / powers.p2(mi);
    prob.noise_term = sigma2_n / pair.c2_2;
    return prob;
}

/// Covariance-based weak-user SINR for a (nominally) constant-modulus theta.
inline double sinr_weak(const ComplexVector &theta, const FractionalProblem &prob)
{
    const double num = quadratic_form(prob.P, theta);
    const double den =
        prob.power_ratio * num + quadratic_form(prob.Q, theta) + prob.noise_term;
    return std::max(num, 0.0) / den;
}

inline double sinr_weak(const IrsPhaseVector &theta, const FractionalProblem &prob)
{
    return sinr_weak(theta.values(), prob);
}

struct EigenSolution
{
    ComplexVector theta; ///< unit norm, not constant modulus
    double sinr = 0.0;   ///< lambda_max, an upper bound on any constant-modulus SINR
};

/// Unit-norm maximizer of the SINR ratio: the dominant generalized eigenpair of
/// (P, r P + Q + n I), computed through a Cholesky reduction.
inline EigenSolution unconstrained_eig_solution(const FractionalProblem &prob)
{
    prob.validate();
    const Eigen::Index N = prob.size();
    const HermitianMatrix B =
        prob.power_ratio * prob.P + prob.Q + prob.noise_term * HermitianMatrix::Identity(N, N);

    Eigen::LLT<ComplexMatrix> llt(B);
    if (llt.info() != Eigen::Success)
        throw NumericError("unconstrained_eig_solution: denominator matrix is not positive definite");

    // C = L^-1 P L^-H
    ComplexMatrix C = llt.matrixL().solve(prob.P);
    C = llt.matrixL().solve(C.adjoint().eval()).eval();
    C = 0.5 * (C + C.adjoint()).eval();

    const auto eig = hermitian_eig(C);
    ComplexVector theta = llt.matrixU().solve(eig.vectors.col(0));
    theta.normalize();
    fix_global_phase(theta);
    return {std::move(theta), std::max(eig.values(0), 0.0)};
}

/// Penalty used when AdmmParams::rho is left at zero: this fraction of the
/// largest eigenvalue of S.
inline constexpr double kAdmmPenaltyScale = 0.5;

struct AdmmParams
{
    double tolerance = 1e-8;   ///< primal and dual residual bound
    int max_iterations = 2000;
    double rho = 0.0;          ///< penalty; <= 0 selects kAdmmPenaltyScale * lambda_max(S)
};

struct AdmmResult
{
    IrsPhaseVector theta;
    double objective = 0.0;       ///< 0.5 theta^H S theta
    double initial_objective = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Dense PSD matrix S with a cached Cholesky factor of S + rho I.
class DenseQuadratic
{
  public:
    explicit DenseQuadratic(HermitianMatrix S) : S_(std::move(S))
    {
        if (S_.rows() != S_.cols())
            throw ContractViolation("DenseQuadratic: S must be square");
        const double tr = trace();
        const double slack = 1e-8 * std::max(std::abs(tr), std::numeric_limits<double>::min());
        Eigen::LLT<ComplexMatrix> check(S_ + slack * HermitianMatrix::Identity(size(), size()));
        if (check.info() != Eigen::Success)
            throw ContractViolation("admm: S is not positive semidefinite");
    }

    Eigen::Index size() const { return S_.rows(); }
    double trace() const { return S_.trace().real(); }
    double max_eigenvalue() const { return irsnoma::max_eigenvalue(S_); }
    ComplexVector apply(const ComplexVector &x) const { return S_ * x; }

    void set_shift(double rho)
    {
        factor_.compute(S_ + rho * HermitianMatrix::Identity(size(), size()));
        if (factor_.info() != Eigen::Success)
            throw NumericError("admm: factorization of S + rho I failed");
    }

    ComplexVector solve_shifted(const ComplexVector &b) const { return factor_.solve(b); }

  private:
    HermitianMatrix S_;
    Eigen::LLT<ComplexMatrix> factor_;
};

/// S = kappa I - V C V^H with orthonormal V (N x r) and Hermitian C (r x r).
/// Shifted solves use (a I - V C V^H)^-1 = (I - V V^H) / a + V (a I - C)^-1 V^H,
/// so every ADMM step costs O(N r).
class ShiftedLowRankQuadratic
{
  public:
    ShiftedLowRankQuadratic(double kappa, ComplexMatrix V, HermitianMatrix C, RealVector C_eigenvalues)
        : kappa_(kappa), V_(std::move(V)), C_(std::move(C)), evC_(std::move(C_eigenvalues))
    {
        const double top = evC_.size() > 0 ? evC_(0) : 0.0;
        const double bound = V_.cols() < V_.rows() ? std::max(top, 0.0) : top;
        if (kappa_ < bound - 1e-8 * std::max(std::abs(bound), 1e-300))
            throw ContractViolation("admm: kappa below the largest eigenvalue, S not PSD");
    }

    Eigen::Index size() const { return V_.rows(); }
    double trace() const { return kappa_ * static_cast<double>(size()) - C_.trace().real(); }

    /// kappa - lambda_min(V C V^H), counting the zero eigenvalues off the subspace.
    double max_eigenvalue() const
    {
        double lo = evC_.size() > 0 ? evC_(evC_.size() - 1) : 0.0;
        if (V_.cols() < V_.rows())
            lo = std::min(lo, 0.0);
        return kappa_ - lo;
    }

    ComplexVector apply(const ComplexVector &x) const
    {
        return kappa_ * x - V_ * (C_ * (V_.adjoint() * x));
    }

    void set_shift(double rho)
    {
        a_ = kappa_ + rho;
        const Eigen::Index r = C_.rows();
        const HermitianMatrix K = a_ * HermitianMatrix::Identity(r, r) - C_;
        Eigen::LLT<ComplexMatrix> llt(K);
        if (llt.info() != Eigen::Success)
            throw NumericError("admm: reduced factorization failed");
        W_ = V_ * llt.solve(HermitianMatrix::Identity(r, r));
    }

    ComplexVector solve_shifted(const ComplexVector &b) const
    {
        const ComplexVector c = V_.adjoint() * b;
        return (b - V_ * c) / a_ + W_ * c;
    }

  private:
    double kappa_;
    ComplexMatrix V_;
    HermitianMatrix C_;
    RealVector evC_;
    double a_ = 0.0;
    ComplexMatrix W_;
};

/// ADMM for min 0.5 theta^H S theta subject to |theta_n| = 1/sqrt(N).
///
/// Splits theta = z with z on the modulus circle: a linear solve with the cached
/// factorization of S + rho I, an entrywise projection, and a scaled dual update
/// u <- u + theta - z. The problem is nonconvex, so the best projected iterate
/// seen (including theta0 itself) is returned.
template <class Quadratic>
AdmmResult admm_minimize(Quadratic &S, const IrsPhaseVector &theta0, const AdmmParams &params = {})
{
    const Eigen::Index N = S.size();
    if (theta0.size() != N)
        throw ContractViolation("admm: dimension mismatch");

    auto objective = [&S](const ComplexVector &x) { return 0.5 * x.dot(S.apply(x)).real(); };

    AdmmResult res;
    res.theta = IrsPhaseVector::project(theta0.values());
    res.initial_objective = objective(res.theta.values());
    res.objective = res.initial_objective;

    const double top = S.max_eigenvalue();
    if (!(top > 0.0) || !(S.trace() > 0.0))
    {
        // S = 0: every feasible point is optimal
        res.converged = true;
        return res;
    }

    const double rho = params.rho > 0.0 ? params.rho : kAdmmPenaltyScale * top;
    S.set_shift(rho);

    ComplexVector z = res.theta.values();
    ComplexVector u = ComplexVector::Zero(N);
    ComplexVector theta(N);
    ComplexVector z_prev(N);

    for (int it = 1; it <= params.max_iterations; ++it)
    {
        theta = S.solve_shifted(rho * (z - u));
        z_prev = z;
        z = IrsPhaseVector::project(theta + u, &z_prev).values();
        u += theta - z;

        const double obj = objective(z);
        if (obj < res.objective)
        {
            res.objective = obj;
            res.theta = IrsPhaseVector::project(z);
        }
        res.iterations = it;

        const double primal = (theta - z).norm();
        const double dual = rho * (z - z_prev).norm();
        if (primal <= params.tolerance && dual <= params.tolerance)
        {
            res.converged = true;
            break;
        }
    }
    return res;
}

/// Dense entry point. Throws ContractViolation when S is indefinite beyond
/// -1e-8 trace(S).
inline AdmmResult admm_constant_modulus_min(const HermitianMatrix &S, const IrsPhaseVector &theta0,
                                            const AdmmParams &params = {})
{
    if (S.rows() != theta0.size())
        throw ContractViolation("admm_constant_modulus_min: dimension mismatch");
    DenseQuadratic op(S);
    return admm_minimize(op, theta0, params);
}

/// Per-iteration record of Dinkelbach's method.
struct DinkelbachTrace
{
    std::vector<double> etas;       ///< eta_n
    std::vector<double> F_values;   ///< F(eta_n) = f(theta_n) - eta_n g(theta_n)
    std::vector<double> objectives; ///< 0.5 theta_n^H S_n theta_n
    std::vector<int> admm_iterations;
    int iterations = 0;

    /// CSV dump: iteration, eta, F, objective.
    void write_csv(std::ostream &os) const
    {
        const auto old = os.precision(17);
        os << "iteration,eta,F,objective\n";
        for (std::size_t i = 0; i < etas.size(); ++i)
            os << i << ',' << etas[i] << ',' << F_values[i] << ',' << objectives[i] << '\n';
        os.precision(old);
    }
};

class DinkelbachNotConverged : public NumericError
{
  public:
    DinkelbachNotConverged(const std::string &what, DinkelbachTrace trace, IrsPhaseVector last)
        : NumericError(what), trace_(std::move(trace)), last_(std::move(last))
    {
    }
    const DinkelbachTrace &trace() const noexcept { return trace_; }
    /// Final iterate; feasible, and at least as good as the initial point.
    const IrsPhaseVector &last_theta() const noexcept { return last_; }

  private:
    DinkelbachTrace trace_;
    IrsPhaseVector last_;
};

struct DinkelbachOptions
{
    /// Stop once F(eta_n) <= eps * f(theta_n), i.e. the last step raised the
    /// SINR by less than this fraction. With relative = false the test is F <= eps.
    double eps = 1e-4;
    bool relative = true;
    int max_iterations = 100;
    AdmmParams admm{1e-8, 50, 0.0};
    /// Coordinate-ascent sweeps applied after each ADMM solve; 0 disables.
    int polish_sweeps = 20;
    /// Each step also runs ADMM from the projected top eigenvector of D and keeps the better point.
    bool eigen_candidate = true;
};

struct DinkelbachResult
{
    IrsPhaseVector theta;
    DinkelbachTrace trace;
    double sinr = 0.0;
};

/// Orthonormal basis of range(P) + range(Q) for PSD P, Q. Every Dinkelbach
/// matrix (1 - eta r) P - eta Q acts inside it and vanishes on its complement.
inline ComplexMatrix joint_range_basis(const FractionalProblem &prob)
{
    const HermitianMatrix sum = prob.P + prob.Q;
    const auto eig = hermitian_eig(0.5 * (sum + sum.adjoint()));
    const double cutoff = kRankCutoff * std::max(eig.values(0), 0.0);
    Eigen::Index r = 0;
    while (r < eig.values.size() && eig.values(r) > cutoff && eig.values(r) > 0.0)
        ++r;
    return eig.vectors.leftCols(r);
}

/// Cyclic coordinate ascent on theta^H D theta over the modulus circle. Each
/// element moves to the phase of its local field, so the objective never
/// decreases. Returns the number of sweeps.
inline int coordinate_ascent(const HermitianMatrix &D, IrsPhaseVector &theta, int max_sweeps = 50,
                             double rel_tol = 1e-12)
{
    const Eigen::Index N = theta.size();
    if (D.rows() != N || D.cols() != N)
        throw ContractViolation("coordinate_ascent: dimension mismatch");
    const double mod = 1.0 / std::sqrt(static_cast<double>(N));
    ComplexVector x = theta.values();
    ComplexVector y = D * x;
    double obj = x.dot(y).real();
    int sweeps = 0;
    for (; sweeps < max_sweeps; ++sweeps)
    {
        const double before = obj;
        for (Eigen::Index n = 0; n < N; ++n)
        {
            const cdouble field = y(n) - D(n, n) * x(n);
            const double mag = std::abs(field);
            if (mag == 0.0)
                continue;
            const cdouble next = mod * field / mag;
            const cdouble delta = next - x(n);
            if (delta == cdouble(0.0))
                continue;
            x(n) = next;
            y += D.col(n) * delta;
        }
        y = D * x;
        obj = x.dot(y).real();
        if (obj - before <= rel_tol * std::max(std::abs(obj), 1e-300))
        {
            ++sweeps;
            break;
        }
    }
    if (obj >= quadratic_form(D, theta.values()))
        theta = IrsPhaseVector::project(x);
    return sweeps;
}

/// Dinkelbach's method for the constant-modulus SINR maximization. Starts at
/// eta = 0 and warm-starts each ADMM solve from the previous phase vector.
/// Throws DinkelbachNotConverged, carrying the trace, after max_iterations.
inline DinkelbachResult dinkelbach_optimize(const FractionalProblem &prob, const IrsPhaseVector &theta_init,
                                            const DinkelbachOptions &opts = {})
{
    prob.validate();
    if (!(opts.eps > 0.0 && opts.eps < 1.0))
        throw ContractViolation("dinkelbach_optimize: eps must lie in (0, 1)");
    if (theta_init.size() != prob.size() || theta_init.modulus_error() > 1e-9)
        throw ContractViolation("dinkelbach_optimize: initial phase vector is not feasible");

    const ComplexMatrix V = joint_range_basis(prob);
    const HermitianMatrix Pr = V.adjoint() * prob.P * V;
    const HermitianMatrix Qr = V.adjoint() * prob.Q * V;
    const bool has_complement = V.cols() < V.rows();

    DinkelbachResult res;
    IrsPhaseVector theta = theta_init;
    double eta = 0.0;

    for (int n = 0; n < opts.max_iterations; ++n)
    {
        // D = (1 - eta r) P - eta Q = V C V^H, S = kappa I - D
        HermitianMatrix C = (1.0 - eta * prob.power_ratio) * Pr - eta * Qr;
        C = 0.5 * (C + C.adjoint()).eval();
        const auto eigC = C.rows() > 0 ? hermitian_eig(C) : EigenDecomposition{};
        double kappa_max = eigC.values.size() > 0 ? eigC.values(0) : 0.0;
        if (has_complement)
            kappa_max = std::max(kappa_max, 0.0);
        const double kappa = kappa_max + 1e-9 * std::abs(kappa_max);

        const HermitianMatrix D = (1.0 - eta * prob.power_ratio) * prob.P - eta * prob.Q;
        ShiftedLowRankQuadratic S(kappa, V, C, eigC.values);
        const AdmmResult step = admm_minimize(S, theta, opts.admm);
        theta = step.theta;
        if (opts.polish_sweeps > 0)
            coordinate_ascent(D, theta, opts.polish_sweeps);
        if (opts.eigen_candidate && eigC.values.size() > 0)
        {
            IrsPhaseVector alt = IrsPhaseVector::project(V * eigC.vectors.col(0), &theta.values());
            alt = admm_minimize(S, alt, opts.admm).theta;
            if (opts.polish_sweeps > 0)
                coordinate_ascent(D, alt, opts.polish_sweeps);
            if (quadratic_form(D, alt.values()) > quadratic_form(D, theta.values()))
                theta = std::move(alt);
        }
        const double objective = 0.5 * theta.values().dot(S.apply(theta.values())).real();

        const double f = prob.f(theta.values());
        const double g = prob.g(theta.values());
        const double F = f - eta * g;

        res.trace.etas.push_back(eta);
        res.trace.F_values.push_back(F);
        res.trace.objectives.push_back(objective);
        res.trace.admm_iterations.push_back(step.iterations);
        res.trace.iterations = n + 1;

        if (F <= opts.eps * (opts.relative ? f : 1.0))
        {
            res.theta = theta;
            res.sinr = sinr_weak(theta, prob);
            return res;
        }
        eta = f / g;
    }
    throw DinkelbachNotConverged("dinkelbach_optimize: no convergence after " +
                                     std::to_string(opts.max_iterations) + " iterations",
                                 std::move(res.trace), std::move(theta));
}

} // namespace irsnoma
