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
#include "irsnoma/power_alloc.hpp"
#include "irsnoma/powers.hpp"
#include "irsnoma/random.hpp"
#include "irsnoma/zeroforcing.hpp"

#include <algorithm>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace irsnoma
{

struct SolverConfig
{
    double eps_gamma = 1e-3;      ///< ratio-gap termination tolerance
    double eps_dinkelbach = 1e-4; ///< relative Dinkelbach tolerance
    double Pmax = 0.0;            ///< total budget [W]; <= 0 selects 100 M sigma2
    double Pmax_growth = 10.0;
    int max_escalations = 10;
    int max_outer_iterations = 50;
    DinkelbachOptions dinkelbach{}; ///< eps is overridden by eps_dinkelbach
    /// Called after every per-pair Dinkelbach run with (outer iteration, pair, trace).
    std::function<void(int, std::size_t, const DinkelbachTrace &)> on_dinkelbach;

    void validate() const
    {
        if (!(eps_gamma > 0.0) || !(eps_dinkelbach > 0.0 && eps_dinkelbach < 1.0))
            throw ConfigError("SolverConfig: eps_gamma must be > 0 and eps_dinkelbach in (0, 1)");
        if (!(Pmax_growth > 1.0))
            throw ConfigError("SolverConfig: Pmax growth factor must exceed 1");
        if (max_outer_iterations < 1 || max_escalations < 0)
            throw ConfigError("SolverConfig: iteration limits must be positive");
    }

    double initial_budget(int M, double sigma2_n) const
    {
        return Pmax > 0.0 ? Pmax : 100.0 * M * sigma2_n;
    }
};

enum class PowerBranch
{
    balance,
    min_power,
    escalate
};

inline const char *to_string(PowerBranch b)
{
    switch (b)
    {
    case PowerBranch::balance:
        return "balance";
    case PowerBranch::min_power:
        return "min_power";
    case PowerBranch::escalate:
        return "escalate";
    }
    return "unknown";
}

struct JointIteration
{
    int iteration = 0;
    PowerBranch branch = PowerBranch::balance;
    double Pmax = 0.0;
    double C = 0.0;
    double total_power = 0.0; ///< sum of the powers computed in this iteration
    double min_ratio = 0.0;   ///< min_m gamma_2 / gamma_th with new thetas, previous powers
    double max_ratio = 0.0;
    int dinkelbach_unconverged = 0;
};

struct JointTrace
{
    std::vector<JointIteration> iterations;

    void write_csv(std::ostream &os) const
    {
        const auto old = os.precision(17);
        os << "iteration,branch,Pmax_W,C,total_power_W,min_ratio,max_ratio,gap,dinkelbach_unconverged\n";
        for (const auto &it : iterations)
            os << it.iteration << ',' << to_string(it.branch) << ',' << it.Pmax << ',' << it.C << ','
               << it.total_power << ',' << it.min_ratio << ',' << it.max_ratio << ','
               << it.max_ratio - it.min_ratio << ',' << it.dinkelbach_unconverged << '\n';
        os.precision(old);
    }
};

struct JointSolution
{
    std::vector<IrsPhaseVector> thetas;
    PowerAllocation powers;
    RealVector sinr_strong;
    RealVector sinr_weak;
    double total_power = 0.0;
    double C = 0.0; ///< C of the returned powers
    bool converged = false;
    int iterations = 0;
    int escalations = 0;
    double Pmax = 0.0;
    JointTrace trace;
};

namespace detail
{

inline std::vector<IrsPhaseVector> random_thetas(std::size_t M, int N, Rng &rng)
{
    std::vector<IrsPhaseVector> out;
    out.reserve(M);
    for (std::size_t m = 0; m < M; ++m)
        out.push_back(IrsPhaseVector::random(N, rng));
    return out;
}

/// Per-pair IRS step. A pair keeps its previous theta whenever the new one
/// gives a lower weak-user SINR under the same powers.
inline std::vector<IrsPhaseVector> irs_step(const std::vector<UserPairChannels> &pairs, const BeamSet &beams,
                                            const PowerAllocation &powers, double sigma2_n,
                                            const std::vector<IrsPhaseVector> &prev, const DinkelbachOptions &opts,
                                            int &unconverged,
                                            const std::function<void(std::size_t, const DinkelbachTrace &)> &report)
{
    std::vector<IrsPhaseVector> out = prev;
    for (std::size_t m = 0; m < pairs.size(); ++m)
    {
        if (!(powers.p2(static_cast<Eigen::Index>(m)) > 0.0))
            continue;
        const FractionalProblem prob = build_fractional_problem(pairs[m], beams, powers, m, sigma2_n);
        IrsPhaseVector cand;
        try
        {
            DinkelbachResult r = dinkelbach_optimize(prob, prev[m], opts);
            if (report)
                report(m, r.trace);
            cand = std::move(r.theta);
        }
        catch (const DinkelbachNotConverged &e)
        {
            ++unconverged;
            if (report)
                report(m, e.trace());
            cand = e.last_theta();
        }
        if (sinr_weak(cand, prob) >= sinr_weak(prev[m], prob))
            out[m] = std::move(cand);
    }
    return out;
}

} // namespace detail

/// Alternates per-pair IRS optimization and power allocation until the weak
/// users' SINR-to-threshold ratios agree within eps_gamma.
///
/// Iteration 1 draws random phases, later iterations run Dinkelbach per pair
/// against the previous powers. Powers come from the balance eigenproblem
/// while the previous C is below 1 and from the minimum-power solve after.
/// Termination is checked once the previous powers came from the minimum-power
/// branch; a balanced point that settles with C < 1 escalates Pmax instead.
/// Returns the latest thetas with the powers they were evaluated against.
inline JointSolution joint_optimize(const std::vector<UserPairChannels> &pairs, const BeamSet &beams,
                                    const ScenarioConfig &scfg, const SolverConfig &cfg, Rng &rng)
{
    cfg.validate();
    const auto M = pairs.size();
    if (M == 0 || beams.size() != M)
        throw ContractViolation("joint_optimize: need one beam per pair");
    const auto Mi = static_cast<Eigen::Index>(M);
    const double sigma2 = scfg.sigma2_n;
    const double gamma = scfg.gamma_th;
    const int N = static_cast<int>(pairs.front().R_g.rows());

    RealVector c2_2(Mi);
    for (std::size_t m = 0; m < M; ++m)
        c2_2(static_cast<Eigen::Index>(m)) = pairs[m].c2_2;

    DinkelbachOptions dopts = cfg.dinkelbach;
    dopts.eps = cfg.eps_dinkelbach;

    JointSolution sol;
    double Pmax = cfg.initial_budget(static_cast<int>(M), sigma2);

    RealVector p1;
    try
    {
        p1 = strong_user_powers(pairs, beams, gamma, sigma2);
    }
    catch (const Error &e)
    {
        rethrow_with_context(e, "joint_optimize");
    }

    bool restart = true;
    std::vector<IrsPhaseVector> thetas;
    PowerAllocation prev;
    double C_prev = 0.0;
    bool prev_min_power = false;
    int i = 0;

    for (int total = 0; total < cfg.max_outer_iterations; ++total)
    {
        if (restart)
        {
            i = 0;
            prev = PowerAllocation::zeros(Mi);
            C_prev = 0.0;
            prev_min_power = false;
            restart = false;
        }
        ++i;

        JointIteration rec;
        rec.iteration = total + 1;
        try
        {
            if (i == 1)
                thetas = detail::random_thetas(M, N, rng);
            else
            {
                std::function<void(std::size_t, const DinkelbachTrace &)> report;
                if (cfg.on_dinkelbach)
                    report = [&](std::size_t m, const DinkelbachTrace &t) { cfg.on_dinkelbach(rec.iteration, m, t); };
                thetas = detail::irs_step(pairs, beams, prev, sigma2, thetas, dopts, rec.dinkelbach_unconverged,
                                          report);
            }

            const RealMatrix T = interference_gains(pairs, beams, thetas);
            PowerAllocation cur(p1, RealVector::Zero(Mi));
            double C = 0.0;

            bool use_balance = C_prev < 1.0;
            if (!use_balance)
            {
                const BalanceProblem bp = make_balance_problem(T, p1, gamma, sigma2, c2_2, 1.0);
                if (coupling_spectral_radius(bp) < kSpectralRadiusLimit)
                {
                    cur.p2 = min_power_solve(bp);
                    C = 1.0;
                    rec.branch = PowerBranch::min_power;
                }
                else
                {
                    use_balance = true;
                }
            }
            if (use_balance)
            {
                if (p1.sum() >= Pmax)
                {
                    rec.branch = PowerBranch::escalate;
                    rec.Pmax = Pmax;
                    sol.trace.iterations.push_back(rec);
                    if (++sol.escalations > cfg.max_escalations)
                        break;
                    Pmax *= cfg.Pmax_growth;
                    restart = true;
                    continue;
                }
                const BalanceProblem bp = make_balance_problem(T, p1, gamma, sigma2, c2_2, Pmax - p1.sum());
                const BalanceResult br = sinr_balance(bp);
                cur.p2 = br.p2;
                C = br.C;
                rec.branch = PowerBranch::balance;
            }

            // ratios with the new thetas and the previous powers
            const RealVector ratios = sinr_weak_all(T, prev, sigma2, c2_2) / gamma;
            rec.min_ratio = ratios.minCoeff();
            rec.max_ratio = ratios.maxCoeff();
            rec.Pmax = Pmax;
            rec.C = C;
            rec.total_power = cur.total();
            sol.trace.iterations.push_back(rec);

            const bool settled = i >= 2 && rec.max_ratio - rec.min_ratio <= cfg.eps_gamma;
            if (settled && prev_min_power)
            {
                sol.thetas = thetas;
                sol.powers = prev;
                sol.C = 1.0;
                sol.converged = true;
                sol.sinr_weak = ratios * gamma;
                break;
            }

            // a balanced point that has settled below C = 1 needs more budget
            if (settled && rec.branch == PowerBranch::balance && C < 1.0)
            {
                if (++sol.escalations > cfg.max_escalations)
                    break;
                Pmax *= cfg.Pmax_growth;
            }

            prev_min_power = rec.branch == PowerBranch::min_power;
            prev = cur;
            C_prev = C;
        }
        catch (const Error &e)
        {
            rethrow_with_context(e, "joint_optimize iteration " + std::to_string(total + 1));
        }
    }

    if (sol.escalations > cfg.max_escalations)
        throw InfeasibleError("joint_optimize: Pmax escalated " + std::to_string(cfg.max_escalations) +
                              " times without meeting gamma_th = " + std::to_string(gamma) +
                              "; last Pmax = " + std::to_string(Pmax) + " W, strong-user power " +
                              std::to_string(p1.sum()) + " W");

    if (!sol.converged)
    {
        // iteration cap: report the latest powers against the current thetas
        sol.thetas = thetas;
        sol.powers = prev;
        sol.C = C_prev;
        const RealMatrix T = interference_gains(pairs, beams, thetas);
        sol.sinr_weak = sinr_weak_all(T, prev, sigma2, c2_2);
    }
    sol.iterations = static_cast<int>(sol.trace.iterations.size());
    sol.Pmax = Pmax;
    sol.total_power = sol.powers.total();
    sol.sinr_strong = sinr_strong(pairs, beams, sol.powers, sigma2);
    return sol;
}

} // namespace irsnoma
