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
#include "irsnoma/joint.hpp"
#include "irsnoma/power_alloc.hpp"
#include "irsnoma/powers.hpp"
#include "irsnoma/random.hpp"
#include "irsnoma/zeroforcing.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace irsnoma
{

enum class ExperimentKind
{
    sweep_N,
    sweep_rankG,
    sweep_snr,
    validate_approx,
    single_run
};

inline const char *to_string(ExperimentKind k)
{
    switch (k)
    {
    case ExperimentKind::sweep_N:
        return "sweep_N";
    case ExperimentKind::sweep_rankG:
        return "sweep_rankG";
    case ExperimentKind::sweep_snr:
        return "sweep_snr";
    case ExperimentKind::validate_approx:
        return "validate_approx";
    case ExperimentKind::single_run:
        return "single_run";
    }
    return "unknown";
}

struct ExperimentSpec
{
    ExperimentKind kind = ExperimentKind::single_run;
    ScenarioConfig base = ScenarioConfig::uniform(64, 128, 10, 1, 64);
    std::vector<double> values; ///< N, rank, or target min-rate [bps/Hz] per kind
    int trials = 20;
    std::string output;
    SolverConfig solver{};
    double beam_snr_db = 20.0;   ///< fixed-power mode: p_m c2_ref / sigma2 per beam
    double weak_fraction = 0.9;  ///< fixed-power mode: p2 = weak_fraction p_m
    double reference_c2 = 1.0;   ///< reference path loss for total-SNR normalization
    int mc_samples = 100000;     ///< instantaneous draws per scenario in validate_approx
    unsigned workers = 0;        ///< 0 selects std::thread::hardware_concurrency()

    void validate() const
    {
        base.validate();
        if (trials < 1)
            throw ConfigError("ExperimentSpec: trials must be >= 1");
        if (!(weak_fraction > 0.0 && weak_fraction <= 1.0) || !(reference_c2 > 0.0))
            throw ConfigError("ExperimentSpec: weak_fraction must lie in (0, 1] and reference_c2 > 0");
        if (mc_samples < 1)
            throw ConfigError("ExperimentSpec: mc_samples must be >= 1");
        const bool sweep = kind == ExperimentKind::sweep_N || kind == ExperimentKind::sweep_rankG ||
                           kind == ExperimentKind::sweep_snr;
        if (sweep && values.empty())
            throw ConfigError("ExperimentSpec: sweep needs at least one value");
        for (double v : values)
        {
            if (kind == ExperimentKind::sweep_N && (v < 1 || v != std::floor(v)))
                throw ConfigError("ExperimentSpec: N values must be positive integers");
            if (kind == ExperimentKind::sweep_rankG &&
                (v < 1 || v != std::floor(v) || v > std::min(base.Nt, base.N)))
                throw ConfigError("ExperimentSpec: rank values must be integers in [1, min(Nt, N)]");
            if (kind == ExperimentKind::sweep_snr && !(v > 0.0))
                throw ConfigError("ExperimentSpec: target rates must be > 0");
        }
        solver.validate();
    }
};

/// Mean and standard error of the mean.
struct Stat
{
    double mean = 0.0;
    double se = 0.0;
    int count = 0;

    static Stat of(const std::vector<double> &xs)
    {
        Stat s;
        s.count = static_cast<int>(xs.size());
        if (xs.empty())
            return s;
        double sum = 0.0;
        for (double x : xs)
            sum += x;
        s.mean = sum / s.count;
        if (s.count > 1)
        {
            double ss = 0.0;
            for (double x : xs)
                ss += (x - s.mean) * (x - s.mean);
            s.se = std::sqrt(ss / (s.count - 1) / s.count);
        }
        return s;
    }
};

inline double to_db(double linear) { return 10.0 * std::log10(linear); }

/// A named per-trial quantity. Linear quantities also get a dB column
/// computed from the mean.
struct QuantitySpec
{
    std::string name;
    bool linear = true; ///< false: already in the unit named by the suffix
};

struct ResultRow
{
    double value = 0.0;
    int trials = 0;
    int failures = 0;
    std::vector<Stat> stats; ///< one per quantity, in quantity order
};

struct TrialOutcome
{
    std::vector<double> samples; ///< one per quantity; empty on failure
    std::string status = "ok";
};

struct SweepResult
{
    std::string value_column;
    std::vector<QuantitySpec> quantities;
    std::vector<ResultRow> rows;
    /// raw[row][trial]
    std::vector<std::vector<TrialOutcome>> raw;

    std::size_t index_of(const std::string &name) const
    {
        for (std::size_t i = 0; i < quantities.size(); ++i)
            if (quantities[i].name == name)
                return i;
        throw ContractViolation("SweepResult: no quantity '" + name + "'");
    }

    const Stat &stat(std::size_t row, const std::string &name) const { return rows.at(row).stats.at(index_of(name)); }

    /// Mean of a linear quantity in dB.
    double mean_db(std::size_t row, const std::string &name) const { return to_db(stat(row, name).mean); }

    void write_csv(std::ostream &os) const
    {
        const auto old = os.precision(17);
        os << value_column << ",trials,failures";
        for (const auto &q : quantities)
        {
            if (q.linear)
                os << ',' << q.name << "_lin," << q.name << "_lin_se," << q.name << "_dB";
            else
                os << ',' << q.name << ',' << q.name << "_se";
        }
        os << '\n';
        for (const auto &r : rows)
        {
            os << r.value << ',' << r.trials << ',' << r.failures;
            for (std::size_t i = 0; i < quantities.size(); ++i)
            {
                const Stat &s = r.stats[i];
                os << ',' << s.mean << ',' << s.se;
                if (quantities[i].linear)
                    os << ',' << (s.count > 0 ? to_db(s.mean) : std::nan(""));
            }
            os << '\n';
        }
        os.precision(old);
    }

    /// One line per (sweep value, trial) with the raw samples.
    void write_raw_csv(std::ostream &os) const
    {
        const auto old = os.precision(17);
        os << value_column << ",trial,status";
        for (const auto &q : quantities)
            os << ',' << q.name << (q.linear ? "_lin" : "");
        os << '\n';
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t t = 0; t < raw[r].size(); ++t)
            {
                const auto &o = raw[r][t];
                os << rows[r].value << ',' << t << ',' << o.status;
                for (std::size_t i = 0; i < quantities.size(); ++i)
                {
                    os << ',';
                    if (i < o.samples.size())
                        os << o.samples[i];
                }
                os << '\n';
            }
        os.precision(old);
    }
};

/// Runs job(t) for t in [0, count) on a pool of worker threads. Results land in
/// slot t, so the output does not depend on scheduling.
template <class Result>
std::vector<Result> parallel_map(int count, unsigned workers, const std::function<Result(int)> &job)
{
    std::vector<Result> out(static_cast<std::size_t>(std::max(count, 0)));
    unsigned n = workers != 0 ? workers : std::max(1u, std::thread::hardware_concurrency());
    n = std::min<unsigned>(n, static_cast<unsigned>(std::max(count, 1)));
    if (n <= 1)
    {
        for (int t = 0; t < count; ++t)
            out[static_cast<std::size_t>(t)] = job(t);
        return out;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned w = 0; w < n; ++w)
        pool.emplace_back([&] {
            for (int t = next++; t < count; t = next++)
                out[static_cast<std::size_t>(t)] = job(t);
        });
    for (auto &th : pool)
        th.join();
    return out;
}

/// Scenario seed of trial t.
inline std::uint64_t trial_seed(const ExperimentSpec &spec, int t)
{
    return derive_seed(spec.base.seed, static_cast<std::uint64_t>(t));
}

/// Solver randomness (initial phases) of trial t, separate from the channel draw.
inline Rng trial_solver_rng(const ExperimentSpec &spec, int t)
{
    return make_stream(trial_seed(spec, t), 0x5eedULL);
}

namespace detail
{

inline const char *status_of(const Error &e)
{
    switch (e.category())
    {
    case ErrorCategory::infeasible:
        return "infeasible";
    case ErrorCategory::numeric:
        return "numeric";
    case ErrorCategory::config:
        return "config";
    case ErrorCategory::contract:
        return "contract";
    }
    return "error";
}

inline ResultRow summarize(double value, const std::vector<TrialOutcome> &outcomes, std::size_t nq)
{
    ResultRow row;
    row.value = value;
    row.trials = static_cast<int>(outcomes.size());
    std::vector<std::vector<double>> cols(nq);
    for (const auto &o : outcomes)
    {
        if (o.samples.size() != nq)
        {
            ++row.failures;
            continue;
        }
        for (std::size_t i = 0; i < nq; ++i)
            cols[i].push_back(o.samples[i]);
    }
    for (auto &c : cols)
        row.stats.push_back(Stat::of(c));
    return row;
}

/// Fixed per-beam powers: p_m = 10^(snr/10) sigma2 / c2_ref, split by weak_fraction.
inline PowerAllocation fixed_beam_powers(const ExperimentSpec &spec, int M)
{
    const double pm = std::pow(10.0, spec.beam_snr_db / 10.0) * spec.base.sigma2_n / spec.reference_c2;
    return {RealVector::Constant(M, (1.0 - spec.weak_fraction) * pm), RealVector::Constant(M, spec.weak_fraction * pm)};
}

/// One fixed-power trial: per-pair constrained and unconstrained weak-user SINR.
inline TrialOutcome fixed_power_trial(const ExperimentSpec &spec, const ScenarioConfig &cfg, int t)
{
    TrialOutcome out;
    try
    {
        const auto pairs = build_scenario(cfg);
        const BeamSet beams = zeroforcing_beams(pairs);
        const PowerAllocation powers = fixed_beam_powers(spec, cfg.M);
        Rng rng = trial_solver_rng(spec, t);

        DinkelbachOptions opts = spec.solver.dinkelbach;
        opts.eps = spec.solver.eps_dinkelbach;

        double con = 0.0;
        double unc = 0.0;
        double rate = 0.0;
        int unconverged = 0;
        for (int m = 0; m < cfg.M; ++m)
        {
            const auto mu = static_cast<std::size_t>(m);
            const FractionalProblem prob = build_fractional_problem(pairs[mu], beams, powers, mu, cfg.sigma2_n);
            const EigenSolution eig = unconstrained_eig_solution(prob);
            const IrsPhaseVector init = IrsPhaseVector::random(cfg.N, rng);
            IrsPhaseVector theta;
            try
            {
                theta = dinkelbach_optimize(prob, init, opts).theta;
            }
            catch (const DinkelbachNotConverged &e)
            {
                ++unconverged;
                theta = e.last_theta();
            }
            const double s = sinr_weak(theta, prob);
            con += s;
            unc += eig.sinr;
            rate += std::log2(1.0 + s);
        }
        con /= cfg.M;
        unc /= cfg.M;
        rate /= cfg.M;
        out.samples = {con, unc, to_db(unc) - to_db(con), rate, static_cast<double>(unconverged)};
    }
    catch (const Error &e)
    {
        out.samples.clear();
        out.status = status_of(e);
    }
    return out;
}

inline std::vector<QuantitySpec> fixed_power_quantities()
{
    return {{"sinr_constrained", true},
            {"sinr_unconstrained", true},
            {"cm_loss_dB", false},
            {"rate_constrained_bps_Hz", false},
            {"dinkelbach_unconverged_count", false}};
}

} // namespace detail

/// Weak-user SINR against the IRS element count at fixed per-beam SNR.
inline SweepResult sweep_irs_elements(const ExperimentSpec &spec)
{
    spec.validate();
    SweepResult res;
    res.value_column = "N";
    res.quantities = detail::fixed_power_quantities();
    for (double v : spec.values)
    {
        const auto outcomes = parallel_map<TrialOutcome>(spec.trials, spec.workers, [&](int t) {
            ScenarioConfig cfg = spec.base;
            cfg.N = static_cast<int>(v);
            cfg.rankG = std::min({spec.base.rankG, cfg.Nt, cfg.N});
            cfg.Lg.assign(cfg.Lg.size(), 1);
            for (std::size_t m = 0; m < cfg.Lg.size(); ++m)
                cfg.Lg[m] = std::min(spec.base.Lg[m], cfg.N);
            cfg.seed = trial_seed(spec, t);
            return detail::fixed_power_trial(spec, cfg, t);
        });
        res.rows.push_back(detail::summarize(v, outcomes, res.quantities.size()));
        res.raw.push_back(outcomes);
    }
    return res;
}

/// Weak-user SINR against rank(G) at fixed per-beam SNR.
inline SweepResult sweep_rank(const ExperimentSpec &spec)
{
    spec.validate();
    SweepResult res;
    res.value_column = "rankG";
    res.quantities = detail::fixed_power_quantities();
    for (double v : spec.values)
    {
        const auto outcomes = parallel_map<TrialOutcome>(spec.trials, spec.workers, [&](int t) {
            ScenarioConfig cfg = spec.base;
            cfg.rankG = static_cast<int>(v);
            cfg.seed = trial_seed(spec, t);
            return detail::fixed_power_trial(spec, cfg, t);
        });
        res.rows.push_back(detail::summarize(v, outcomes, res.quantities.size()));
        res.raw.push_back(outcomes);
    }
    return res;
}

/// Minimum rate over both users of every pair, log2(1 + SINR).
inline double min_rate(const JointSolution &s)
{
    const double g = std::min(s.sinr_strong.minCoeff(), s.sinr_weak.minCoeff());
    return std::log2(1.0 + std::max(g, 0.0));
}

/// Total SNR sum(p) c2_ref / sigma2 of a power allocation.
inline double total_snr(const PowerAllocation &p, const ExperimentSpec &spec)
{
    return p.total() * spec.reference_c2 / spec.base.sigma2_n;
}

/// Required total SNR against the target minimum rate: each value r sets
/// gamma_th = 2^r - 1 and runs the joint optimization per trial. Infeasible
/// trials are counted and excluded from the means.
inline SweepResult sweep_total_snr(const ExperimentSpec &spec)
{
    spec.validate();
    SweepResult res;
    res.value_column = "target_rate_bps_Hz";
    res.quantities = {{"total_snr", true},
                      {"trial_snr_dB", false},
                      {"min_rate_bps_Hz", false},
                      {"converged", false},
                      {"outer_iterations", false}};
    for (double r : spec.values)
    {
        const auto outcomes = parallel_map<TrialOutcome>(spec.trials, spec.workers, [&](int t) {
            TrialOutcome out;
            try
            {
                ScenarioConfig cfg = spec.base;
                cfg.gamma_th = std::exp2(r) - 1.0;
                cfg.seed = trial_seed(spec, t);
                const auto pairs = build_scenario(cfg);
                const BeamSet beams = zeroforcing_beams(pairs);
                Rng rng = trial_solver_rng(spec, t);
                const JointSolution sol = joint_optimize(pairs, beams, cfg, spec.solver, rng);
                const double snr = total_snr(sol.powers, spec);
                out.samples = {snr, to_db(snr), min_rate(sol), sol.converged ? 1.0 : 0.0,
                               static_cast<double>(sol.iterations)};
            }
            catch (const Error &e)
            {
                out.status = detail::status_of(e);
            }
            return out;
        });
        res.rows.push_back(detail::summarize(r, outcomes, res.quantities.size()));
        res.raw.push_back(outcomes);
    }
    return res;
}

struct ApproxRecord
{
    int trial = 0;
    int pair = 0;
    double sinr1_approx = 0.0;
    double sinr1_empirical = 0.0;
    double sinr2_approx = 0.0;
    double sinr2_empirical = 0.0;

    double rel_err1() const { return std::abs(sinr1_empirical - sinr1_approx) / sinr1_approx; }
    double rel_gap2() const { return (sinr2_empirical - sinr2_approx) / sinr2_approx; }
};

struct ApproxReport
{
    std::vector<ApproxRecord> records;
    int failures = 0;

    double max_rel_err1() const
    {
        double worst = 0.0;
        for (const auto &r : records)
            worst = std::max(worst, r.rel_err1());
        return worst;
    }

    void write_csv(std::ostream &os) const
    {
        const auto old = os.precision(17);
        os << "trial,pair,sinr1_approx_lin,sinr1_empirical_lin,sinr1_rel_err,sinr2_approx_lin,"
              "sinr2_empirical_lin,sinr2_rel_gap\n";
        for (const auto &r : records)
            os << r.trial << ',' << r.pair << ',' << r.sinr1_approx << ',' << r.sinr1_empirical << ','
               << r.rel_err1() << ',' << r.sinr2_approx << ',' << r.sinr2_empirical << ',' << r.rel_gap2()
               << '\n';
        os.precision(old);
    }
};

/// Empirical mean SINR over instantaneous channel draws for every user of a
/// scenario at the given beams, powers and phases. The weak user's effective
/// channel toward beam k is (theta (.) conj(G^H w_k))^H g.
inline std::vector<ApproxRecord> monte_carlo_sinr(const std::vector<UserPairChannels> &pairs, const BeamSet &beams,
                                                  const PowerAllocation &powers,
                                                  const std::vector<IrsPhaseVector> &thetas, double sigma2_n,
                                                  int samples, std::uint64_t seed)
{
    const auto M = pairs.size();
    const auto Mi = static_cast<Eigen::Index>(M);
    const RealMatrix T = interference_gains(pairs, beams, thetas);
    RealVector c2_2(Mi);
    for (std::size_t m = 0; m < M; ++m)
        c2_2(static_cast<Eigen::Index>(m)) = pairs[m].c2_2;
    const RealVector approx1 = sinr_strong(pairs, beams, powers, sigma2_n);
    const RealVector approx2 = sinr_weak_all(T, powers, sigma2_n, c2_2);
    const RealVector pk = powers.beam_powers();

    ComplexMatrix W(beams.beams.front().size(), Mi);
    for (std::size_t k = 0; k < M; ++k)
        W.col(static_cast<Eigen::Index>(k)) = beams.beams[k];

    std::vector<ApproxRecord> out;
    for (std::size_t m = 0; m < M; ++m)
    {
        const auto mi = static_cast<Eigen::Index>(m);
        Rng rng = make_stream(seed, m);
        InstantaneousSampler sampler(pairs[m]);

        // columns v_k with weak-user channel gain v_k^H g
        ComplexMatrix V(pairs[m].R_g.rows(), Mi);
        const ComplexMatrix U = pairs[m].G.adjoint() * W;
        for (Eigen::Index k = 0; k < Mi; ++k)
            V.col(k) = thetas[m].values().cwiseProduct(U.col(k).conjugate());

        double sum1 = 0.0;
        double sum2 = 0.0;
        for (int s = 0; s < samples; ++s)
        {
            const auto [h, g] = sampler(rng);
            const RealVector a = (W.adjoint() * h).cwiseAbs2();
            const RealVector b = (V.adjoint() * g).cwiseAbs2();
            double i1 = 0.0;
            double i2 = 0.0;
            for (Eigen::Index k = 0; k < Mi; ++k)
                if (k != mi)
                {
                    i1 += pk(k) * a(k);
                    i2 += pk(k) * b(k);
                }
            sum1 += powers.p1(mi) * a(mi) / (i1 + sigma2_n / pairs[m].c2_1);
            sum2 += powers.p2(mi) * b(mi) / (powers.p1(mi) * b(mi) + i2 + sigma2_n / pairs[m].c2_2);
        }
        ApproxRecord r;
        r.pair = static_cast<int>(m);
        r.sinr1_approx = approx1(mi);
        r.sinr1_empirical = sum1 / samples;
        r.sinr2_approx = approx2(mi);
        r.sinr2_empirical = sum2 / samples;
        out.push_back(r);
    }
    return out;
}

/// Monte Carlo check of the covariance-based SINR expressions at fixed
/// per-beam powers and random phases.
inline ApproxReport validate_approximation(const ExperimentSpec &spec)
{
    spec.validate();
    ApproxReport report;
    const auto per_trial = parallel_map<std::optional<std::vector<ApproxRecord>>>(
        spec.trials, spec.workers, [&](int t) -> std::optional<std::vector<ApproxRecord>> {
            try
            {
                ScenarioConfig cfg = spec.base;
                cfg.seed = trial_seed(spec, t);
                const auto pairs = build_scenario(cfg);
                const BeamSet beams = zeroforcing_beams(pairs);
                const PowerAllocation powers = detail::fixed_beam_powers(spec, cfg.M);
                Rng rng = trial_solver_rng(spec, t);
                std::vector<IrsPhaseVector> thetas;
                for (int m = 0; m < cfg.M; ++m)
                    thetas.push_back(IrsPhaseVector::random(cfg.N, rng));
                auto recs = monte_carlo_sinr(pairs, beams, powers, thetas, cfg.sigma2_n, spec.mc_samples,
                                             derive_seed(cfg.seed, 0x4d43ULL));
                for (auto &r : recs)
                    r.trial = t;
                return recs;
            }
            catch (const Error &)
            {
                return std::nullopt;
            }
        });
    for (const auto &recs : per_trial)
    {
        if (!recs)
        {
            ++report.failures;
            continue;
        }
        report.records.insert(report.records.end(), recs->begin(), recs->end());
    }
    return report;
}

} // namespace irsnoma
