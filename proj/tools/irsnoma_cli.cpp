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

// Command-line front end: scenario generation, single joint runs, parameter
// sweeps and Monte Carlo validation.

#include "irsnoma/experiment_io.hpp"
#include "irsnoma/harness.hpp"
#include "irsnoma/joint.hpp"
#include "irsnoma/scenario_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace
{

using namespace irsnoma;

int exit_code(ErrorCategory c)
{
    switch (c)
    {
    case ErrorCategory::config:
        return 2;
    case ErrorCategory::infeasible:
        return 3;
    case ErrorCategory::numeric:
        return 4;
    case ErrorCategory::contract:
        return 5;
    }
    return 1;
}

struct CommonOptions
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string output;
    std::optional<int> trials;
    int verbosity = 0;
};

void add_common(CLI::App *app, CommonOptions &o, bool trials)
{
    app->add_option("-c,--config", o.config, "JSON run configuration");
    app->add_option("-s,--seed", o.seed, "override the scenario seed");
    app->add_option("-o,--output", o.output, "output path (stdout when omitted)");
    if (trials)
        app->add_option("-t,--trials", o.trials, "number of random scenarios")->check(CLI::PositiveNumber);
    app->add_flag("-v,--verbose", o.verbosity, "more output; repeat for detail");
}

ExperimentSpec load_spec(const CommonOptions &o, ExperimentKind kind)
{
    ExperimentSpec spec;
    spec.kind = kind;
    if (!o.config.empty())
        spec = experiment_from_json(load_json_file(o.config), kind);
    if (o.seed)
        spec.base.seed = *o.seed;
    if (o.trials)
        spec.trials = *o.trials;
    spec.output = o.output;
    return spec;
}

/// Opens `path` for writing, or returns stdout for an empty path.
class Sink
{
  public:
    explicit Sink(const std::string &path)
    {
        if (!path.empty())
        {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_)
                throw ConfigError("cannot write '" + path + "'");
        }
    }
    std::ostream &stream() { return file_ ? *file_ : std::cout; }

  private:
    std::unique_ptr<std::ofstream> file_;
};

int cmd_generate(const CommonOptions &o)
{
    const ExperimentSpec spec = load_spec(o, ExperimentKind::single_run);
    Scenario s;
    s.config = spec.base;
    s.pairs = build_scenario(spec.base);
    Sink out(o.output);
    out.stream() << dump_scenario(s);
    if (o.verbosity > 0)
        std::cerr << "generated " << s.pairs.size() << " pairs (Nt = " << s.config.Nt << ", N = " << s.config.N
                  << ", seed = " << s.config.seed << ")\n";
    return 0;
}

int cmd_run(const CommonOptions &o, const std::string &scenario_path, const std::string &trace_path,
            const std::string &dinkelbach_path)
{
    ExperimentSpec spec = load_spec(o, ExperimentKind::single_run);
    std::vector<UserPairChannels> pairs;
    if (!scenario_path.empty())
    {
        Scenario s = scenario_from_json(load_json_file(scenario_path));
        spec.base = s.config;
        if (o.seed)
            spec.base.seed = *o.seed;
        pairs = std::move(s.pairs);
    }
    else
    {
        pairs = build_scenario(spec.base);
    }
    const BeamSet beams = zeroforcing_beams(pairs);

    std::unique_ptr<std::ofstream> dk;
    if (!dinkelbach_path.empty())
    {
        dk = std::make_unique<std::ofstream>(dinkelbach_path, std::ios::binary);
        if (!*dk)
            throw ConfigError("cannot write '" + dinkelbach_path + "'");
        dk->precision(17);
        *dk << "outer_iteration,pair,iteration,eta,F,objective\n";
        spec.solver.on_dinkelbach = [&](int outer, std::size_t m, const DinkelbachTrace &t) {
            for (std::size_t i = 0; i < t.etas.size(); ++i)
                *dk << outer << ',' << m << ',' << i << ',' << t.etas[i] << ',' << t.F_values[i] << ','
                    << t.objectives[i] << '\n';
        };
    }

    Rng rng = make_stream(spec.base.seed, 0x5eedULL);
    const JointSolution sol = joint_optimize(pairs, beams, spec.base, spec.solver, rng);
    check_noma_ordering(sol.powers, &std::cerr);

    const double snr = total_snr(sol.powers, spec);
    std::cerr.precision(6);
    std::cerr << "pairs " << pairs.size() << ", N " << spec.base.N << ", gamma_th " << spec.base.gamma_th << '\n'
              << "converged " << (sol.converged ? "yes" : "no") << " after " << sol.iterations
              << " iterations, " << sol.escalations << " Pmax escalations\n"
              << "total power " << sol.total_power << " W (total SNR " << to_db(snr) << " dB)\n"
              << "min SINR strong " << sol.sinr_strong.minCoeff() << ", weak " << sol.sinr_weak.minCoeff()
              << ", min rate " << min_rate(sol) << " bps/Hz\n";
    if (o.verbosity > 0)
        sol.trace.write_csv(std::cerr);

    Sink out(o.output);
    auto &os = out.stream();
    os.precision(17);
    os << "pair,p1_W,p2_W,sinr_strong_lin,sinr_weak_lin,rate_strong_bps_Hz,rate_weak_bps_Hz\n";
    for (Eigen::Index m = 0; m < sol.powers.size(); ++m)
        os << m << ',' << sol.powers.p1(m) << ',' << sol.powers.p2(m) << ',' << sol.sinr_strong(m) << ','
           << sol.sinr_weak(m) << ',' << std::log2(1.0 + sol.sinr_strong(m)) << ','
           << std::log2(1.0 + sol.sinr_weak(m)) << '\n';

    if (!trace_path.empty())
    {
        Sink t(trace_path);
        sol.trace.write_csv(t.stream());
    }
    return 0;
}

std::string raw_path_for(const std::string &output, const std::string &raw)
{
    if (!raw.empty())
        return raw;
    if (output.empty())
        return {};
    const auto dot = output.rfind('.');
    const auto slash = output.find_last_of('/');
    const std::string stem =
        dot != std::string::npos && (slash == std::string::npos || dot > slash) ? output.substr(0, dot) : output;
    return stem + ".trials.csv";
}

int cmd_sweep(const CommonOptions &o, ExperimentKind kind, const std::vector<double> &values, const std::string &raw)
{
    ExperimentSpec spec = load_spec(o, kind);
    if (!values.empty())
        spec.values = values;
    SweepResult res;
    if (kind == ExperimentKind::sweep_N)
        res = sweep_irs_elements(spec);
    else if (kind == ExperimentKind::sweep_rankG)
        res = sweep_rank(spec);
    else
        res = sweep_total_snr(spec);

    Sink out(o.output);
    res.write_csv(out.stream());
    const std::string rp = raw_path_for(o.output, raw);
    if (!rp.empty())
    {
        Sink r(rp);
        res.write_raw_csv(r.stream());
    }
    if (o.verbosity > 0)
        for (const auto &row : res.rows)
            std::cerr << res.value_column << " = " << row.value << ": " << row.trials - row.failures << '/'
                      << row.trials << " trials ok\n";
    return 0;
}

int cmd_validate(const CommonOptions &o, std::optional<int> samples)
{
    ExperimentSpec spec = load_spec(o, ExperimentKind::validate_approx);
    if (samples)
        spec.mc_samples = *samples;
    const ApproxReport rep = validate_approximation(spec);
    Sink out(o.output);
    rep.write_csv(out.stream());
    std::cerr << "user-1 max relative error " << rep.max_rel_err1() << " over " << rep.records.size()
              << " users, " << rep.failures << " failed trials\n";
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"IRS phase and NOMA power optimization from channel statistics"};
    app.require_subcommand(1);

    CommonOptions gen_o, run_o, sn_o, sr_o, ss_o, val_o;
    std::string scenario_path, trace_path, dinkelbach_path;
    std::vector<double> sn_values, sr_values, ss_values;
    std::string sn_raw, sr_raw, ss_raw;
    std::optional<int> samples;

    auto *gen = app.add_subcommand("generate", "draw a scenario and write it as JSON");
    add_common(gen, gen_o, false);

    auto *run = app.add_subcommand("run", "joint optimization on one scenario");
    add_common(run, run_o, false);
    run->add_option("--scenario", scenario_path, "scenario file written by generate");
    run->add_option("--trace", trace_path, "write the outer-iteration trace CSV here");
    run->add_option("--dinkelbach-trace", dinkelbach_path, "write every Dinkelbach trace here");

    auto *sn = app.add_subcommand("sweep-n", "weak-user SINR against IRS element count");
    add_common(sn, sn_o, true);
    sn->add_option("--values", sn_values, "IRS element counts")->delimiter(',');
    sn->add_option("--raw", sn_raw, "per-trial CSV path");

    auto *sr = app.add_subcommand("sweep-rank", "weak-user SINR against rank of the BS-IRS matrix");
    add_common(sr, sr_o, true);
    sr->add_option("--values", sr_values, "ranks")->delimiter(',');
    sr->add_option("--raw", sr_raw, "per-trial CSV path");

    auto *ss = app.add_subcommand("sweep-snr", "required total SNR against target minimum rate");
    add_common(ss, ss_o, true);
    ss->add_option("--values", ss_values, "target minimum rates [bps/Hz]")->delimiter(',');
    ss->add_option("--raw", ss_raw, "per-trial CSV path");

    auto *val = app.add_subcommand("validate", "Monte Carlo check of the covariance SINR expressions");
    add_common(val, val_o, true);
    val->add_option("--samples", samples, "instantaneous draws per scenario")->check(CLI::PositiveNumber);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        if (rc != 0)
            std::cerr << "error[config]: command line\n";
        return rc == 0 ? 0 : 2;
    }

    try
    {
        if (gen->parsed())
            return cmd_generate(gen_o);
        if (run->parsed())
            return cmd_run(run_o, scenario_path, trace_path, dinkelbach_path);
        if (sn->parsed())
            return cmd_sweep(sn_o, ExperimentKind::sweep_N, sn_values, sn_raw);
        if (sr->parsed())
            return cmd_sweep(sr_o, ExperimentKind::sweep_rankG, sr_values, sr_raw);
        if (ss->parsed())
            return cmd_sweep(ss_o, ExperimentKind::sweep_snr, ss_values, ss_raw);
        if (val->parsed())
            return cmd_validate(val_o, samples);
    }
    catch (const Error &e)
    {
        std::cerr << "error[" << to_string(e.category()) << "]: " << e.what() << '\n';
        return exit_code(e.category());
    }
    catch (const std::exception &e)
    {
        std::cerr << "error[internal]: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
