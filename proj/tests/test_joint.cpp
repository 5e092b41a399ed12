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

#include "irsnoma/joint.hpp"
#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

using namespace irsnoma;
using namespace irsnoma::testing;

namespace
{

struct Setup
{
    ScenarioConfig cfg;
    std::vector<UserPairChannels> pairs;
    BeamSet beams;
};

Setup make_setup(int Nt, int N, int M, double gamma, std::uint64_t seed)
{
    Setup s;
    s.cfg = ScenarioConfig::uniform(Nt, N, M, 1, std::min(Nt, N), 1.0, 1.0, 1.0, gamma, seed);
    s.pairs = build_scenario(s.cfg);
    s.beams = zeroforcing_beams(s.pairs);
    return s;
}

} // namespace

TEST_CASE("joint_optimize with one pair serves both users at the threshold", "[joint]")
{
    for (std::uint64_t seed : {1u, 2u, 3u})
    {
        const Setup s = make_setup(4, 8, 1, 2.0, seed);
        Rng rng(seed);
        const JointSolution sol = joint_optimize(s.pairs, s.beams, s.cfg, {}, rng);
        REQUIRE(sol.converged);
        CHECK(sol.sinr_strong(0) == Catch::Approx(2.0).epsilon(1e-9));
        CHECK(sol.sinr_weak(0) >= 2.0 * (1 - 1e-9));
        CHECK(sol.powers.p1(0) == Catch::Approx(2.0 / s.beams.signal_gain[0]).epsilon(1e-12));
        const RealMatrix T = interference_gains(s.pairs, s.beams, sol.thetas);
        const double needed = 2.0 * (sol.powers.p1(0) * T(0, 0) + 1.0) / T(0, 0);
        CHECK(sol.powers.p2(0) >= needed * (1 - 1e-9));
        CHECK(sol.total_power == Catch::Approx(sol.powers.total()));
    }
}

TEST_CASE("joint_optimize reaches the SINR threshold for several pairs", "[joint]")
{
    const Setup s = make_setup(16, 16, 4, 1.0, 11);
    Rng rng(12);
    const JointSolution sol = joint_optimize(s.pairs, s.beams, s.cfg, {}, rng);
    REQUIRE(sol.converged);
    for (Eigen::Index m = 0; m < 4; ++m)
    {
        CHECK(sol.sinr_strong(m) == Catch::Approx(1.0).epsilon(1e-9));
        CHECK(sol.sinr_weak(m) >= 1.0 - 1.1e-3);
    }
    CHECK(sol.powers.nonnegative());
    for (const auto &th : sol.thetas)
        CHECK(th.modulus_error() <= 1e-9);
    RealVector c22 = RealVector::Ones(4);
    const RealVector recomputed =
        sinr_weak_all(interference_gains(s.pairs, s.beams, sol.thetas), sol.powers, 1.0, c22);
    CHECK((recomputed - sol.sinr_weak).norm() <= 1e-9 * recomputed.norm());
}

TEST_CASE("joint_optimize is deterministic for a fixed seed", "[joint]")
{
    const Setup s = make_setup(8, 8, 3, 1.0, 21);
    Rng a(5), b(5);
    const JointSolution x = joint_optimize(s.pairs, s.beams, s.cfg, {}, a);
    const JointSolution y = joint_optimize(s.pairs, s.beams, s.cfg, {}, b);
    REQUIRE(x.thetas.size() == y.thetas.size());
    for (std::size_t m = 0; m < x.thetas.size(); ++m)
        CHECK(x.thetas[m].values() == y.thetas[m].values());
    CHECK(x.powers.p2 == y.powers.p2);
    CHECK(x.iterations == y.iterations);
}

TEST_CASE("joint_optimize escalates a small budget", "[joint]")
{
    const Setup s = make_setup(8, 8, 2, 1.0, 31);
    SolverConfig cfg;
    cfg.Pmax = 1e-3;
    Rng rng(32);
    const JointSolution sol = joint_optimize(s.pairs, s.beams, s.cfg, cfg, rng);
    CHECK(sol.escalations >= 1);
    CHECK(sol.Pmax > 1e-3);
    CHECK(sol.converged);
    const auto &its = sol.trace.iterations;
    CHECK(std::any_of(its.begin(), its.end(), [](const JointIteration &it) { return it.branch == PowerBranch::escalate; }));

    SolverConfig tight = cfg;
    tight.max_escalations = 0;
    Rng rng2(32);
    CHECK_THROWS_AS(joint_optimize(s.pairs, s.beams, s.cfg, tight, rng2), InfeasibleError);
}

TEST_CASE("joint_optimize reports a weak user cut off from the IRS", "[joint]")
{
    UserPairChannels p;
    p.R_h = HermitianMatrix::Zero(2, 2);
    p.R_h(0, 0) = 1.0;
    p.R_g = HermitianMatrix::Identity(2, 2);
    p.G = ComplexMatrix::Zero(2, 2);
    p.G(1, 0) = 1.0;
    p.G(1, 1) = cdouble(0, 1);
    p.L = 1;
    const std::vector<UserPairChannels> pairs{p};
    const BeamSet beams = zeroforcing_beams(pairs);
    ScenarioConfig cfg = ScenarioConfig::uniform(2, 2, 1, 1, 1);
    Rng rng(41);
    try
    {
        joint_optimize(pairs, beams, cfg, {}, rng);
        FAIL("expected InfeasibleError");
    }
    catch (const InfeasibleError &e)
    {
        CHECK(std::string(e.what()).find("T_mm = 0") != std::string::npos);
    }
}

TEST_CASE("joint trace CSV and Dinkelbach callback", "[joint]")
{
    const Setup s = make_setup(8, 8, 2, 1.0, 51);
    SolverConfig cfg;
    int calls = 0;
    cfg.on_dinkelbach = [&](int it, std::size_t m, const DinkelbachTrace &t) {
        CHECK(it >= 2);
        CHECK(m < 2);
        CHECK(t.iterations >= 1);
        ++calls;
    };
    Rng rng(52);
    const JointSolution sol = joint_optimize(s.pairs, s.beams, s.cfg, cfg, rng);
    CHECK(calls == 2 * (sol.iterations - 1));
    std::ostringstream os;
    sol.trace.write_csv(os);
    const std::string out = os.str();
    CHECK(out.rfind("iteration,branch,Pmax_W,C,total_power_W,min_ratio,max_ratio,gap,dinkelbach_unconverged\n", 0) == 0);
    CHECK(std::count(out.begin(), out.end(), '\n') == sol.iterations + 1);
}

TEST_CASE("SolverConfig validation", "[joint]")
{
    SolverConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.initial_budget(10, 2.0) == Catch::Approx(2000.0));
    c.eps_gamma = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.eps_dinkelbach = 1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.Pmax_growth = 1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.max_outer_iterations = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}
