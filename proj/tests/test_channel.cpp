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

#include "irsnoma/channel.hpp"
#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <set>
#include <sstream>

using namespace irsnoma;
constexpr double pi = std::numbers::pi;

TEST_CASE("steering_vector closed forms", "[channel]")
{
    const ComplexVector a = steering_vector(pi / 2, 4);
    for (Eigen::Index k = 0; k < 4; ++k)
        CHECK(std::abs(a(k) - 0.5) < 1e-15);

    const ComplexVector b = steering_vector(0.0, 3);
    for (Eigen::Index k = 0; k < 3; ++k)
        CHECK(std::abs(b(k) - 1.0 / std::sqrt(3.0)) < 1e-14);

    // cos(pi / 3) = 1/2 gives a phase of e^{-j pi} on the second entry
    const ComplexVector c = steering_vector(pi / 3, 2);
    CHECK(std::abs(c(0) - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(c(1) + 1.0 / std::sqrt(2.0)) < 1e-14);

    Rng rng(3);
    for (int i = 0; i < 20; ++i)
        CHECK(steering_vector(uniform(rng, 0.0, pi), 1 + i).norm() == Catch::Approx(1.0));
    CHECK_THROWS_AS(steering_vector(0.1, 0), ContractViolation);
}

TEST_CASE("make_covariance of a single AoD is rank one with trace dim", "[channel]")
{
    const HermitianMatrix R = make_covariance({0.7}, 4);
    CHECK(R.trace().real() == Catch::Approx(4.0).margin(1e-6));
    CHECK(numeric_rank(R) == 1);
}

TEST_CASE("make_covariance of an orthogonal steering pair in dimension 2 is the identity", "[channel]")
{
    // brute-force search for the AoD whose steering vector is orthogonal to a(pi/2)
    const ComplexVector a1 = steering_vector(pi / 2, 2);
    double best = 0.0;
    double best_inner = 1.0;
    const int grid = 200000;
    for (int i = 1; i < grid; ++i)
    {
        const double th = pi * i / grid;
        const double inner = std::abs(a1.dot(steering_vector(th, 2)));
        if (inner < best_inner)
        {
            best_inner = inner;
            best = th;
        }
    }
    // refine the grid minimum by golden-section search
    double lo = best - pi / grid;
    double hi = best + pi / grid;
    for (int it = 0; it < 200; ++it)
    {
        const double m1 = lo + (hi - lo) * 0.381966;
        const double m2 = lo + (hi - lo) * 0.618034;
        if (std::abs(a1.dot(steering_vector(m1, 2))) < std::abs(a1.dot(steering_vector(m2, 2))))
            hi = m2;
        else
            lo = m1;
    }
    const HermitianMatrix R = make_covariance({pi / 2, 0.5 * (lo + hi)}, 2);
    CHECK((R - HermitianMatrix::Identity(2, 2)).norm() < 1e-9);
}

TEST_CASE("make_covariance with L = dim distinct AoDs is full rank", "[channel]")
{
    const std::vector<double> aods = {0.3, 1.1, 1.9, 2.6, 3.0};
    const HermitianMatrix R = make_covariance(aods, 5);
    CHECK(numeric_rank(R) == 5);
    CHECK(R.trace().real() == Catch::Approx(5.0).margin(1e-6));
}

TEST_CASE("make_covariance with duplicate AoDs warns and loses rank", "[channel]")
{
    std::ostringstream captured;
    auto *old = std::clog.rdbuf(captured.rdbuf());
    const HermitianMatrix R = make_covariance({0.9, 0.9}, 6);
    std::clog.rdbuf(old);
    CHECK(numeric_rank(R) == 1);
    CHECK(captured.str().find("warning") != std::string::npos);
}

TEST_CASE("make_bs_irs_channel rank one shares one AoD pair", "[channel]")
{
    Rng rng(21);
    const auto ch = make_bs_irs_channel(16, 12, 1, rng);
    CHECK(numeric_rank(ch.G) == 1);
    for (const auto &a : ch.aods)
    {
        CHECK(a.elevation == ch.aods.front().elevation);
        CHECK(a.azimuth == ch.aods.front().azimuth);
    }
}

TEST_CASE("make_bs_irs_channel full rank draws independent pairs", "[channel]")
{
    Rng rng(22);
    const auto ch = make_bs_irs_channel(16, 8, 8, rng);
    CHECK(numeric_rank(ch.G) == 8);
    std::set<double> distinct;
    for (const auto &a : ch.aods)
        distinct.insert(a.elevation);
    CHECK(distinct.size() == 8);
}

TEST_CASE("make_bs_irs_channel entries follow the AoD formula with unit modulus", "[channel]")
{
    Rng rng(23);
    for (int rank : {1, 3, 5, 16})
    {
        const auto ch = make_bs_irs_channel(16, 32, rank, rng);
        REQUIRE(ch.G.rows() == 16);
        REQUIRE(ch.G.cols() == 32);
        CHECK(numeric_rank(ch.G) == rank);
        for (Eigen::Index n = 0; n < 32; ++n)
        {
            const auto &p = ch.aods[static_cast<std::size_t>(n)];
            const double s = std::sin(p.elevation) * std::sin(p.azimuth);
            CHECK(p.elevation >= 0.0);
            CHECK(p.elevation <= pi);
            CHECK(p.azimuth >= 0.0);
            CHECK(p.azimuth <= 2 * pi);
            for (Eigen::Index nt = 0; nt < 16; ++nt)
            {
                const cdouble expect = std::exp(cdouble(0, pi * nt * s)) * std::exp(cdouble(0, -pi * n * s));
                CHECK(std::abs(ch.G(nt, n) - expect) < 1e-12);
                CHECK(std::abs(std::abs(ch.G(nt, n)) - 1.0) < 1e-15);
            }
        }
    }
}

TEST_CASE("make_bs_irs_channel blocks are contiguous with sizes within one", "[channel]")
{
    Rng rng(24);
    const auto ch = make_bs_irs_channel(64, 128, 20, rng);
    std::vector<int> sizes;
    for (std::size_t n = 0; n < ch.aods.size(); ++n)
    {
        if (n == 0 || ch.aods[n].azimuth != ch.aods[n - 1].azimuth)
            sizes.push_back(0);
        ++sizes.back();
    }
    REQUIRE(sizes.size() == 20);
    const auto [mn, mx] = std::minmax_element(sizes.begin(), sizes.end());
    CHECK(*mx - *mn <= 1);
}

TEST_CASE("make_bs_irs_channel rejects out-of-range ranks", "[channel]")
{
    Rng rng(25);
    CHECK_THROWS_AS(make_bs_irs_channel(4, 8, 5, rng), ContractViolation);
    CHECK_THROWS_AS(make_bs_irs_channel(4, 8, 0, rng), ContractViolation);
}

TEST_CASE("build_scenario is deterministic under the seed", "[channel]")
{
    const auto cfg = ScenarioConfig::uniform(16, 12, 3, 2, 6, 1.0, 1.0, 1.0, 1.0, 42);
    const auto a = build_scenario(cfg);
    const auto b = build_scenario(cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t m = 0; m < a.size(); ++m)
    {
        CHECK(a[m].R_h == b[m].R_h);
        CHECK(a[m].R_g == b[m].R_g);
        CHECK(a[m].G == b[m].G);
        CHECK(a[m].aod_strong == b[m].aod_strong);
    }
    auto other = cfg;
    other.seed = 43;
    CHECK(build_scenario(other)[0].R_h != a[0].R_h);
}

TEST_CASE("build_scenario with M = 1 and L = 1 gives a rank-one R_h", "[channel]")
{
    const auto pairs = build_scenario(ScenarioConfig::uniform(8, 4, 1, 1, 4));
    REQUIRE(pairs.size() == 1);
    CHECK(numeric_rank(pairs[0].R_h) == 1);
}

TEST_CASE("build_scenario invariants at 64 antennas and 20 single-path pairs", "[channel][property]")
{
    const auto cfg = ScenarioConfig::uniform(64, 32, 20, 1, 32);
    const auto pairs = build_scenario(cfg);
    REQUIRE(pairs.size() == 20);
    for (const auto &p : pairs)
    {
        CHECK(p.R_h.trace().real() == Catch::Approx(64.0).margin(1e-6));
        CHECK(numeric_rank(p.R_h) == 1);
        CHECK(min_eigenvalue(p.R_g) >= -1e-10 * p.R_g.trace().real());
        CHECK(numeric_rank(p.G) == 32);
        CHECK(((p.G.cwiseAbs().array() - 1.0).abs() < 1e-15).all());
        for (double a : p.aod_strong)
        {
            CHECK(a >= 0.0);
            CHECK(a <= pi);
        }
    }
}

TEST_CASE("build_scenario with several paths keeps rank L per pair", "[channel][property]")
{
    const auto pairs = build_scenario(ScenarioConfig::uniform(32, 16, 4, 3, 8, 1.0, 1.0, 1.0, 1.0, 9));
    for (const auto &p : pairs)
    {
        CHECK(numeric_rank(p.R_h) == 3);
        CHECK(numeric_rank(p.G) == 8);
        CHECK(p.R_h.trace().real() == Catch::Approx(32.0).margin(1e-6));
    }
}

TEST_CASE("build_scenario rejects configurations", "[channel]")
{
    CHECK_THROWS_AS(build_scenario(ScenarioConfig::uniform(8, 4, 8, 1, 4)), InfeasibleError);
    CHECK_THROWS_AS(build_scenario(ScenarioConfig::uniform(8, 4, 2, 1, 5)), ConfigError);
    CHECK_THROWS_AS(build_scenario(ScenarioConfig::uniform(8, 4, 2, 1, 4, 0.0)), ConfigError);
    auto cfg = ScenarioConfig::uniform(8, 4, 2, 1, 4);
    cfg.c2_2.pop_back();
    CHECK_THROWS_AS(build_scenario(cfg), ConfigError);
}

TEST_CASE("sample_instantaneous with R = 0 returns zeros", "[channel]")
{
    UserPairChannels p;
    p.R_h = HermitianMatrix::Zero(3, 3);
    p.R_g = HermitianMatrix::Zero(2, 2);
    Rng rng(31);
    for (int i = 0; i < 10; ++i)
    {
        const auto [h, g] = sample_instantaneous(p, rng);
        CHECK(h.norm() == 0.0);
        CHECK(g.norm() == 0.0);
    }
}

TEST_CASE("sample_instantaneous with R = I has unit per-entry variance", "[channel]")
{
    UserPairChannels p;
    p.R_h = HermitianMatrix::Identity(3, 3);
    p.R_g = HermitianMatrix::Identity(2, 2);
    InstantaneousSampler sampler(p);
    Rng rng(32);
    const int n = 100000;
    RealVector var = RealVector::Zero(3);
    for (int i = 0; i < n; ++i)
        var += sampler(rng).first.cwiseAbs2();
    var /= n;
    CHECK((var.array() - 1.0).abs().maxCoeff() < 0.05);
}

TEST_CASE("sample_instantaneous with rank-one R stays on the eigenvector", "[channel]")
{
    UserPairChannels p;
    p.R_h = make_covariance({1.2}, 6);
    p.R_g = make_covariance({0.4}, 4);
    const ComplexVector v = steering_vector(1.2, 6);
    Rng rng(33);
    for (int i = 0; i < 20; ++i)
    {
        const ComplexVector h = sample_instantaneous(p, rng).first;
        const ComplexVector resid = h - v * v.dot(h);
        CHECK(resid.norm() <= 1e-12 * std::max(h.norm(), 1.0));
    }
}

TEST_CASE("sample covariance matches R within 5 percent", "[channel]")
{
    Rng gen(34);
    UserPairChannels p;
    p.R_h = irsnoma::testing::random_psd(4, 3, gen);
    p.R_g = make_covariance({0.5, 2.0}, 5);
    InstantaneousSampler sampler(p);
    Rng rng(35);
    const int n = 100000;
    HermitianMatrix Sh = HermitianMatrix::Zero(4, 4);
    HermitianMatrix Sg = HermitianMatrix::Zero(5, 5);
    for (int i = 0; i < n; ++i)
    {
        const auto [h, g] = sampler(rng);
        Sh += h * h.adjoint();
        Sg += g * g.adjoint();
    }
    CHECK(relative_frobenius_error(Sh / n, p.R_h) < 0.05);
    CHECK(relative_frobenius_error(Sg / n, p.R_g) < 0.05);
}
