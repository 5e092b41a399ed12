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

// Statistical channel state for one cell: sparse multipath covariances for the
// cell-center users, IRS-to-user covariances for the cell-edge users, and the
// rank-controlled line-of-sight BS-to-IRS matrices.

#pragma once

#include "irsnoma/numerics.hpp"
#include "irsnoma/random.hpp"

#include <cstdint>
#include <iostream>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace irsnoma
{

struct ScenarioConfig
{
    int Nt = 64;                 ///< BS transmit antennas
    int N = 128;                 ///< IRS elements per panel
    int M = 10;                  ///< user pairs (beams)
    std::vector<int> L;          ///< strong-user path counts, one per pair
    std::vector<int> Lg;         ///< IRS-to-weak-user path counts, one per pair
    int rankG = 64;              ///< target rank of every BS-IRS matrix
    double sigma2_n = 1.0;       ///< noise variance [W]
    std::vector<double> c2_1;    ///< strong-user path-loss gains (linear)
    std::vector<double> c2_2;    ///< weak-user path-loss gains (linear)
    double gamma_th = 1.0;       ///< SINR threshold (linear)
    std::uint64_t seed = 1;

    /// Broadcasts scalar settings to every pair.
    static ScenarioConfig uniform(int Nt, int N, int M, int L, int rankG, double sigma2_n = 1.0,
                                  double c2_1 = 1.0, double c2_2 = 1.0, double gamma_th = 1.0,
                                  std::uint64_t seed = 1)
    {
        ScenarioConfig cfg;
        cfg.Nt = Nt;
        cfg.N = N;
        cfg.M = M;
        cfg.L.assign(static_cast<std::size_t>(std::max(M, 0)), L);
        cfg.Lg.assign(static_cast<std::size_t>(std::max(M, 0)), L);
        cfg.rankG = rankG;
        cfg.sigma2_n = sigma2_n;
        cfg.c2_1.assign(static_cast<std::size_t>(std::max(M, 0)), c2_1);
        cfg.c2_2.assign(static_cast<std::size_t>(std::max(M, 0)), c2_2);
        cfg.gamma_th = gamma_th;
        cfg.seed = seed;
        return cfg;
    }

    int total_paths() const { return std::accumulate(L.begin(), L.end(), 0); }

    /// Throws ConfigError on malformed fields and InfeasibleError when the
    /// strong-user paths cannot be zeroforced (sum of paths >= Nt).
    void validate() const
    {
        if (Nt < 1 || N < 1 || M < 1)
            throw ConfigError("ScenarioConfig: Nt, N and M must be >= 1");
        const auto m = static_cast<std::size_t>(M);
        if (L.size() != m || Lg.size() != m || c2_1.size() != m || c2_2.size() != m)
            throw ConfigError("ScenarioConfig: per-pair vectors must have length M = " + std::to_string(M));
        for (std::size_t i = 0; i < m; ++i)
        {
            if (L[i] < 1 || L[i] > Nt)
                throw ConfigError("ScenarioConfig: L[" + std::to_string(i) + "] must lie in [1, Nt]");
            if (Lg[i] < 1 || Lg[i] > N)
                throw ConfigError("ScenarioConfig: Lg[" + std::to_string(i) + "] must lie in [1, N]");
            if (!(c2_1[i] > 0.0) || !(c2_2[i] > 0.0))
                throw ConfigError("ScenarioConfig: path-loss gains must be > 0");
        }
        if (rankG < 1 || rankG > std::min(Nt, N))
            throw ConfigError("ScenarioConfig: rankG must lie in [1, min(Nt, N)]");
        if (!(sigma2_n > 0.0))
            throw ConfigError("ScenarioConfig: sigma2_n must be > 0");
        if (!(gamma_th > 0.0))
            throw ConfigError("ScenarioConfig: gamma_th must be > 0");
        if (total_paths() >= Nt)
            throw InfeasibleError("ScenarioConfig: total strong-user paths " + std::to_string(total_paths()) +
                                  " >= Nt = " + std::to_string(Nt) + ", zeroforcing impossible");
    }
};

/// Elevation / azimuth AoD pair seen from the BS for one IRS element.
struct AodPair
{
    double elevation = 0.0; ///< xi, in [0, pi]
    double azimuth = 0.0;   ///< nu, in [0, 2 pi]
};

struct UserPairChannels
{
    HermitianMatrix R_h;  ///< Nt x Nt strong-user covariance
    HermitianMatrix R_g;  ///< N x N IRS-to-weak-user covariance
    ComplexMatrix G;      ///< Nt x N BS-to-IRS matrix
    double c2_1 = 1.0;
    double c2_2 = 1.0;
    std::vector<double> aod_strong;   ///< theta_{m,l}
    std::vector<double> aod_weak;     ///< AoDs building R_g
    std::vector<AodPair> aod_bs_irs;  ///< one per IRS element
    int L = 1;
    int Lg = 1;
};

/// ULA steering vector with entries exp(-j 2 pi k cos(theta)) / sqrt(Nt).
inline ComplexVector steering_vector(double theta, int Nt)
{
    if (Nt < 1)
        throw ContractViolation("steering_vector: Nt must be >= 1");
    ComplexVector a(Nt);
    const double c = std::cos(theta);
    const double scale = 1.0 / std::sqrt(static_cast<double>(Nt));
    for (int k = 0; k < Nt; ++k)
        a(k) = std::polar(scale, -2.0 * std::numbers::pi * k * c);
    return a;
}

/// (dim / L) A A^H with the steering vectors of `aods` as columns of A.
inline HermitianMatrix make_covariance(const std::vector<double> &aods, int dim)
{
    if (aods.empty())
        throw ContractViolation("make_covariance: at least one AoD required");
    if (static_cast<int>(aods.size()) > dim)
        throw ContractViolation("make_covariance: more paths than array elements");

    const auto L = static_cast<Eigen::Index>(aods.size());
    ComplexMatrix A(dim, L);
    for (Eigen::Index l = 0; l < L; ++l)
        A.col(l) = steering_vector(aods[static_cast<std::size_t>(l)], dim);

    HermitianMatrix R = (static_cast<double>(dim) / static_cast<double>(L)) * (A * A.adjoint());
    R = 0.5 * (R + R.adjoint()).eval();

    if (L > 1 && numeric_rank(A) < L)
        std::clog << "warning: make_covariance: steering vectors are linearly dependent, rank < " << L
                  << '\n';
    return R;
}

namespace detail
{

/// Draws `count` angles uniformly in [lo, hi], re-drawing any that lands within
/// `min_sep` of an earlier one.
inline std::vector<double> draw_distinct_angles(Rng &rng, int count, double lo, double hi,
                                                double min_sep = 1e-6)
{
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    while (static_cast<int>(out.size()) < count)
    {
        const double a = uniform(rng, lo, hi);
        bool clash = false;
        for (double b : out)
            clash = clash || std::abs(a - b) < min_sep;
        if (!clash)
            out.push_back(a);
    }
    return out;
}

inline AodPair draw_aod_pair(Rng &rng)
{
    AodPair p;
    p.elevation = uniform(rng, 0.0, std::numbers::pi);
    p.azimuth = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    return p;
}

inline ComplexMatrix bs_irs_matrix(int Nt, const std::vector<AodPair> &aods)
{
    const int N = static_cast<int>(aods.size());
    ComplexMatrix G(Nt, N);
    for (int n = 0; n < N; ++n)
    {
        const auto &p = aods[static_cast<std::size_t>(n)];
        const double s = std::sin(p.elevation) * std::sin(p.azimuth);
        const double col_phase = -std::numbers::pi * n * s;
        for (int nt = 0; nt < Nt; ++nt)
            G(nt, n) = std::polar(1.0, std::numbers::pi * nt * s + col_phase);
    }
    return G;
}

} // namespace detail

struct BsIrsChannel
{
    ComplexMatrix G;
    std::vector<AodPair> aods; ///< per IRS element
};

/// Rank-controlled BS-IRS matrix. Full rank (rankG = min(Nt, N)) draws an
/// independent AoD pair per element. Lower ranks split the elements into rankG
/// contiguous blocks whose sizes differ by at most one, one AoD pair per block,
/// and are redrawn until the numeric rank equals rankG.
inline BsIrsChannel make_bs_irs_channel(int Nt, int N, int rankG, Rng &rng)
{
    if (Nt < 1 || N < 1 || rankG < 1 || rankG > std::min(Nt, N))
        throw ContractViolation("make_bs_irs_channel: rankG must lie in [1, min(Nt, N)]");

    const bool full_rank = rankG == std::min(Nt, N);
    const int draws = full_rank ? N : rankG;
    constexpr int kMaxAttempts = 100;

    for (int attempt = 0; attempt < kMaxAttempts; ++attempt)
    {
        std::vector<AodPair> distinct;
        distinct.reserve(static_cast<std::size_t>(draws));
        for (int i = 0; i < draws; ++i)
            distinct.push_back(detail::draw_aod_pair(rng));

        std::vector<AodPair> per_element(static_cast<std::size_t>(N));
        if (full_rank)
        {
            per_element = distinct;
        }
        else
        {
            const int base = N / rankG;
            const int extra = N % rankG;
            int n = 0;
            for (int b = 0; b < rankG; ++b)
            {
                const int size = base + (b < extra ? 1 : 0);
                for (int k = 0; k < size; ++k)
                    per_element[static_cast<std::size_t>(n++)] = distinct[static_cast<std::size_t>(b)];
            }
        }

        ComplexMatrix G = detail::bs_irs_matrix(Nt, per_element);
        // Full rank holds structurally for distinct draws, but the Vandermonde
        // columns are too ill-conditioned to resolve at the cutoff when N ~ Nt.
        if (full_rank || numeric_rank(G) == rankG)
            return {std::move(G), std::move(per_element)};
    }
    throw NumericError("make_bs_irs_channel: could not reach rank " + std::to_string(rankG));
}

/// All M pairs of a scenario. Pair m draws from its own stream derived from
/// (cfg.seed, m), so the result is reproducible and independent of evaluation order.
inline std::vector<UserPairChannels> build_scenario(const ScenarioConfig &cfg)
{
    cfg.validate();
    std::vector<UserPairChannels> pairs;
    pairs.reserve(static_cast<std::size_t>(cfg.M));
    for (int m = 0; m < cfg.M; ++m)
    {
        const auto mi = static_cast<std::size_t>(m);
        Rng rng = make_stream(cfg.seed, static_cast<std::uint64_t>(m));

        UserPairChannels pc;
        pc.L = cfg.L[mi];
        pc.Lg = cfg.Lg[mi];
        pc.c2_1 = cfg.c2_1[mi];
        pc.c2_2 = cfg.c2_2[mi];
        pc.aod_strong = detail::draw_distinct_angles(rng, pc.L, 0.0, std::numbers::pi);
        pc.R_h = make_covariance(pc.aod_strong, cfg.Nt);
        pc.aod_weak = detail::draw_distinct_angles(rng, pc.Lg, 0.0, std::numbers::pi);
        pc.R_g = make_covariance(pc.aod_weak, cfg.N);
        auto bs_irs = make_bs_irs_channel(cfg.Nt, cfg.N, cfg.rankG, rng);
        pc.G = std::move(bs_irs.G);
        pc.aod_bs_irs = std::move(bs_irs.aods);
        pairs.push_back(std::move(pc));
    }
    return pairs;
}

/// Coloring factor F with F F^H = R, from the eigendecomposition of R.
inline ComplexMatrix coloring_factor(const HermitianMatrix &R)
{
    if (R.size() == 0)
        return ComplexMatrix(0, 0);
    const auto eig = hermitian_eig(R);
    const double cutoff = kRankCutoff * std::max(std::abs(eig.values(0)), 0.0);
    Eigen::Index r = 0;
    while (r < eig.values.size() && eig.values(r) > cutoff && eig.values(r) > 0.0)
        ++r;
    ComplexMatrix F = eig.vectors.leftCols(r);
    for (Eigen::Index i = 0; i < r; ++i)
        F.col(i) *= std::sqrt(eig.values(i));
    return F;
}

inline ComplexVector sample_colored(const ComplexMatrix &F, Eigen::Index dim, Rng &rng)
{
    if (F.cols() == 0)
        return ComplexVector::Zero(dim);
    ComplexVector z(F.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i)
        z(i) = complex_normal(rng);
    return F * z;
}

/// Draws instantaneous channels (h, g) with covariances (R_h, R_g). Caches the
/// coloring factors so repeated draws cost one matrix-vector product each.
class InstantaneousSampler
{
  public:
    explicit InstantaneousSampler(const UserPairChannels &pair)
        : Fh_(coloring_factor(pair.R_h)), Fg_(coloring_factor(pair.R_g)), nt_(pair.R_h.rows()),
          n_(pair.R_g.rows())
    {
    }

    std::pair<ComplexVector, ComplexVector> operator()(Rng &rng) const
    {
        ComplexVector h = sample_colored(Fh_, nt_, rng);
        ComplexVector g = sample_colored(Fg_, n_, rng);
        return {std::move(h), std::move(g)};
    }

  private:
    ComplexMatrix Fh_;
    ComplexMatrix Fg_;
    Eigen::Index nt_;
    Eigen::Index n_;
};

inline std::pair<ComplexVector, ComplexVector> sample_instantaneous(const UserPairChannels &pair, Rng &rng)
{
    return InstantaneousSampler(pair)(rng);
}

} // namespace irsnoma
