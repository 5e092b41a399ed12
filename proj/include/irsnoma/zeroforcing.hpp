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
#include "irsnoma/numerics.hpp"

#include <string>
#include <vector>

namespace irsnoma
{

/// Unit-norm transmit beams, one per pair, each orthogonal to every other
/// pair's strong-user eigenspace.
struct BeamSet
{
    std::vector<ComplexVector> beams;
    std::vector<double> signal_gain; ///< w_m^H R_h,m w_m

    std::size_t size() const { return beams.size(); }
};

/// Orthonormal basis (Nt x L) of the column space of a rank-L covariance.
inline ComplexMatrix eigenspace_basis(const HermitianMatrix &R, int L)
{
    if (L < 1 || L > R.rows())
        throw ContractViolation("eigenspace_basis: L must lie in [1, order]");
    const auto eig = hermitian_eig(R);
    const double top = eig.values(0);
    const double cutoff = kRankCutoff * std::abs(top);
    const bool rank_ok = eig.values(L - 1) > cutoff && (L == R.rows() || eig.values(L) <= cutoff);
    if (!(top > 0.0) || !rank_ok)
        throw ContractViolation("eigenspace_basis: covariance rank differs from L = " + std::to_string(L));
    return eig.vectors.leftCols(L);
}

/// Rotates v so its largest-magnitude entry is real and positive.
inline void fix_global_phase(ComplexVector &v)
{
    if (v.size() == 0)
        return;
    Eigen::Index idx = 0;
    v.cwiseAbs().maxCoeff(&idx);
    const double mag = std::abs(v(idx));
    if (mag > 0.0)
        v *= std::conj(v(idx)) / mag;
}

/// Zeroforcing beams from the strong-user covariances. Within the null space
/// of the other pairs' eigenspaces, w_m maximizes w^H R_h,m w.
inline BeamSet zeroforcing_beams(const std::vector<UserPairChannels> &pairs)
{
    const std::size_t M = pairs.size();
    if (M == 0)
        return {};
    const Eigen::Index Nt = pairs.front().R_h.rows();

    std::vector<ComplexMatrix> bases;
    bases.reserve(M);
    for (const auto &p : pairs)
    {
        if (p.R_h.rows() != Nt)
            throw ContractViolation("zeroforcing_beams: inconsistent Nt across pairs");
        bases.push_back(eigenspace_basis(p.R_h, p.L));
    }

    BeamSet out;
    out.beams.reserve(M);
    out.signal_gain.reserve(M);
    for (std::size_t m = 0; m < M; ++m)
    {
        Eigen::Index cols = 0;
        for (std::size_t k = 0; k < M; ++k)
            if (k != m)
                cols += bases[k].cols();

        ComplexMatrix others(Nt, cols);
        Eigen::Index c = 0;
        for (std::size_t k = 0; k < M; ++k)
        {
            if (k == m)
                continue;
            others.middleCols(c, bases[k].cols()) = bases[k];
            c += bases[k].cols();
        }

        const ComplexMatrix B = null_space_basis(others);
        if (B.cols() == 0)
            throw InfeasibleError("zeroforcing_beams: empty null space for pair " + std::to_string(m));

        const HermitianMatrix reduced = B.adjoint() * pairs[m].R_h * B;
        const auto eig = hermitian_eig(0.5 * (reduced + reduced.adjoint()));
        ComplexVector w = B * eig.vectors.col(0);
        w.normalize();
        fix_global_phase(w);

        out.signal_gain.push_back(std::max(quadratic_form(pairs[m].R_h, w), 0.0));
        out.beams.push_back(std::move(w));
    }
    return out;
}

/// max over m != k of |w_m^H U_k|, the zeroforcing residual.
inline double zeroforcing_residual(const BeamSet &beams, const std::vector<UserPairChannels> &pairs)
{
    double worst = 0.0;
    for (std::size_t k = 0; k < pairs.size(); ++k)
    {
        const ComplexMatrix U = eigenspace_basis(pairs[k].R_h, pairs[k].L);
        for (std::size_t m = 0; m < beams.size(); ++m)
            if (m != k)
                worst = std::max(worst, (beams.beams[m].adjoint() * U).cwiseAbs().maxCoeff());
    }
    return worst;
}

} // namespace irsnoma
