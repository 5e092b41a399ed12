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

#include "irsnoma/numerics.hpp"

#include <utility>

namespace irsnoma
{

/// Per-pair transmit powers in watts. p1 feeds the strong (cell-center) user,
/// p2 the weak (IRS-assisted) user of the same beam.
struct PowerAllocation
{
    RealVector p1;
    RealVector p2;

    PowerAllocation() = default;
    PowerAllocation(RealVector strong, RealVector weak) : p1(std::move(strong)), p2(std::move(weak)) {}

    static PowerAllocation zeros(Eigen::Index M)
    {
        return {RealVector::Zero(M), RealVector::Zero(M)};
    }

    Eigen::Index size() const { return p1.size(); }
    double beam_power(Eigen::Index m) const { return p1(m) + p2(m); }
    RealVector beam_powers() const { return p1 + p2; }
    double total() const { return p1.sum() + p2.sum(); }

    bool nonnegative() const
    {
        return (p1.array() >= 0.0).all() && (p2.array() >= 0.0).all();
    }

    /// Weak user gets at least as much power as the strong user of its pair.
    bool noma_ordered() const { return (p2.array() >= p1.array()).all(); }
};

} // namespace irsnoma
