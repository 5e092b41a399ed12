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

#include "irsnoma/harness.hpp"
#include "irsnoma/joint.hpp"
#include "irsnoma/scenario_io.hpp"

#include <string>
#include <vector>

namespace irsnoma
{

namespace detail
{

inline void reject_unknown(const Json &j, const std::vector<std::string> &known, const std::string &where)
{
    for (const auto &[key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown " + where + " key '" + key + "'");
}

} // namespace detail

inline SolverConfig solver_config_from_json(const Json &j)
{
    if (!j.is_object())
        throw ConfigError("solver config must be a JSON object");
    detail::reject_unknown(j,
                           {"eps_gamma", "eps_dinkelbach", "Pmax", "Pmax_growth", "max_escalations",
                            "max_outer_iterations", "dinkelbach_max_iterations", "admm_iterations",
                            "admm_tolerance", "polish_sweeps"},
                           "solver");
    try
    {
        SolverConfig c;
        c.eps_gamma = j.value("eps_gamma", c.eps_gamma);
        c.eps_dinkelbach = j.value("eps_dinkelbach", c.eps_dinkelbach);
        c.Pmax = j.value("Pmax", c.Pmax);
        c.Pmax_growth = j.value("Pmax_growth", c.Pmax_growth);
        c.max_escalations = j.value("max_escalations", c.max_escalations);
        c.max_outer_iterations = j.value("max_outer_iterations", c.max_outer_iterations);
        c.dinkelbach.max_iterations = j.value("dinkelbach_max_iterations", c.dinkelbach.max_iterations);
        c.dinkelbach.admm.max_iterations = j.value("admm_iterations", c.dinkelbach.admm.max_iterations);
        c.dinkelbach.admm.tolerance = j.value("admm_tolerance", c.dinkelbach.admm.tolerance);
        c.dinkelbach.polish_sweeps = j.value("polish_sweeps", c.dinkelbach.polish_sweeps);
        c.validate();
        return c;
    }
    catch (const Json::exception &e)
    {
        throw ConfigError(std::string("solver config: ") + e.what());
    }
}

/// Run configuration file: {"scenario": {...}, "solver": {...}, "experiment": {...}}.
/// Every section is optional.
inline ExperimentSpec experiment_from_json(const Json &j, ExperimentKind kind)
{
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");
    detail::reject_unknown(j, {"scenario", "solver", "experiment"}, "top-level");
    ExperimentSpec spec;
    spec.kind = kind;
    if (j.contains("scenario"))
        spec.base = scenario_config_from_json(j.at("scenario"));
    if (j.contains("solver"))
        spec.solver = solver_config_from_json(j.at("solver"));
    if (j.contains("experiment"))
    {
        const Json &e = j.at("experiment");
        if (!e.is_object())
            throw ConfigError("experiment section must be a JSON object");
        detail::reject_unknown(e,
                               {"values", "trials", "beam_snr_db", "weak_fraction", "reference_c2", "mc_samples",
                                "workers"},
                               "experiment");
        try
        {
            spec.values = e.value("values", spec.values);
            spec.trials = e.value("trials", spec.trials);
            spec.beam_snr_db = e.value("beam_snr_db", spec.beam_snr_db);
            spec.weak_fraction = e.value("weak_fraction", spec.weak_fraction);
            spec.reference_c2 = e.value("reference_c2", spec.reference_c2);
            spec.mc_samples = e.value("mc_samples", spec.mc_samples);
            spec.workers = e.value("workers", spec.workers);
        }
        catch (const Json::exception &ex)
        {
            throw ConfigError(std::string("experiment config: ") + ex.what());
        }
    }
    return spec;
}

} // namespace irsnoma
