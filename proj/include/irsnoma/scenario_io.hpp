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

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace irsnoma
{

using Json = nlohmann::json;

namespace detail
{

/// 1-based line and column of a byte offset in text.
inline std::pair<std::size_t, std::size_t> line_column(const std::string &text, std::size_t byte)
{
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i)
    {
        if (text[i] == '\n')
        {
            ++line;
            col = 1;
        }
        else
        {
            ++col;
        }
    }
    return {line, col};
}

inline std::string line_text(const std::string &text, std::size_t line)
{
    std::istringstream is(text);
    std::string s;
    for (std::size_t i = 0; i < line && std::getline(is, s); ++i)
    {
    }
    return s;
}

/// Accepts a scalar (broadcast to M entries) or an array of length M.
template <class T>
std::vector<T> per_pair(const Json &j, const char *key, int M, T fallback)
{
    if (!j.contains(key))
        return std::vector<T>(static_cast<std::size_t>(std::max(M, 0)), fallback);
    const Json &v = j.at(key);
    if (v.is_array())
    {
        auto out = v.get<std::vector<T>>();
        if (static_cast<int>(out.size()) != M)
            throw ConfigError(std::string("config key '") + key + "': expected " + std::to_string(M) +
                              " entries, got " + std::to_string(out.size()));
        return out;
    }
    return std::vector<T>(static_cast<std::size_t>(std::max(M, 0)), v.get<T>());
}

} // namespace detail

/// Parses JSON text; syntax errors become ConfigError with line, column and
/// the offending line.
inline Json parse_json_text(const std::string &text, const std::string &origin = "<input>")
{
    try
    {
        return Json::parse(text);
    }
    catch (const Json::parse_error &e)
    {
        const auto [line, col] = detail::line_column(text, e.byte);
        throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                          ": JSON syntax error near '" + detail::line_text(text, line) + "': " + e.what());
    }
}

inline std::string read_text_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Json load_json_file(const std::string &path)
{
    return parse_json_text(read_text_file(path), path);
}

/// ScenarioConfig from a JSON object; missing keys keep their defaults and
/// per-pair keys accept a scalar or an array of length M.
inline ScenarioConfig scenario_config_from_json(const Json &j)
{
    if (!j.is_object())
        throw ConfigError("scenario config must be a JSON object");
    static const std::vector<std::string> known = {"Nt",   "N",    "M",        "L",        "Lg",
                                                   "rankG", "sigma2_n", "c2_1", "c2_2", "gamma_th", "seed"};
    for (const auto &[key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown scenario key '" + key + "'");
    try
    {
        ScenarioConfig cfg;
        cfg.Nt = j.value("Nt", cfg.Nt);
        cfg.N = j.value("N", cfg.N);
        cfg.M = j.value("M", cfg.M);
        cfg.L = detail::per_pair<int>(j, "L", cfg.M, 1);
        cfg.Lg = j.contains("Lg") ? detail::per_pair<int>(j, "Lg", cfg.M, 1) : cfg.L;
        cfg.rankG = j.value("rankG", std::min(cfg.Nt, cfg.N));
        cfg.sigma2_n = j.value("sigma2_n", cfg.sigma2_n);
        cfg.c2_1 = detail::per_pair<double>(j, "c2_1", cfg.M, 1.0);
        cfg.c2_2 = detail::per_pair<double>(j, "c2_2", cfg.M, 1.0);
        cfg.gamma_th = j.value("gamma_th", cfg.gamma_th);
        cfg.seed = j.value("seed", cfg.seed);
        return cfg;
    }
    catch (const Json::exception &e)
    {
        throw ConfigError(std::string("scenario config: ") + e.what());
    }
}

inline Json to_json(const ScenarioConfig &cfg)
{
    return Json{{"Nt", cfg.Nt},       {"N", cfg.N},         {"M", cfg.M},
                {"L", cfg.L},         {"Lg", cfg.Lg},       {"rankG", cfg.rankG},
                {"sigma2_n", cfg.sigma2_n}, {"c2_1", cfg.c2_1}, {"c2_2", cfg.c2_2},
                {"gamma_th", cfg.gamma_th}, {"seed", cfg.seed}};
}

/// Row-major list of [re, im] pairs, with the shape stored alongside.
inline Json matrix_to_json(const ComplexMatrix &A)
{
    Json data = Json::array();
    for (Eigen::Index r = 0; r < A.rows(); ++r)
        for (Eigen::Index c = 0; c < A.cols(); ++c)
            data.push_back(Json::array({A(r, c).real(), A(r, c).imag()}));
    return Json{{"rows", A.rows()}, {"cols", A.cols()}, {"data", std::move(data)}};
}

inline ComplexMatrix matrix_from_json(const Json &j)
{
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const Json &data = j.at("data");
    if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw ConfigError("matrix: data length does not match rows x cols");
    ComplexMatrix A(rows, cols);
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c, ++i)
        {
            const Json &e = data.at(i);
            if (!e.is_array() || e.size() != 2)
                throw ConfigError("matrix: entry " + std::to_string(i) + " is not an [re, im] pair");
            A(r, c) = {e[0].get<double>(), e[1].get<double>()};
        }
    return A;
}

struct Scenario
{
    ScenarioConfig config;
    std::vector<UserPairChannels> pairs;
};

inline Json to_json(const Scenario &s)
{
    Json pairs = Json::array();
    for (const auto &p : s.pairs)
    {
        Json bs_irs = Json::array();
        for (const auto &a : p.aod_bs_irs)
            bs_irs.push_back(Json::array({a.elevation, a.azimuth}));
        pairs.push_back(Json{{"L", p.L},
                             {"Lg", p.Lg},
                             {"c2_1", p.c2_1},
                             {"c2_2", p.c2_2},
                             {"aod_strong", p.aod_strong},
                             {"aod_weak", p.aod_weak},
                             {"aod_bs_irs", std::move(bs_irs)},
                             {"R_h", matrix_to_json(p.R_h)},
                             {"R_g", matrix_to_json(p.R_g)},
                             {"G", matrix_to_json(p.G)}});
    }
    return Json{{"config", to_json(s.config)}, {"pairs", std::move(pairs)}};
}

inline Scenario scenario_from_json(const Json &j)
{
    try
    {
        Scenario s;
        s.config = scenario_config_from_json(j.at("config"));
        for (const auto &pj : j.at("pairs"))
        {
            UserPairChannels p;
            p.L = pj.at("L").get<int>();
            p.Lg = pj.at("Lg").get<int>();
            p.c2_1 = pj.at("c2_1").get<double>();
            p.c2_2 = pj.at("c2_2").get<double>();
            p.aod_strong = pj.at("aod_strong").get<std::vector<double>>();
            p.aod_weak = pj.at("aod_weak").get<std::vector<double>>();
            for (const auto &a : pj.at("aod_bs_irs"))
                p.aod_bs_irs.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
            p.R_h = matrix_from_json(pj.at("R_h"));
            p.R_g = matrix_from_json(pj.at("R_g"));
            p.G = matrix_from_json(pj.at("G"));
            s.pairs.push_back(std::move(p));
        }
        if (static_cast<int>(s.pairs.size()) != s.config.M)
            throw ConfigError("scenario: pair count differs from config M");
        return s;
    }
    catch (const Json::exception &e)
    {
        throw ConfigError(std::string("scenario file: ") + e.what());
    }
}

/// Doubles are written in shortest round-trip form, so reading back is exact.
inline std::string dump_scenario(const Scenario &s) { return to_json(s).dump(1) + "\n"; }

} // namespace irsnoma
