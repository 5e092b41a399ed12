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

#include <stdexcept>
#include <string>
#include <string_view>

namespace irsnoma
{

/// Coarse failure class, surfaced by the CLI as a machine-readable tag.
enum class ErrorCategory
{
    config,     ///< malformed or out-of-range input
    infeasible, ///< no finite power / beam satisfies the constraints
    numeric,    ///< decomposition or iteration failed to behave
    contract    ///< caller broke a documented precondition
};

inline constexpr std::string_view to_string(ErrorCategory c) noexcept
{
    switch (c)
    {
    case ErrorCategory::config:
        return "config";
    case ErrorCategory::infeasible:
        return "infeasible";
    case ErrorCategory::numeric:
        return "numeric";
    case ErrorCategory::contract:
        return "contract";
    }
    return "unknown";
}

class Error : public std::runtime_error
{
  public:
    Error(ErrorCategory category, const std::string &what)
        : std::runtime_error(what), category_(category)
    {
    }

    ErrorCategory category() const noexcept { return category_; }

  private:
    ErrorCategory category_;
};

struct ConfigError : Error
{
    explicit ConfigError(const std::string &what) : Error(ErrorCategory::config, what) {}
};

struct InfeasibleError : Error
{
    explicit InfeasibleError(const std::string &what) : Error(ErrorCategory::infeasible, what) {}
};

struct NumericError : Error
{
    explicit NumericError(const std::string &what) : Error(ErrorCategory::numeric, what) {}
};

struct ContractViolation : Error
{
    explicit ContractViolation(const std::string &what) : Error(ErrorCategory::contract, what) {}
};

/// Rethrows e as the same concrete type with ctx prepended to the message.
[[noreturn]] inline void rethrow_with_context(const Error &e, const std::string &ctx)
{
    const std::string msg = ctx + ": " + e.what();
    switch (e.category())
    {
    case ErrorCategory::config:
        throw ConfigError(msg);
    case ErrorCategory::infeasible:
        throw InfeasibleError(msg);
    case ErrorCategory::numeric:
        throw NumericError(msg);
    case ErrorCategory::contract:
        break;
    }
    throw ContractViolation(msg);
}

} // namespace irsnoma
