// SPDX-License-Identifier: Apache-2.0
//
// eesim: energy-efficiency optimization for UAV-relayed THz NOMA links
// Copyright (C) 2026 The eesim authors
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

#ifndef EESIM_ERRORS_HPP
#define EESIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace eesim
{
    // Numeric values are shared with the C API (eesim_status).
    enum class ErrorCode : int
    {
        DegenerateGeometry = 1,
        InvalidParameter = 2,
        NonPositivePower = 3,
        InfeasibleProblem = 4,
        MaxIterations = 5,
        LineSearchStall = 6,
        SurrogateCollapse = 7,
        OracleTooLarge = 8,
        ConfigError = 9,
        IoError = 10,
    };

    const char *error_code_name(ErrorCode code) noexcept;

    class Error : public std::runtime_error
    {
    public:
        Error(ErrorCode code, const std::string &what)
            : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code), detail_(what) {}

        ErrorCode code() const noexcept { return code_; }
        const std::string &detail() const noexcept { return detail_; }

    private:
        ErrorCode code_;
        std::string detail_;
    };

    [[noreturn]] inline void fail(ErrorCode code, const std::string &what) { throw Error(code, what); }
}

#endif
