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

#include "eesim/errors.hpp"

namespace eesim
{
    const char *error_code_name(ErrorCode code) noexcept
    {
        switch (code)
        {
        case ErrorCode::DegenerateGeometry:
            return "DegenerateGeometry";
        case ErrorCode::InvalidParameter:
            return "InvalidParameter";
        case ErrorCode::NonPositivePower:
            return "NonPositivePower";
        case ErrorCode::InfeasibleProblem:
            return "InfeasibleProblem";
        case ErrorCode::MaxIterations:
            return "MaxIterations";
        case ErrorCode::LineSearchStall:
            return "LineSearchStall";
        case ErrorCode::SurrogateCollapse:
            return "SurrogateCollapse";
        case ErrorCode::OracleTooLarge:
            return "OracleTooLarge";
        case ErrorCode::ConfigError:
            return "ConfigError";
        case ErrorCode::IoError:
            return "IoError";
        }
        return "UnknownError";
    }
}
