// SPDX-License-Identifier: Apache-2.0
//
// beamtrack: sensing-aided mmWave beam tracking workbench
// Copyright (C) 2026 The beamtrack authors
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

#ifndef BEAMTRACK_REPORTS_HPP
#define BEAMTRACK_REPORTS_HPP

#include "beamtrack/metrics.hpp"
#include "beamtrack/models.hpp"

#include <span>
#include <string>

namespace beamtrack::eval
{
    inline constexpr double param_ratio_threshold = 20.0;
    inline constexpr double flop_ratio_threshold = 3.5;
    // Ratios of the reference lightweight design this workbench is calibrated against.
    inline constexpr double reference_param_ratio = 27.0;
    inline constexpr double reference_flop_ratio = 4.0;

    struct ComplexityComparison
    {
        model::ComplexityReport teacher;
        model::ComplexityReport student;
        double param_ratio = 0.0; // teacher / student
        double flop_ratio = 0.0;
        bool params_pass = false;
        bool flops_pass = false;
    };

    ComplexityComparison compare_complexity(const model::ModelSpec &teacher, const model::ModelSpec &student);
    std::string complexity_report(const model::ModelSpec &teacher, const model::ModelSpec &student);

    // Averaged metrics, one column per model, percentages with two decimals.
    std::string results_table(std::span<const MetricsReport> reports);
    std::string per_slot_table(std::span<const MetricsReport> reports);

    // Stacked Top-3 / Top-5 bars per slot and per model.
    std::string topk_bars_svg(std::span<const MetricsReport> reports);
    // One DBA line per model across slots.
    std::string dba_lines_svg(std::span<const MetricsReport> reports);
}

#endif
