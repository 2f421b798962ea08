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

#ifndef BEAMTRACK_METRICS_HPP
#define BEAMTRACK_METRICS_HPP

#include "beamtrack/beam_geometry.hpp"
#include "beamtrack/models.hpp"

#include <nlohmann/json.hpp>

#include <span>
#include <string>
#include <vector>

namespace beamtrack::eval
{
    inline constexpr int metrics_schema_version = 1;

    // 1-based indices of the k largest logits; ties go to the smaller index.
    std::vector<int> top_k_indices(const Eigen::RowVectorXd &logits, int k);

    // Fraction of samples whose slot-j top-k contains the true beam.
    double topk_accuracy(std::span<const model::BeamProbSeries> series, std::span<const geometry::BeamLabels> labels,
                         int k, int slot);

    // Mean of max(0, 1 - min_{top-K} |b_hat - b*| / delta). delta <= 0 selects C - 1.
    double dba(std::span<const model::BeamProbSeries> series, std::span<const geometry::BeamLabels> labels, int slot,
               int top_k = 3, double delta = 0.0);

    double average(std::span<const double> per_slot);

    struct MetricsReport
    {
        int schema_version = metrics_schema_version;
        std::string model;
        std::string config_digest;
        long long sample_count = 0;
        std::vector<double> top1, top3, top5, dba; // per slot 0..J
        double atop1 = 0.0, atop3 = 0.0, atop5 = 0.0, adba = 0.0;

        nlohmann::json to_json() const;
        static MetricsReport from_json(const nlohmann::json &j);
        bool operator==(const MetricsReport &) const = default;
    };

    struct MetricsOptions
    {
        int dba_top_k = 3;
        double dba_delta = 0.0; // <= 0 selects C - 1
    };

    MetricsReport compute_metrics(std::span<const model::BeamProbSeries> series,
                                  std::span<const geometry::BeamLabels> labels, const std::string &model_identity,
                                  const std::string &config_digest, const MetricsOptions &options = {});
}

#endif
