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

#include "beamtrack/metrics.hpp"

#include "beamtrack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace beamtrack::eval
{
    namespace
    {
        void check_aligned(std::span<const model::BeamProbSeries> series, std::span<const geometry::BeamLabels> labels,
                           int slot)
        {
            if (series.size() != labels.size())
                throw ShapeError("predictions and labels differ in count");
            if (series.empty())
                throw ShapeError("no samples to evaluate");
            for (std::size_t i = 0; i < series.size(); ++i)
                if (slot < 0 || slot >= series[i].slots() || slot >= static_cast<int>(labels[i].b_star.size()))
                    throw IndexError("slot " + std::to_string(slot) + " outside the prediction horizon");
        }
    }

    std::vector<int> top_k_indices(const Eigen::RowVectorXd &logits, int k)
    {
        const int c = static_cast<int>(logits.size());
        if (k < 1 || k > c)
            throw ConfigError("k=" + std::to_string(k) + " must lie in 1.." + std::to_string(c), "evaluation.k");
        std::vector<int> idx(static_cast<std::size_t>(c));
        std::iota(idx.begin(), idx.end(), 0);
        std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](int a, int b) {
            return logits(a) > logits(b) || (logits(a) == logits(b) && a < b);
        });
        idx.resize(static_cast<std::size_t>(k));
        for (int &i : idx)
            ++i;
        return idx;
    }

    double topk_accuracy(std::span<const model::BeamProbSeries> series, std::span<const geometry::BeamLabels> labels,
                         int k, int slot)
    {
        check_aligned(series, labels, slot);
        long long hits = 0;
        for (std::size_t i = 0; i < series.size(); ++i)
        {
            const auto top = top_k_indices(series[i].logits.row(slot), k);
            hits += std::find(top.begin(), top.end(), labels[i].b_star[static_cast<std::size_t>(slot)]) != top.end();
        }
        return static_cast<double>(hits) / static_cast<double>(series.size());
    }

    double dba(std::span<const model::BeamProbSeries> series, std::span<const geometry::BeamLabels> labels, int slot,
               int top_k, double delta)
    {
        check_aligned(series, labels, slot);
        double sum = 0.0;
        for (std::size_t i = 0; i < series.size(); ++i)
        {
            const double d = delta > 0.0 ? delta : static_cast<double>(series[i].num_beams() - 1);
            const int truth = labels[i].b_star[static_cast<std::size_t>(slot)];
            int best = std::numeric_limits<int>::max();
            for (int b : top_k_indices(series[i].logits.row(slot), top_k))
                best = std::min(best, std::abs(b - truth));
            sum += std::max(0.0, 1.0 - best / d);
        }
        return sum / static_cast<double>(series.size());
    }

    double average(std::span<const double> per_slot)
    {
        if (per_slot.empty())
            throw ShapeError("no per-slot values to average");
        return std::accumulate(per_slot.begin(), per_slot.end(), 0.0) / static_cast<double>(per_slot.size());
    }

    MetricsReport compute_metrics(std::span<const model::BeamProbSeries> series,
                                  std::span<const geometry::BeamLabels> labels, const std::string &model_identity,
                                  const std::string &config_digest, const MetricsOptions &options)
    {
        if (series.empty())
            throw ShapeError("no samples to evaluate");
        MetricsReport r;
        r.model = model_identity;
        r.config_digest = config_digest;
        r.sample_count = static_cast<long long>(series.size());
        const int slots = series.front().slots();
        const int c = series.front().num_beams();
        for (int j = 0; j < slots; ++j)
        {
            r.top1.push_back(topk_accuracy(series, labels, 1, j));
            r.top3.push_back(topk_accuracy(series, labels, std::min(3, c), j));
            r.top5.push_back(topk_accuracy(series, labels, std::min(5, c), j));
            r.dba.push_back(dba(series, labels, j, std::min(options.dba_top_k, c), options.dba_delta));
        }
        r.atop1 = average(r.top1);
        r.atop3 = average(r.top3);
        r.atop5 = average(r.top5);
        r.adba = average(r.dba);
        return r;
    }

    nlohmann::json MetricsReport::to_json() const
    {
        return {{"schema_version", schema_version},
                {"model", model},
                {"config_digest", config_digest},
                {"sample_count", sample_count},
                {"top1", top1},
                {"top3", top3},
                {"top5", top5},
                {"dba", dba},
                {"atop1", atop1},
                {"atop3", atop3},
                {"atop5", atop5},
                {"adba", adba}};
    }

    MetricsReport MetricsReport::from_json(const nlohmann::json &j)
    {
        try
        {
            MetricsReport r;
            r.schema_version = j.at("schema_version").get<int>();
            if (r.schema_version != metrics_schema_version)
                throw FormatError("unsupported metrics schema version " + std::to_string(r.schema_version));
            r.model = j.at("model").get<std::string>();
            r.config_digest = j.at("config_digest").get<std::string>();
            r.sample_count = j.at("sample_count").get<long long>();
            r.top1 = j.at("top1").get<std::vector<double>>();
            r.top3 = j.at("top3").get<std::vector<double>>();
            r.top5 = j.at("top5").get<std::vector<double>>();
            r.dba = j.at("dba").get<std::vector<double>>();
            r.atop1 = j.at("atop1").get<double>();
            r.atop3 = j.at("atop3").get<double>();
            r.atop5 = j.at("atop5").get<double>();
            r.adba = j.at("adba").get<double>();
            return r;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw FormatError(std::string("malformed metrics record: ") + e.what());
        }
    }
}
