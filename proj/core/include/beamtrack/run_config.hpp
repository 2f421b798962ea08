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

#ifndef BEAMTRACK_RUN_CONFIG_HPP
#define BEAMTRACK_RUN_CONFIG_HPP

#include "beamtrack/dataset_generator.hpp"
#include "beamtrack/dataset_store.hpp"
#include "beamtrack/metrics.hpp"
#include "beamtrack/models.hpp"
#include "beamtrack/training.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace beamtrack
{
    // One file drives every stage. Sections: scenario, radar, scene, dataset, model,
    // training, evaluation. Unknown keys are rejected with their dotted path.
    struct RunConfig
    {
        data::GeneratorConfig generator;
        data::SplitSpec split;
        model::ModelSpec teacher = model::default_teacher_spec();
        model::ModelSpec student = model::default_student_spec();
        training::TrainConfig training;
        eval::MetricsOptions evaluation;

        void validate() const;
    };

    RunConfig default_run_config();
    RunConfig run_config_from_json(const nlohmann::json &j);
    nlohmann::json run_config_to_json(const RunConfig &config);
    RunConfig load_run_config(const std::filesystem::path &path);
    // Short hex digest of the canonical JSON form.
    std::string config_digest(const RunConfig &config);
}

#endif
