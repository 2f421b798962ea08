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

#ifndef BEAMTRACK_TRAINING_HPP
#define BEAMTRACK_TRAINING_HPP

#include "beamtrack/dataset_store.hpp"
#include "beamtrack/losses.hpp"
#include "beamtrack/models.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace beamtrack::training
{
    struct TrainConfig
    {
        double beta = 0.5;        // weight of the distillation term
        double temperature = 2.0; // softmax temperature for distillation
        double focal_gamma = 2.0;
        double focal_alpha = 1.0;
        bool class_balanced_alpha = false; // per-beam alpha from the training histogram
        double lr_init = 1e-4;
        double lr_min = 0.0; // <= 0 selects lr_init / 100
        int cycle_length = 25;
        int max_epochs = 100;
        int batch_size = 32;
        int patience = 20;
        std::uint64_t seed = 0;
        double clip_norm = 5.0; // <= 0 disables clipping
        double adam_beta1 = 0.9;
        double adam_beta2 = 0.999;
        double adam_epsilon = 1e-8;

        void validate() const;
        ScheduleConfig schedule() const;
    };

    nlohmann::json train_config_to_json(const TrainConfig &c);
    TrainConfig train_config_from_json(const nlohmann::json &j, const std::string &path, TrainConfig base = {});

    struct EpochLog
    {
        int epoch = 0;
        double train_task = 0.0;
        double train_distill = 0.0;
        double train_total = 0.0;
        double validation_loss = 0.0;
        double lr = 0.0;
        bool best = false;

        nlohmann::json to_json() const;
        bool operator==(const EpochLog &) const = default;
    };

    struct TrainOptions
    {
        std::function<void(const EpochLog &)> on_epoch;
        // Replaces the computed validation loss (epoch, computed) -> used; for loop tests.
        std::function<double(int, double)> validation_override;
        std::filesystem::path log_path; // one JSON record per epoch when set
    };

    struct TrainResult
    {
        model::Model model; // weights of the best validation epoch
        std::vector<EpochLog> log;
        int best_epoch = -1;
        double best_validation_loss = std::numeric_limits<double>::infinity();
    };

    FocalAlpha make_alpha(const TrainConfig &config, std::span<const data::SequenceSample> train, int num_beams);

    // Mean per-sample blended loss. Without teacher logits this is the task loss.
    double validation_loss(const model::Model &model, std::span<const data::SequenceSample> samples,
                           const std::vector<Eigen::MatrixXd> *teacher_logits, const TrainConfig &config,
                           const FocalAlpha &alpha);

    // Optimizes the task loss only.
    TrainResult train_teacher(const model::ModelSpec &spec, std::span<const data::SequenceSample> train,
                              std::span<const data::SequenceSample> validation, const TrainConfig &config,
                              const TrainOptions &options = {});

    // Blended task + distillation objective against a frozen teacher.
    TrainResult train_student_kd(const model::ModelSpec &spec, std::span<const data::SequenceSample> train,
                                 std::span<const data::SequenceSample> validation, const model::Model &teacher,
                                 const TrainConfig &config, const TrainOptions &options = {});
}

#endif
