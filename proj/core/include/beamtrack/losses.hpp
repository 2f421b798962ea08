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

#ifndef BEAMTRACK_LOSSES_HPP
#define BEAMTRACK_LOSSES_HPP

#include "beamtrack/beam_geometry.hpp"
#include "beamtrack/models.hpp"

#include <Eigen/Core>

#include <vector>

namespace beamtrack::training
{
    // Focal weight alpha: a scalar, or one weight per beam when `per_class` is non-empty.
    struct FocalAlpha
    {
        double scalar = 1.0;
        std::vector<double> per_class; // index b - 1

        double at(int beam) const;
    };

    inline constexpr double probability_floor = 1e-12;

    // -alpha (1 - p_b)^gamma ln p_b with p_b clamped to >= 1e-12. `label` is 1-based.
    double focal_loss(const Eigen::RowVectorXd &probs, int label, double alpha, double gamma);
    // Gradient of focal_loss(softmax(logits)) with respect to the logits.
    Eigen::RowVectorXd focal_loss_grad(const Eigen::RowVectorXd &logits, int label, double alpha, double gamma);

    // Sum of per-slot focal losses.
    double task_loss(const model::BeamProbSeries &series, const geometry::BeamLabels &labels, const FocalAlpha &alpha,
                     double gamma);
    Eigen::MatrixXd task_loss_grad(const Eigen::MatrixXd &logits, const geometry::BeamLabels &labels,
                                   const FocalAlpha &alpha, double gamma);

    // sum_c pT_c ln(pT_c / pS_c); zero-probability teacher terms contribute 0.
    double kl_divergence(const Eigen::RowVectorXd &p_teacher, const Eigen::RowVectorXd &p_student);

    // temperature^2 * sum over slots of KL(softmax(zT / T) || softmax(zS / T)).
    double distill_loss(const Eigen::MatrixXd &teacher_logits, const Eigen::MatrixXd &student_logits, double temperature);
    // Gradient with respect to the student logits: T * (pS - pT) per slot.
    Eigen::MatrixXd distill_loss_grad(const Eigen::MatrixXd &teacher_logits, const Eigen::MatrixXd &student_logits,
                                      double temperature);

    struct LossBreakdown
    {
        double task = 0.0;
        double distill = 0.0;
        double total = 0.0;
    };

    // total = (1 - beta) task + beta distill.
    LossBreakdown overall_loss(double task, double distill, double beta);

    struct ScheduleConfig
    {
        double lr_init = 1e-4;
        double lr_min = 1e-6;
        int cycle_length = 25;
    };

    // Cosine annealing with warm restarts every cycle_length epochs.
    double lr_schedule(int epoch, const ScheduleConfig &config);
}

#endif
