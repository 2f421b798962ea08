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

#include "beamtrack/losses.hpp"

#include "beamtrack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace beamtrack::training
{
    namespace
    {
        void check_label(int label, Eigen::Index num_beams)
        {
            if (label < 1 || label > num_beams)
                throw IndexError("label " + std::to_string(label) + " outside 1.." + std::to_string(num_beams));
        }
    }

    double FocalAlpha::at(int beam) const
    {
        if (per_class.empty())
            return scalar;
        if (beam < 1 || beam > static_cast<int>(per_class.size()))
            throw IndexError("no focal weight for beam " + std::to_string(beam));
        return per_class[static_cast<std::size_t>(beam - 1)];
    }

    double focal_loss(const Eigen::RowVectorXd &probs, int label, double alpha, double gamma)
    {
        check_label(label, probs.size());
        const double p = std::max(probs(label - 1), probability_floor);
        return -alpha * std::pow(1.0 - p, gamma) * std::log(p);
    }

    Eigen::RowVectorXd focal_loss_grad(const Eigen::RowVectorXd &logits, int label, double alpha, double gamma)
    {
        check_label(label, logits.size());
        const Eigen::RowVectorXd p = model::tempered_softmax(logits, 1.0);
        const double py = p(label - 1);
        const double pc = std::max(py, probability_floor);
        const double q = 1.0 - pc;
        // dL/dp_y
        double dldp = -alpha * std::pow(q, gamma) / pc;
        if (gamma != 0.0 && q > 0.0)
            dldp += alpha * gamma * std::pow(q, gamma - 1.0) * std::log(pc);
        // dp_y/dz_c = p_y (delta_yc - p_c)
        Eigen::RowVectorXd g = -py * p;
        g(label - 1) += py;
        return dldp * g;
    }

    double task_loss(const model::BeamProbSeries &series, const geometry::BeamLabels &labels, const FocalAlpha &alpha,
                     double gamma)
    {
        if (series.probs.rows() != static_cast<Eigen::Index>(labels.b_star.size()))
            throw ShapeError("series has " + std::to_string(series.probs.rows()) + " slots, labels have " +
                             std::to_string(labels.b_star.size()));
        double sum = 0.0;
        for (Eigen::Index j = 0; j < series.probs.rows(); ++j)
        {
            const int b = labels.b_star[static_cast<std::size_t>(j)];
            check_label(b, series.probs.cols());
            sum += focal_loss(series.probs.row(j), b, alpha.at(b), gamma);
        }
        return sum;
    }

    Eigen::MatrixXd task_loss_grad(const Eigen::MatrixXd &logits, const geometry::BeamLabels &labels,
                                   const FocalAlpha &alpha, double gamma)
    {
        if (logits.rows() != static_cast<Eigen::Index>(labels.b_star.size()))
            throw ShapeError("logit rows do not match label count");
        Eigen::MatrixXd g(logits.rows(), logits.cols());
        for (Eigen::Index j = 0; j < logits.rows(); ++j)
        {
            const int b = labels.b_star[static_cast<std::size_t>(j)];
            check_label(b, logits.cols());
            g.row(j) = focal_loss_grad(logits.row(j), b, alpha.at(b), gamma);
        }
        return g;
    }

    double kl_divergence(const Eigen::RowVectorXd &p_teacher, const Eigen::RowVectorXd &p_student)
    {
        if (p_teacher.size() != p_student.size())
            throw ShapeError("probability rows differ in length");
        double kl = 0.0;
        for (Eigen::Index c = 0; c < p_teacher.size(); ++c)
        {
            const double pt = p_teacher(c);
            if (pt <= 0.0)
                continue;
            kl += pt * std::log(pt / std::max(p_student(c), probability_floor));
        }
        return std::max(kl, 0.0);
    }

    double distill_loss(const Eigen::MatrixXd &teacher_logits, const Eigen::MatrixXd &student_logits, double temperature)
    {
        if (teacher_logits.rows() != student_logits.rows() || teacher_logits.cols() != student_logits.cols())
            throw ShapeError("teacher and student logits differ in shape");
        double sum = 0.0;
        for (Eigen::Index j = 0; j < teacher_logits.rows(); ++j)
            sum += kl_divergence(model::tempered_softmax(teacher_logits.row(j), temperature),
                                 model::tempered_softmax(student_logits.row(j), temperature));
        return temperature * temperature * sum;
    }

    Eigen::MatrixXd distill_loss_grad(const Eigen::MatrixXd &teacher_logits, const Eigen::MatrixXd &student_logits,
                                      double temperature)
    {
        if (teacher_logits.rows() != student_logits.rows() || teacher_logits.cols() != student_logits.cols())
            throw ShapeError("teacher and student logits differ in shape");
        return temperature * (model::tempered_softmax_rows(student_logits, temperature) -
                              model::tempered_softmax_rows(teacher_logits, temperature));
    }

    LossBreakdown overall_loss(double task, double distill, double beta)
    {
        if (!(beta >= 0.0 && beta <= 1.0))
            throw DomainError("beta must lie in [0, 1]");
        return {task, distill, (1.0 - beta) * task + beta * distill};
    }

    double lr_schedule(int epoch, const ScheduleConfig &c)
    {
        if (epoch < 0)
            throw DomainError("negative epoch");
        if (c.cycle_length < 1)
            throw ConfigError("must be >= 1", "training.cycle_length");
        const double phase = static_cast<double>(epoch % c.cycle_length) / c.cycle_length;
        return c.lr_min + (c.lr_init - c.lr_min) * (1.0 + std::cos(std::numbers::pi * phase)) / 2.0;
    }
}
