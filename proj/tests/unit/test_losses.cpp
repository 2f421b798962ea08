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

#include "beamtrack/errors.hpp"
#include "beamtrack/losses.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace beamtrack;
using namespace beamtrack::training;

namespace
{
    Eigen::RowVectorXd row(std::initializer_list<double> v)
    {
        Eigen::RowVectorXd r(static_cast<Eigen::Index>(v.size()));
        Eigen::Index i = 0;
        for (double x : v)
            r(i++) = x;
        return r;
    }

    Eigen::MatrixXd random_logits(Rng &rng, int rows, int cols, double scale)
    {
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index i = 0; i < m.size(); ++i)
            m.data()[i] = uniform(rng, -scale, scale);
        return m;
    }

    Eigen::VectorXd flat(const Eigen::MatrixXd &m) { return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size()); }

    Eigen::MatrixXd unflat(const Eigen::VectorXd &v, Eigen::Index rows, Eigen::Index cols)
    {
        return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols);
    }
}

TEST(FocalLoss, WorkedExamples)
{
    EXPECT_NEAR(focal_loss(row({0.5, 0.5}), 1, 1.0, 2.0), 0.25 * std::log(2.0), 1e-12);
    EXPECT_NEAR(focal_loss(row({0.5, 0.5}), 1, 1.0, 2.0), 0.173287, 1e-6);
    EXPECT_EQ(focal_loss(row({0.0, 1.0, 0.0}), 2, 1.0, 2.0), 0.0);
    EXPECT_NEAR(focal_loss(row({0.2, 0.3, 0.5}), 2, 1.0, 0.0), -std::log(0.3), 1e-12);
    EXPECT_NEAR(focal_loss(row({0.2, 0.3, 0.5}), 3, 0.25, 1.5), oracle::focal(Eigen::Vector3d(0.2, 0.3, 0.5), 3, 0.25, 1.5), 1e-12);
    EXPECT_NEAR(focal_loss(row({1.0, 0.0}), 2, 1.0, 2.0), -std::log(1e-12), 1e-6);
    EXPECT_THROW(focal_loss(row({0.5, 0.5}), 0, 1.0, 2.0), IndexError);
    EXPECT_THROW(focal_loss(row({0.5, 0.5}), 3, 1.0, 2.0), IndexError);
}

TEST(FocalLoss, GradientMatchesFiniteDifferences)
{
    Rng rng(1);
    for (int trial = 0; trial < 30; ++trial)
    {
        const int c = 2 + static_cast<int>(uniform_index(rng, 7));
        const Eigen::VectorXd z = random_logits(rng, c, 1, 3.0).col(0);
        const int label = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(c)));
        const double alpha = uniform(rng, 0.2, 2.0), gamma = trial % 3 == 0 ? 0.0 : uniform(rng, 0.5, 3.0);
        const Eigen::VectorXd numeric = oracle::numeric_gradient(
            [&](const Eigen::VectorXd &x) { return oracle::focal(oracle::softmax(x), label, alpha, gamma); }, z);
        const Eigen::VectorXd analytic = focal_loss_grad(z.transpose(), label, alpha, gamma).transpose();
        EXPECT_LT(oracle::relative_error(analytic, numeric), 1e-4) << "trial " << trial;
    }
}

TEST(TaskLoss, SumOfSlotFocalLosses)
{
    Rng rng(2);
    const Eigen::MatrixXd logits = random_logits(rng, 4, 6, 2.0);
    const model::BeamProbSeries series = model::make_series(logits);
    geometry::BeamLabels labels{{3, 1, 6, 2}, 0};
    FocalAlpha alpha;
    alpha.per_class = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
    double expected = 0.0;
    for (int j = 0; j < 4; ++j)
    {
        const int b = labels.b_star[static_cast<std::size_t>(j)];
        expected += oracle::focal(oracle::softmax(logits.row(j).transpose()), b, 0.5 * b, 2.0);
    }
    EXPECT_NEAR(task_loss(series, labels, alpha, 2.0), expected, 1e-12);

    const Eigen::VectorXd numeric = oracle::numeric_gradient(
        [&](const Eigen::VectorXd &x) { return task_loss(model::make_series(unflat(x, 4, 6)), labels, alpha, 2.0); },
        flat(logits));
    EXPECT_LT(oracle::relative_error(flat(task_loss_grad(logits, labels, alpha, 2.0)), numeric), 1e-4);

    geometry::BeamLabels single{{4}, 0};
    EXPECT_NEAR(task_loss(model::make_series(logits.topRows(1)), single, FocalAlpha{}, 2.0),
                focal_loss(model::make_series(logits.topRows(1)).probs.row(0), 4, 1.0, 2.0), 1e-15);
    geometry::BeamLabels short_labels{{1, 2}, 0};
    EXPECT_THROW(task_loss(series, short_labels, FocalAlpha{}, 2.0), ShapeError);
}

TEST(KlDivergence, Examples)
{
    EXPECT_NEAR(kl_divergence(row({1.0, 0.0}), row({0.5, 0.5})), std::log(2.0), 1e-12);
    EXPECT_NEAR(kl_divergence(row({1.0, 0.0}), row({0.5, 0.5})), 0.693147, 1e-6);
    EXPECT_EQ(kl_divergence(row({0.3, 0.7}), row({0.3, 0.7})), 0.0);
    Rng rng(3);
    for (int i = 0; i < 100; ++i)
    {
        const Eigen::VectorXd a = oracle::softmax(random_logits(rng, 5, 1, 4.0).col(0));
        const Eigen::VectorXd b = oracle::softmax(random_logits(rng, 5, 1, 4.0).col(0));
        const double kl = kl_divergence(a.transpose(), b.transpose());
        EXPECT_GE(kl, 0.0);
        EXPECT_NEAR(kl, oracle::kl(a, b), 1e-12);
    }
}

TEST(DistillLoss, ReductionsAndValue)
{
    Rng rng(4);
    const Eigen::MatrixXd t = random_logits(rng, 4, 8, 3.0), s = random_logits(rng, 4, 8, 3.0);
    for (double temp : {0.5, 1.0, 2.0, 4.0})
        EXPECT_NEAR(distill_loss(t, t, temp), 0.0, 1e-12);
    double expected1 = 0.0, expected2 = 0.0;
    for (int j = 0; j < 4; ++j)
    {
        expected1 += oracle::kl(oracle::softmax(t.row(j).transpose()), oracle::softmax(s.row(j).transpose()));
        expected2 += oracle::kl(oracle::softmax(t.row(j).transpose(), 2.0), oracle::softmax(s.row(j).transpose(), 2.0));
    }
    EXPECT_NEAR(distill_loss(t, s, 1.0), expected1, 1e-12);
    EXPECT_NEAR(distill_loss(t, s, 2.0), 4.0 * expected2, 1e-12);
    EXPECT_THROW(distill_loss(t, s.topRows(3), 2.0), ShapeError);
    EXPECT_THROW(distill_loss(t, s, 0.0), DomainError);
}

TEST(DistillLoss, GradientMatchesFiniteDifferences)
{
    Rng rng(5);
    for (double temp : {0.7, 1.0, 2.0, 4.0})
    {
        const Eigen::MatrixXd t = random_logits(rng, 3, 6, 2.0), s = random_logits(rng, 3, 6, 2.0);
        const Eigen::VectorXd numeric = oracle::numeric_gradient(
            [&](const Eigen::VectorXd &x) { return distill_loss(t, unflat(x, 3, 6), temp); }, flat(s));
        EXPECT_LT(oracle::relative_error(flat(distill_loss_grad(t, s, temp)), numeric), 1e-4) << temp;
    }
}

TEST(DistillLoss, TemperatureSquaredCompensation)
{
    Rng rng(6);
    const Eigen::MatrixXd t = random_logits(rng, 4, 8, 0.01), s = random_logits(rng, 4, 8, 0.01);
    std::vector<Eigen::VectorXd> grads;
    for (double temp : {1.0, 2.0, 4.0})
        grads.push_back(oracle::numeric_gradient(
            [&](const Eigen::VectorXd &x) { return distill_loss(t, unflat(x, 4, 8), temp); }, flat(s), 1e-6));
    for (std::size_t a = 0; a < grads.size(); ++a)
        for (std::size_t b = a + 1; b < grads.size(); ++b)
            EXPECT_LT(oracle::relative_error(grads[a], grads[b]), 0.05);
}

TEST(OverallLoss, Blend)
{
    const LossBreakdown a = overall_loss(2.0, 4.0, 0.5);
    EXPECT_DOUBLE_EQ(a.total, 3.0);
    EXPECT_EQ(a.task, 2.0);
    EXPECT_EQ(a.distill, 4.0);
    EXPECT_EQ(overall_loss(2.0, 4.0, 0.0).total, 2.0);
    EXPECT_EQ(overall_loss(2.0, 4.0, 1.0).total, 4.0);
    Rng rng(7);
    for (int i = 0; i < 50; ++i)
    {
        const double t = uniform(rng, 0, 10), d = uniform(rng, 0, 10), b = uniform01(rng);
        EXPECT_NEAR(overall_loss(t, d, b).total, (1 - b) * t + b * d, 1e-9);
    }
    EXPECT_THROW(overall_loss(1.0, 1.0, 1.5), DomainError);
    EXPECT_THROW(overall_loss(1.0, 1.0, -0.1), DomainError);
}

TEST(LrSchedule, CosineWithRestarts)
{
    const ScheduleConfig c{1e-4, 1e-6, 25};
    EXPECT_DOUBLE_EQ(lr_schedule(0, c), 1e-4);
    const ScheduleConfig even{1e-4, 1e-6, 24};
    EXPECT_NEAR(lr_schedule(12, even), (1e-4 + 1e-6) / 2, 1e-18);
    EXPECT_DOUBLE_EQ(lr_schedule(25, c), 1e-4);
    EXPECT_DOUBLE_EQ(lr_schedule(50, c), 1e-4);
    for (int e = 0; e < 80; ++e)
    {
        const double expected = 1e-6 + (1e-4 - 1e-6) * (1 + std::cos(std::numbers::pi * (e % 25) / 25.0)) / 2;
        EXPECT_NEAR(lr_schedule(e, c), expected, 1e-18);
        if (e % 25 != 0)
            EXPECT_LT(lr_schedule(e, c), lr_schedule(e - 1, c));
    }
}

TEST(FocalAlphaWeights, ScalarAndPerClass)
{
    FocalAlpha a;
    a.scalar = 0.7;
    EXPECT_EQ(a.at(5), 0.7);
    a.per_class = {1.0, 2.0};
    EXPECT_EQ(a.at(2), 2.0);
    EXPECT_THROW(a.at(3), IndexError);
}
