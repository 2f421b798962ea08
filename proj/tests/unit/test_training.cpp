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
#include "beamtrack/training.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <unistd.h>

using namespace beamtrack;
using namespace beamtrack::training;
using model::ModelSpec;
using data::SequenceSample;

namespace
{
    ModelSpec tiny_spec(model::Role role = model::Role::teacher)
    {
        ModelSpec s;
        s.role = role;
        s.vision_channels = {4};
        s.radar_channels = {4};
        s.pool_grid = 2;
        s.d0 = s.d1 = 8;
        s.d = 16;
        s.gru_layers = 1;
        s.gru_hidden = 16;
        s.mha_heads = 2;
        s.classifier_hidden = 16;
        s.window = 3;
        s.horizon = 1;
        s.num_beams = 4;
        s.input_height = s.input_width = 8;
        if (role == model::Role::student)
            s.conv_kind = model::ConvKind::depthwise_separable;
        return s;
    }

    // The label is the quadrant holding a bright square in the last vision frame.
    std::vector<SequenceSample> quadrant_samples(int count, std::uint64_t seed)
    {
        Rng rng(seed);
        std::vector<SequenceSample> out;
        for (int i = 0; i < count; ++i)
        {
            const int q = static_cast<int>(uniform_index(rng, 4));
            SequenceSample s;
            s.anchor_slot = i;
            for (int t = 0; t < 3; ++t)
            {
                std::vector<float> v(64, 0.0f), r(128, 0.0f);
                for (float &x : v)
                    x = static_cast<float>(0.1 * uniform01(rng));
                for (float &x : r)
                    x = static_cast<float>(0.1 * uniform01(rng));
                const int oy = (q / 2) * 4, ox = (q % 2) * 4;
                for (int y = 0; y < 4; ++y)
                    for (int x = 0; x < 4; ++x)
                    {
                        v[static_cast<std::size_t>((oy + y) * 8 + ox + x)] = 1.0f;
                        r[static_cast<std::size_t>(64 + (oy + y) * 8 + ox + x)] = 1.0f;
                    }
                s.vision.push_back(std::make_shared<const io::NdArray>(io::NdArray({1, 8, 8}, std::move(v))));
                s.radar.push_back(std::make_shared<const io::NdArray>(io::NdArray({2, 8, 8}, std::move(r))));
            }
            s.labels = {{q + 1, q + 1}, i};
            out.push_back(std::move(s));
        }
        return out;
    }

    TrainConfig fast_config()
    {
        TrainConfig c;
        c.lr_init = 1e-2;
        c.max_epochs = 4;
        c.batch_size = 8;
        c.cycle_length = 10;
        c.seed = 3;
        return c;
    }

    struct Data
    {
        std::vector<SequenceSample> train = quadrant_samples(48, 1);
        std::vector<SequenceSample> val = quadrant_samples(16, 2);
    };
}

TEST(TrainConfigCheck, FieldsAndJson)
{
    TrainConfig c;
    c.validate();
    EXPECT_DOUBLE_EQ(c.schedule().lr_min, 1e-6);
    c.beta = 1.5;
    try
    {
        c.validate();
        FAIL();
    }
    catch (const ConfigError &e)
    {
        EXPECT_EQ(e.field(), "training.beta");
    }
    c = fast_config();
    EXPECT_EQ(train_config_to_json(train_config_from_json(train_config_to_json(c), "training")), train_config_to_json(c));
    nlohmann::json j = train_config_to_json(c);
    j["momentum"] = 0.9;
    EXPECT_THROW(train_config_from_json(j, "training"), ConfigError);
}

TEST(TrainTeacher, SingleEpochRecordsValidationLoss)
{
    Data d;
    TrainConfig c = fast_config();
    c.max_epochs = 1;
    const TrainResult r = train_teacher(tiny_spec(), d.train, d.val, c);
    ASSERT_EQ(r.log.size(), 1u);
    EXPECT_EQ(r.best_epoch, 0);
    EXPECT_TRUE(r.log[0].best);
    EXPECT_EQ(r.best_validation_loss, r.log[0].validation_loss);
    EXPECT_DOUBLE_EQ(r.log[0].lr, 1e-2);
    const FocalAlpha alpha = make_alpha(c, d.train, 4);
    EXPECT_NEAR(validation_loss(r.model, d.val, nullptr, c, alpha), r.best_validation_loss, 1e-9);
}

TEST(TrainTeacher, DeterministicUnderSeed)
{
    Data d;
    const TrainResult a = train_teacher(tiny_spec(), d.train, d.val, fast_config());
    const TrainResult b = train_teacher(tiny_spec(), d.train, d.val, fast_config());
    EXPECT_EQ(a.log, b.log);
    EXPECT_EQ(a.model.state(), b.model.state());
    TrainConfig other = fast_config();
    other.seed = 4;
    EXPECT_NE(train_teacher(tiny_spec(), d.train, d.val, other).log, a.log);
}

TEST(TrainTeacher, LearnsAndKeepsBestCheckpoint)
{
    Data d;
    TrainConfig c = fast_config();
    c.max_epochs = 12;
    const TrainResult r = train_teacher(tiny_spec(), d.train, d.val, c);
    ASSERT_EQ(r.log.size(), 12u);
    EXPECT_LT(r.best_validation_loss, 0.5 * r.log.front().validation_loss);
    double best = std::numeric_limits<double>::infinity();
    for (const auto &e : r.log)
    {
        EXPECT_EQ(e.best, e.validation_loss < best);
        best = std::min(best, e.validation_loss);
        EXPECT_LE(r.best_validation_loss, e.validation_loss);
        EXPECT_NEAR(e.train_total, e.train_task, 1e-12);
    }
    EXPECT_EQ(r.best_validation_loss, best);
    EXPECT_NEAR(validation_loss(r.model, d.val, nullptr, c, make_alpha(c, d.train, 4)), best, 1e-9);
}

TEST(TrainTeacher, PatienceStopsAfterOneStaleEpoch)
{
    Data d;
    TrainConfig c = fast_config();
    c.patience = 1;
    c.max_epochs = 10;
    TrainOptions opt;
    opt.validation_override = [](int epoch, double) { return epoch == 0 ? 1.0 : 2.0; };
    const TrainResult r = train_teacher(tiny_spec(), d.train, d.val, c, opt);
    ASSERT_EQ(r.log.size(), 2u);
    EXPECT_TRUE(r.log[0].best);
    EXPECT_FALSE(r.log[1].best);
    EXPECT_EQ(r.best_epoch, 0);

    c.patience = 3;
    opt.validation_override = [](int epoch, double) { return epoch == 2 ? 0.5 : 1.0; };
    EXPECT_EQ(train_teacher(tiny_spec(), d.train, d.val, c, opt).log.size(), 6u);
}

TEST(TrainTeacher, WritesJsonlLog)
{
    Data d;
    const auto path = std::filesystem::temp_directory_path() / ("beamtrack_log_" + std::to_string(::getpid()) + ".jsonl");
    TrainOptions opt;
    opt.log_path = path;
    int callbacks = 0;
    opt.on_epoch = [&](const EpochLog &) { ++callbacks; };
    const TrainResult r = train_teacher(tiny_spec(), d.train, d.val, fast_config(), opt);
    std::ifstream is(path);
    std::string line;
    int lines = 0;
    while (std::getline(is, line))
    {
        const auto j = nlohmann::json::parse(line);
        EXPECT_EQ(j.at("epoch").get<int>(), lines);
        EXPECT_EQ(j.at("best").get<bool>(), r.log[static_cast<std::size_t>(lines)].best);
        ++lines;
    }
    EXPECT_EQ(lines, static_cast<int>(r.log.size()));
    EXPECT_EQ(callbacks, lines);
    std::filesystem::remove(path);
}

TEST(TrainTeacher, DivergenceAborts)
{
    Data d;
    TrainConfig c = fast_config();
    c.lr_init = 1e30;
    c.clip_norm = 0.0;
    EXPECT_THROW(train_teacher(tiny_spec(), d.train, d.val, c), TrainingAbort);
}

TEST(TrainStudent, BetaZeroMatchesTeacherPath)
{
    Data d;
    const TrainResult teacher = train_teacher(tiny_spec(), d.train, d.val, fast_config());
    TrainConfig c = fast_config();
    c.beta = 0.0;
    const ModelSpec student = tiny_spec(model::Role::student);
    const TrainResult kd = train_student_kd(student, d.train, d.val, teacher.model, c);
    const TrainResult plain = train_teacher(student, d.train, d.val, c);
    ASSERT_EQ(kd.log.size(), plain.log.size());
    for (std::size_t i = 0; i < kd.log.size(); ++i)
    {
        // The KD run still reports the (zero-weighted) distillation term.
        EpochLog masked = kd.log[i];
        EXPECT_GT(masked.train_distill, 0.0);
        masked.train_distill = 0.0;
        EXPECT_EQ(masked, plain.log[i]);
    }
    EXPECT_EQ(kd.model.state(), plain.model.state());
}

TEST(TrainStudent, TeacherStaysFrozenAndLossIdentityHolds)
{
    Data d;
    const TrainResult teacher = train_teacher(tiny_spec(), d.train, d.val, fast_config());
    const auto before = teacher.model.state();
    TrainConfig c = fast_config();
    c.beta = 0.3;
    const TrainResult kd = train_student_kd(tiny_spec(model::Role::student), d.train, d.val, teacher.model, c);
    EXPECT_EQ(teacher.model.state(), before);
    for (const auto &e : kd.log)
    {
        EXPECT_GT(e.train_distill, 0.0);
        EXPECT_NEAR(e.train_total, 0.7 * e.train_task + 0.3 * e.train_distill, 1e-9);
    }
    const TrainResult again = train_student_kd(tiny_spec(model::Role::student), d.train, d.val, teacher.model, c);
    EXPECT_EQ(kd.log, again.log);
}

TEST(TrainStudent, MismatchedTeacherRejected)
{
    Data d;
    ModelSpec other = tiny_spec();
    other.num_beams = 5;
    const model::Model teacher(other, 0);
    EXPECT_THROW(train_student_kd(tiny_spec(model::Role::student), d.train, d.val, teacher, fast_config()), ConfigError);
    ModelSpec longer = tiny_spec();
    longer.horizon = 2;
    const model::Model teacher2(longer, 0);
    EXPECT_THROW(train_student_kd(tiny_spec(model::Role::student), d.train, d.val, teacher2, fast_config()), ConfigError);
}

TEST(TrainTeacher, EmptySetsRejected)
{
    Data d;
    EXPECT_THROW(train_teacher(tiny_spec(), {}, d.val, fast_config()), Error);
    EXPECT_THROW(train_teacher(tiny_spec(), d.train, {}, fast_config()), Error);
}
