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
#include "beamtrack/models.hpp"
#include "beamtrack/random.hpp"

#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

using namespace beamtrack;

namespace
{
    model::ModelSpec spec_for(bool teacher, int size)
    {
        model::ModelSpec s = teacher ? model::default_teacher_spec() : model::default_student_spec();
        s.input_height = s.input_width = size;
        return s;
    }

    std::vector<data::SequenceSample> random_samples(const model::ModelSpec &s, int count)
    {
        Rng rng(3);
        auto plane = [&](int channels) {
            std::vector<float> v(static_cast<std::size_t>(channels * s.input_height * s.input_width));
            for (float &x : v)
                x = static_cast<float>(uniform01(rng));
            return std::make_shared<const io::NdArray>(
                io::NdArray({static_cast<std::uint64_t>(channels), static_cast<std::uint64_t>(s.input_height),
                             static_cast<std::uint64_t>(s.input_width)},
                            std::move(v)));
        };
        std::vector<data::SequenceSample> out(static_cast<std::size_t>(count));
        for (auto &smp : out)
        {
            for (int t = 0; t < s.window; ++t)
            {
                smp.vision.push_back(plane(1));
                smp.radar.push_back(plane(2));
            }
            smp.labels.b_star.assign(static_cast<std::size_t>(s.horizon + 1), 1);
        }
        return out;
    }
}

// range(0): 1 = teacher, 0 = student; range(1): input size. Batch of 8 samples.
static void BM_Forward(benchmark::State &state)
{
    const auto spec = spec_for(state.range(0) != 0, static_cast<int>(state.range(1)));
    const model::Model m(spec, 1);
    const auto samples = random_samples(spec, 8);
    const auto batch = model::make_batch(samples, spec);
    for (auto _ : state)
        benchmark::DoNotOptimize(m.forward(batch));
    state.SetItemsProcessed(state.iterations() * 8);
}
BENCHMARK(BM_Forward)->Args({1, 32})->Args({0, 32})->Args({1, 64})->Args({0, 64})->Unit(benchmark::kMillisecond);

static void BM_ForwardBackward(benchmark::State &state)
{
    const auto spec = spec_for(state.range(0) != 0, static_cast<int>(state.range(1)));
    model::Model m(spec, 1);
    const auto samples = random_samples(spec, 8);
    const auto batch = model::make_batch(samples, spec);
    model::Model::Cache cache;
    for (auto _ : state)
    {
        const nn::Mat logits = m.forward(batch, &cache);
        m.zero_grad();
        m.backward(cache, nn::Mat::Constant(logits.rows(), logits.cols(), 1e-3f));
    }
    state.SetItemsProcessed(state.iterations() * 8);
}
BENCHMARK(BM_ForwardBackward)->Args({1, 32})->Args({0, 32})->Unit(benchmark::kMillisecond);

static void BM_FocalGrad(benchmark::State &state)
{
    Rng rng(5);
    Eigen::MatrixXd z(4, 32);
    for (Eigen::Index i = 0; i < z.size(); ++i)
        z(i) = standard_normal(rng);
    const geometry::BeamLabels labels{{3, 4, 5, 6}, 0};
    const training::FocalAlpha alpha;
    for (auto _ : state)
        benchmark::DoNotOptimize(training::task_loss_grad(z, labels, alpha, 2.0));
}
BENCHMARK(BM_FocalGrad);
