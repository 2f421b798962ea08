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

#include "beamtrack/beam_geometry.hpp"
#include "beamtrack/radar_frontend.hpp"
#include "beamtrack/vision_frontend.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace beamtrack;

static void BM_RadarCube(benchmark::State &state)
{
    radar::RadarConfig cfg;
    const std::vector<radar::Scatterer> sc{{12.0, 3.0, 0.2}, {30.0, -1.0, -0.4}, {7.5, 0.0, 0.7}};
    for (auto _ : state)
        benchmark::DoNotOptimize(radar::synthesize_if_cube(sc, cfg, 1));
}
BENCHMARK(BM_RadarCube)->Unit(benchmark::kMicrosecond);

static void BM_RadarPreprocess(benchmark::State &state)
{
    radar::RadarConfig cfg;
    cfg.map_height = cfg.map_width = static_cast<int>(state.range(0));
    const std::vector<radar::Scatterer> sc{{12.0, 3.0, 0.2}, {30.0, -1.0, -0.4}};
    const auto cube = radar::synthesize_if_cube(sc, cfg, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(radar::preprocess_radar(cube, cfg));
}
BENCHMARK(BM_RadarPreprocess)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

static void BM_VisionSlot(benchmark::State &state)
{
    vision::SceneConfig scene;
    std::vector<geometry::UeState> traj{geometry::make_ue_state(-3.0, 10.0, 8.0, 0.0),
                                        geometry::make_ue_state(-2.2, 10.0, 8.0, 0.0)};
    const auto prev = vision::render_scene(traj, scene, 0);
    const auto cur = vision::render_scene(traj, scene, 1);
    const int size = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(vision::preprocess_vision_slot(cur, prev, vision::default_motion_threshold, size, size));
}
BENCHMARK(BM_VisionSlot)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

static void BM_OptimalBeams(benchmark::State &state)
{
    geometry::ArrayGeometry arr;
    const auto codebook = geometry::build_dft_codebook(arr, 32);
    std::vector<geometry::ChannelState> chans;
    for (int t = 0; t < 4; ++t)
        chans.push_back({geometry::steering_vector(0.1 * t, arr), t});
    for (auto _ : state)
        benchmark::DoNotOptimize(geometry::compute_optimal_beams(chans, codebook));
}
BENCHMARK(BM_OptimalBeams);
