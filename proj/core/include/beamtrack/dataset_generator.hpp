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

#ifndef BEAMTRACK_DATASET_GENERATOR_HPP
#define BEAMTRACK_DATASET_GENERATOR_HPP

#include "beamtrack/beam_geometry.hpp"
#include "beamtrack/dataset_store.hpp"
#include "beamtrack/radar_frontend.hpp"
#include "beamtrack/vision_frontend.hpp"

#include <cstdint>
#include <vector>

namespace beamtrack::data
{
    // Everything needed to synthesize a drive-by scenario and its sensor streams.
    struct GeneratorConfig
    {
        geometry::TrajectoryParams trajectory;
        geometry::ArrayGeometry array;
        geometry::PathModel paths;
        double noise_power = 1.0;
        int codebook_size = 32;

        radar::RadarConfig radar;
        radar::RadarSceneConfig radar_scene; // clutter episodes are drawn by the generator
        vision::SceneConfig scene;           // occlusions are drawn by the generator

        // Vision-degraded (occlusion) and radar-degraded (clutter) episodes; they never overlap.
        double occlusion_fraction = 0.12;
        double clutter_fraction = 0.12;
        int episode_min_length = 10;
        int episode_max_length = 30;

        double motion_threshold = vision::default_motion_threshold;
        int vision_height = 64;
        int vision_width = 64;

        int window = 8;
        int horizon = 3;
        std::uint64_t seed = 1;

        void validate() const;
    };

    struct GeneratedDataset
    {
        DatasetInfo info;
        std::vector<SequenceSample> samples;
        std::vector<SlotMetadata> slots;
        geometry::ScenarioConfig scenario;
        std::vector<SlotInterval> occlusions;
        std::vector<SlotInterval> clutter;
    };

    GeneratedDataset generate_dataset(const GeneratorConfig &config);
}

#endif
