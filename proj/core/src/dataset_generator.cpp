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

#include "beamtrack/dataset_generator.hpp"

#include "beamtrack/errors.hpp"
#include "beamtrack/random.hpp"

#include <algorithm>
#include <memory>

namespace beamtrack::data
{
    void GeneratorConfig::validate() const
    {
        trajectory.validate();
        array.validate();
        paths.validate();
        require_config(noise_power > 0.0, "scenario.noise_power", "must be > 0");
        require_config(codebook_size >= 2, "scenario.codebook_size", "must be >= 2");
        radar.validate();
        radar_scene.validate();
        scene.validate();
        require_config(motion_threshold > 0.0 && motion_threshold < 1.0, "scene.motion_threshold", "must lie in (0, 1)");
        require_config(vision_height >= 2 && vision_width >= 2, "dataset.vision_height", "vision size must be >= 2");
        require_config(window >= 1, "dataset.window", "must be >= 1");
        require_config(horizon >= 0, "dataset.horizon", "must be >= 0");
        require_config(trajectory.num_slots >= window + horizon + 1, "scenario.num_slots", "must be >= W + J + 1");
    }

    GeneratedDataset generate_dataset(const GeneratorConfig &config)
    {
        config.validate();
        GeneratedDataset out;
        out.info = {config.window, config.horizon, config.codebook_size};

        geometry::ScenarioConfig &scenario = out.scenario;
        scenario.array = config.array;
        scenario.noise_power = config.noise_power;
        scenario.paths = config.paths;
        scenario.rng_seed = mix_seed(config.seed, 1);
        scenario.trajectory = geometry::make_trajectory(config.trajectory, mix_seed(config.seed, 2));
        scenario.validate(config.window, config.horizon);
        const int num_slots = scenario.num_slots();

        out.occlusions = make_episodes(num_slots, config.occlusion_fraction, config.episode_min_length,
                                       config.episode_max_length, mix_seed(config.seed, 3));
        for (const SlotInterval &iv : make_episodes(num_slots, config.clutter_fraction, config.episode_min_length,
                                                    config.episode_max_length, mix_seed(config.seed, 4)))
        {
            const bool overlaps = std::any_of(out.occlusions.begin(), out.occlusions.end(), [&](const SlotInterval &o) {
                return iv.begin < o.end && o.begin < iv.end;
            });
            if (!overlaps)
                out.clutter.push_back(iv);
        }

        vision::SceneConfig scene = config.scene;
        scene.occlusions = out.occlusions;
        radar::RadarSceneConfig radar_scene = config.radar_scene;
        radar_scene.clutter_episodes = out.clutter;

        const geometry::BeamCodebook codebook = geometry::build_dft_codebook(config.array, config.codebook_size);
        const std::uint64_t radar_seed = mix_seed(config.seed, 5);

        std::vector<SlotArray> vision_stream, radar_stream;
        std::vector<SlotLabel> label_stream;
        vision_stream.reserve(static_cast<std::size_t>(num_slots));
        radar_stream.reserve(static_cast<std::size_t>(num_slots));
        label_stream.reserve(static_cast<std::size_t>(num_slots));

        vision::Frame previous;
        for (int slot = 0; slot < num_slots; ++slot)
        {
            const geometry::UeState &ue = scenario.trajectory[static_cast<std::size_t>(slot)];
            const int beam = geometry::best_beam(geometry::synthesize_channel(scenario, slot).h, codebook);
            label_stream.push_back({slot, beam});

            vision::Frame frame = vision::render_scene(scenario.trajectory, scene, slot);
            ArrayPtr vision_array;
            if (slot > 0)
            {
                const auto pre = vision::preprocess_vision_slot(frame, previous, config.motion_threshold,
                                                                config.vision_height, config.vision_width);
                vision_array = std::make_shared<const io::NdArray>(io::NdArray::from_planes(std::span(&pre.channels, 1)));
            }
            vision_stream.push_back({slot, vision_array});
            previous = std::move(frame);

            radar::RadarConfig radar_config = config.radar;
            radar_config.noise_std = radar::slot_noise_std(radar_scene, config.radar, slot);
            const auto scatterers = radar::scene_scatterers(ue, radar_scene, config.radar, slot, radar_seed);
            const auto cube = radar::synthesize_if_cube(scatterers, radar_config, radar_seed, slot);
            const auto maps = radar::preprocess_radar(cube, radar_config);
            const Eigen::MatrixXd planes[2] = {maps.range_angle, maps.range_doppler};
            radar_stream.push_back({slot, std::make_shared<const io::NdArray>(io::NdArray::from_planes(planes))});

            out.slots.push_back({slot, ue.azimuth, ue.range, beam, in_any(out.occlusions, slot), in_any(out.clutter, slot)});
        }

        out.samples = assemble_samples(vision_stream, radar_stream, label_stream, config.window, config.horizon);
        return out;
    }
}
