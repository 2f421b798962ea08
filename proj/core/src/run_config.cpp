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

#include "beamtrack/run_config.hpp"

#include "beamtrack/array_container.hpp"
#include "beamtrack/errors.hpp"
#include "json_reader.hpp"

#include <cstdio>
#include <fstream>

namespace beamtrack
{
    using nlohmann::json;

    namespace
    {
        json scenario_json(const data::GeneratorConfig &g)
        {
            return {{"seed", g.seed},
                    {"num_slots", g.trajectory.num_slots},
                    {"slot_period", g.trajectory.slot_period},
                    {"lateral_min", g.trajectory.lateral_min},
                    {"lateral_max", g.trajectory.lateral_max},
                    {"speed_min", g.trajectory.speed_min},
                    {"speed_max", g.trajectory.speed_max},
                    {"max_azimuth_deg", g.trajectory.max_azimuth_deg},
                    {"num_antennas", g.array.num_antennas},
                    {"element_spacing", g.array.element_spacing},
                    {"codebook_size", g.codebook_size},
                    {"noise_power", g.noise_power},
                    {"reference_snr_db", g.paths.reference_snr_db},
                    {"reference_range", g.paths.reference_range},
                    {"wavelength", g.paths.wavelength},
                    {"num_nlos", g.paths.num_nlos},
                    {"nlos_relative_db_min", g.paths.nlos_relative_db_min},
                    {"nlos_relative_db_max", g.paths.nlos_relative_db_max},
                    {"occlusion_fraction", g.occlusion_fraction},
                    {"clutter_fraction", g.clutter_fraction},
                    {"episode_min_length", g.episode_min_length},
                    {"episode_max_length", g.episode_max_length}};
        }

        void read_scenario(const json &j, data::GeneratorConfig &g)
        {
            detail::ObjectReader r(j, "scenario");
            r.get("seed", g.seed);
            r.get("num_slots", g.trajectory.num_slots);
            r.get("slot_period", g.trajectory.slot_period);
            r.get("lateral_min", g.trajectory.lateral_min);
            r.get("lateral_max", g.trajectory.lateral_max);
            r.get("speed_min", g.trajectory.speed_min);
            r.get("speed_max", g.trajectory.speed_max);
            r.get("max_azimuth_deg", g.trajectory.max_azimuth_deg);
            r.get("num_antennas", g.array.num_antennas);
            r.get("element_spacing", g.array.element_spacing);
            r.get("codebook_size", g.codebook_size);
            r.get("noise_power", g.noise_power);
            r.get("reference_snr_db", g.paths.reference_snr_db);
            r.get("reference_range", g.paths.reference_range);
            r.get("wavelength", g.paths.wavelength);
            r.get("num_nlos", g.paths.num_nlos);
            r.get("nlos_relative_db_min", g.paths.nlos_relative_db_min);
            r.get("nlos_relative_db_max", g.paths.nlos_relative_db_max);
            r.get("occlusion_fraction", g.occlusion_fraction);
            r.get("clutter_fraction", g.clutter_fraction);
            r.get("episode_min_length", g.episode_min_length);
            r.get("episode_max_length", g.episode_max_length);
            r.finish();
        }

        json radar_json(const data::GeneratorConfig &g)
        {
            const auto &c = g.radar;
            const auto &s = g.radar_scene;
            return {{"num_rx", c.num_rx},
                    {"num_fast", c.num_fast},
                    {"num_chirps", c.num_chirps},
                    {"carrier_freq", c.carrier_freq},
                    {"chirp_slope", c.chirp_slope},
                    {"sample_rate", c.sample_rate},
                    {"chirp_period", c.chirp_period},
                    {"rx_spacing", c.rx_spacing},
                    {"noise_std", c.noise_std},
                    {"angle_fft_size", c.angle_fft_size},
                    {"map_height", c.map_height},
                    {"map_width", c.map_width},
                    {"ue_amplitude", s.ue_amplitude},
                    {"reference_range", s.reference_range},
                    {"num_static_reflectors", s.num_static_reflectors},
                    {"static_amplitude", s.static_amplitude},
                    {"clutter_scatterers", s.clutter_scatterers},
                    {"clutter_amplitude", s.clutter_amplitude},
                    {"clutter_noise_factor", s.clutter_noise_factor}};
        }

        void read_radar(const json &j, data::GeneratorConfig &g)
        {
            auto &c = g.radar;
            auto &s = g.radar_scene;
            detail::ObjectReader r(j, "radar");
            r.get("num_rx", c.num_rx);
            r.get("num_fast", c.num_fast);
            r.get("num_chirps", c.num_chirps);
            r.get("carrier_freq", c.carrier_freq);
            r.get("chirp_slope", c.chirp_slope);
            r.get("sample_rate", c.sample_rate);
            r.get("chirp_period", c.chirp_period);
            r.get("rx_spacing", c.rx_spacing);
            r.get("noise_std", c.noise_std);
            r.get("angle_fft_size", c.angle_fft_size);
            r.get("map_height", c.map_height);
            r.get("map_width", c.map_width);
            r.get("ue_amplitude", s.ue_amplitude);
            r.get("reference_range", s.reference_range);
            r.get("num_static_reflectors", s.num_static_reflectors);
            r.get("static_amplitude", s.static_amplitude);
            r.get("clutter_scatterers", s.clutter_scatterers);
            r.get("clutter_amplitude", s.clutter_amplitude);
            r.get("clutter_noise_factor", s.clutter_noise_factor);
            r.finish();
        }

        json scene_json(const data::GeneratorConfig &g)
        {
            const auto &s = g.scene;
            return {{"height", s.height},
                    {"width", s.width},
                    {"background_seed", s.background_seed},
                    {"blob_radius", s.blob_radius},
                    {"pixels_per_radian", s.pixels_per_radian},
                    {"near_range", s.near_range},
                    {"far_range", s.far_range},
                    {"photometric_noise_std", s.photometric_noise_std},
                    {"blob_color", s.blob_color},
                    {"motion_threshold", g.motion_threshold},
                    {"output_height", g.vision_height},
                    {"output_width", g.vision_width}};
        }

        void read_scene(const json &j, data::GeneratorConfig &g)
        {
            auto &s = g.scene;
            detail::ObjectReader r(j, "scene");
            r.get("height", s.height);
            r.get("width", s.width);
            r.get("background_seed", s.background_seed);
            r.get("blob_radius", s.blob_radius);
            r.get("pixels_per_radian", s.pixels_per_radian);
            r.get("near_range", s.near_range);
            r.get("far_range", s.far_range);
            r.get("photometric_noise_std", s.photometric_noise_std);
            r.get("blob_color", s.blob_color);
            r.get("motion_threshold", g.motion_threshold);
            r.get("output_height", g.vision_height);
            r.get("output_width", g.vision_width);
            r.finish();
        }

        const char *split_mode_name(data::SplitMode m)
        {
            return m == data::SplitMode::random ? "random" : "temporal_blocks";
        }

        // Dataset-derived fields of a model spec.
        void inherit(model::ModelSpec &spec, const RunConfig &c)
        {
            spec.window = c.generator.window;
            spec.horizon = c.generator.horizon;
            spec.num_beams = c.generator.codebook_size;
            spec.input_height = c.generator.vision_height;
            spec.input_width = c.generator.vision_width;
        }

        void check_inherited(const model::ModelSpec &spec, const RunConfig &c, const std::string &path)
        {
            require_config(spec.window == c.generator.window, path + ".window", "must equal dataset.window");
            require_config(spec.horizon == c.generator.horizon, path + ".horizon", "must equal dataset.horizon");
            require_config(spec.num_beams == c.generator.codebook_size, path + ".num_beams",
                           "must equal scenario.codebook_size");
            require_config(spec.input_height == c.generator.vision_height && spec.input_width == c.generator.vision_width,
                           path + ".input_height", "must equal the preprocessed map size");
        }
    }

    void RunConfig::validate() const
    {
        generator.validate();
        split.validate();
        require_config(generator.vision_height == generator.radar.map_height &&
                           generator.vision_width == generator.radar.map_width,
                       "scene.output_height", "vision and radar maps must share one size (radar.map_height/map_width)");
        teacher.validate("model.teacher");
        student.validate("model.student");
        check_inherited(teacher, *this, "model.teacher");
        check_inherited(student, *this, "model.student");
        training.validate();
        require_config(evaluation.dba_top_k >= 1 && evaluation.dba_top_k <= generator.codebook_size,
                       "evaluation.dba_top_k", "must lie in 1..C");
    }

    RunConfig default_run_config()
    {
        RunConfig c;
        inherit(c.teacher, c);
        inherit(c.student, c);
        return c;
    }

    RunConfig run_config_from_json(const json &j)
    {
        RunConfig c = default_run_config();
        detail::ObjectReader root(j, "");
        if (const auto *s = root.child("scenario"))
            read_scenario(*s, c.generator);
        if (const auto *s = root.child("radar"))
            read_radar(*s, c.generator);
        if (const auto *s = root.child("scene"))
            read_scene(*s, c.generator);
        if (const auto *s = root.child("dataset"))
        {
            detail::ObjectReader r(*s, "dataset");
            r.get("window", c.generator.window);
            r.get("horizon", c.generator.horizon);
            r.get("train_fraction", c.split.train_fraction);
            r.get("split_seed", c.split.seed);
            r.get("block_length", c.split.block_length);
            std::string mode;
            if (r.get("split_mode", mode))
            {
                if (mode == "random")
                    c.split.mode = data::SplitMode::random;
                else if (mode == "temporal_blocks")
                    c.split.mode = data::SplitMode::temporal_blocks;
                else
                    throw ConfigError("expected 'random' or 'temporal_blocks'", r.field("split_mode"));
            }
            r.finish();
        }
        inherit(c.teacher, c);
        inherit(c.student, c);
        if (const auto *s = root.child("model"))
        {
            detail::ObjectReader r(*s, "model");
            if (const auto *t = r.child("teacher"))
                c.teacher = model::spec_from_json(*t, "model.teacher", c.teacher);
            if (const auto *t = r.child("student"))
                c.student = model::spec_from_json(*t, "model.student", c.student);
            r.finish();
        }
        if (const auto *s = root.child("training"))
            c.training = training::train_config_from_json(*s, "training", c.training);
        if (const auto *s = root.child("evaluation"))
        {
            detail::ObjectReader r(*s, "evaluation");
            r.get("dba_top_k", c.evaluation.dba_top_k);
            r.get("dba_delta", c.evaluation.dba_delta);
            r.finish();
        }
        root.finish();
        c.validate();
        return c;
    }

    json run_config_to_json(const RunConfig &c)
    {
        return {{"scenario", scenario_json(c.generator)},
                {"radar", radar_json(c.generator)},
                {"scene", scene_json(c.generator)},
                {"dataset",
                 {{"window", c.generator.window},
                  {"horizon", c.generator.horizon},
                  {"train_fraction", c.split.train_fraction},
                  {"split_seed", c.split.seed},
                  {"split_mode", split_mode_name(c.split.mode)},
                  {"block_length", c.split.block_length}}},
                {"model", {{"teacher", model::spec_to_json(c.teacher)}, {"student", model::spec_to_json(c.student)}}},
                {"training", training::train_config_to_json(c.training)},
                {"evaluation", {{"dba_top_k", c.evaluation.dba_top_k}, {"dba_delta", c.evaluation.dba_delta}}}};
    }

    RunConfig load_run_config(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw MissingArtifactError(path.string());
        json j;
        try
        {
            j = json::parse(in);
        }
        catch (const json::exception &e)
        {
            throw ConfigError(std::string("not valid JSON: ") + e.what(), path.string());
        }
        return run_config_from_json(j);
    }

    std::string config_digest(const RunConfig &config)
    {
        const std::string text = run_config_to_json(config).dump();
        const auto crc = io::crc32(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t *>(text.data()), text.size()));
        char buf[16];
        std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(crc));
        return buf;
    }
}
