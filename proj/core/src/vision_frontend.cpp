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

#include "beamtrack/vision_frontend.hpp"

#include "beamtrack/errors.hpp"
#include "beamtrack/image_ops.hpp"
#include "beamtrack/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace beamtrack::vision
{
    namespace
    {
        constexpr double auto_span_rad = std::numbers::pi / 3.0;

        const geometry::UeState &ue_at(std::span<const geometry::UeState> trajectory, int slot)
        {
            if (slot < 0 || slot >= static_cast<int>(trajectory.size()))
                throw IndexError("slot " + std::to_string(slot) + " outside trajectory of length " +
                                 std::to_string(trajectory.size()));
            return trajectory[static_cast<std::size_t>(slot)];
        }

        void check_same_shape(const Frame &a, const Frame &b)
        {
            for (int ch = 0; ch < 3; ++ch)
                if (a.rgb[ch].rows() != b.rgb[ch].rows() || a.rgb[ch].cols() != b.rgb[ch].cols())
                    throw ShapeError("frame shapes differ");
        }
    }

    void SceneConfig::validate() const
    {
        require_config(height > 0, "scene.height", "must be > 0");
        require_config(width > 0, "scene.width", "must be > 0");
        require_config(blob_radius > 0.0 && blob_radius < std::min(height, width) / 2.0, "scene.blob_radius",
                       "must lie in (0, min(height, width) / 2)");
        require_config(near_range > 0.0 && near_range < far_range, "scene.near_range", "need 0 < near < far");
        require_config(photometric_noise_std >= 0.0, "scene.photometric_noise_std", "must be >= 0");
        for (double c : blob_color)
            require_config(c >= 0.0 && c <= 1.0, "scene.blob_color", "components must lie in [0, 1]");
    }

    double SceneConfig::calibration() const noexcept
    {
        if (pixels_per_radian > 0.0)
            return pixels_per_radian;
        return (0.5 * (width - 1) - blob_radius - 1.0) / auto_span_rad;
    }

    Eigen::MatrixXd Frame::gray() const { return (rgb[0] + rgb[1] + rgb[2]) / 3.0; }

    double blob_center_x(double azimuth, const SceneConfig &scene) noexcept
    {
        return 0.5 * (scene.width - 1) + scene.calibration() * azimuth;
    }

    double blob_center_y(double range, const SceneConfig &scene) noexcept
    {
        const double t = std::clamp((scene.far_range - range) / (scene.far_range - scene.near_range), 0.0, 1.0);
        return (scene.height - 1) * (0.3 + 0.45 * t);
    }

    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> blob_support(std::span<const geometry::UeState> trajectory,
                                                                      const SceneConfig &scene, int slot)
    {
        const geometry::UeState &ue = ue_at(trajectory, slot);
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> support =
            Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(scene.height, scene.width, false);
        if (in_any(scene.occlusions, slot))
            return support;
        const double cx = blob_center_x(ue.azimuth, scene);
        const double cy = blob_center_y(ue.range, scene);
        const double r2 = scene.blob_radius * scene.blob_radius;
        for (int y = 0; y < scene.height; ++y)
            for (int x = 0; x < scene.width; ++x)
                support(y, x) = (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r2;
        return support;
    }

    Frame render_background(const SceneConfig &scene, int slot)
    {
        scene.validate();
        Frame frame;
        frame.slot_index = slot;

        // Smooth static texture: a few random low-frequency plane waves per channel.
        Rng rng(mix_seed(scene.background_seed, 0xB6ULL));
        for (int ch = 0; ch < 3; ++ch)
        {
            Eigen::MatrixXd img = Eigen::MatrixXd::Constant(scene.height, scene.width, 0.0);
            for (int wave = 0; wave < 3; ++wave)
            {
                const double fy = uniform(rng, 0.5, 3.0) / scene.height;
                const double fx = uniform(rng, 0.5, 3.0) / scene.width;
                const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
                for (int y = 0; y < scene.height; ++y)
                    for (int x = 0; x < scene.width; ++x)
                        img(y, x) += std::sin(2.0 * std::numbers::pi * (fy * y + fx * x) + phase);
            }
            // Three unit waves span [-3, 3]; squeeze into [0.15, 0.5].
            frame.rgb[ch] = (0.325 + img.array() * (0.175 / 3.0)).matrix();
        }

        if (scene.photometric_noise_std > 0.0)
        {
            Rng noise(mix_seed(scene.background_seed, 0x9015E000ULL + static_cast<std::uint64_t>(slot)));
            for (auto &ch : frame.rgb)
                for (Eigen::Index i = 0; i < ch.size(); ++i)
                    ch.data()[i] = std::clamp(ch.data()[i] + scene.photometric_noise_std * standard_normal(noise), 0.0, 1.0);
        }
        return frame;
    }

    Frame render_scene(std::span<const geometry::UeState> trajectory, const SceneConfig &scene, int slot)
    {
        const auto support = blob_support(trajectory, scene, slot);
        Frame frame = render_background(scene, slot);
        for (int ch = 0; ch < 3; ++ch)
            for (int y = 0; y < scene.height; ++y)
                for (int x = 0; x < scene.width; ++x)
                    if (support(y, x))
                        frame.rgb[ch](y, x) = scene.blob_color[static_cast<std::size_t>(ch)];
        return frame;
    }

    Eigen::MatrixXd frame_difference(const Frame &current, const Frame &previous)
    {
        check_same_shape(current, previous);
        return (current.gray() - previous.gray()).cwiseAbs();
    }

    Eigen::MatrixXd motion_mask(const Eigen::MatrixXd &diff, double threshold)
    {
        return (diff.array() > threshold).cast<double>().matrix();
    }

    double mask_area_fraction(const Eigen::MatrixXd &mask)
    {
        if (mask.size() == 0)
            return 0.0;
        return mask.sum() / static_cast<double>(mask.size());
    }

    PreprocessedFrame preprocess_vision_slot(const Frame &current, const Frame &previous, double threshold,
                                             int out_height, int out_width)
    {
        const Eigen::MatrixXd diff = frame_difference(current, previous);
        const Eigen::MatrixXd mask = motion_mask(diff, threshold);
        PreprocessedFrame out;
        out.slot_index = current.slot_index;
        out.mask_area_fraction = mask_area_fraction(mask);
        out.channels = resize_bilinear(mask.cwiseProduct(diff), out_height, out_width);
        return out;
    }

    std::vector<PreprocessedFrame> preprocess_vision(std::span<const Frame> frames, int window, double threshold,
                                                     int out_height, int out_width)
    {
        if (window < 1 || frames.size() < static_cast<std::size_t>(window) + 1)
            throw WindowingError("preprocess_vision needs W + 1 = " + std::to_string(window + 1) + " frames, got " +
                                 std::to_string(frames.size()));
        frames = frames.last(static_cast<std::size_t>(window) + 1);
        for (std::size_t i = 1; i < frames.size(); ++i)
            if (frames[i].slot_index != frames[i - 1].slot_index + 1)
                throw WindowingError("preprocess_vision frames are not consecutive slots");
        std::vector<PreprocessedFrame> out;
        out.reserve(frames.size() - 1);
        for (std::size_t i = 1; i < frames.size(); ++i)
            out.push_back(preprocess_vision_slot(frames[i], frames[i - 1], threshold, out_height, out_width));
        return out;
    }
}
