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

#ifndef BEAMTRACK_VISION_FRONTEND_HPP
#define BEAMTRACK_VISION_FRONTEND_HPP

#include "beamtrack/beam_geometry.hpp"
#include "beamtrack/episodes.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace beamtrack::vision
{
    struct SceneConfig
    {
        int height = 64; // d_H
        int width = 64;  // d_W
        std::uint64_t background_seed = 7;
        double blob_radius = 3.0;        // pixels
        double pixels_per_radian = 0.0;  // <= 0 selects the auto calibration (see calibration())
        double near_range = 5.0;         // meters; near UEs sit lower in the frame
        double far_range = 40.0;
        double photometric_noise_std = 0.0;
        std::array<double, 3> blob_color{1.0, 0.85, 0.2};
        std::vector<SlotInterval> occlusions;

        void validate() const;
        // Horizontal pixels per radian of azimuth; auto maps +-60 degrees to the frame edges.
        double calibration() const noexcept;
    };

    // RGB frame, each channel d_H x d_W with values in [0, 1].
    struct Frame
    {
        std::array<Eigen::MatrixXd, 3> rgb;
        int slot_index = 0;

        Eigen::MatrixXd gray() const;
    };

    struct PreprocessedFrame
    {
        Eigen::MatrixXd channels; // masked difference image, resized
        double mask_area_fraction = 0.0;
        int slot_index = 0;
    };

    double blob_center_x(double azimuth, const SceneConfig &scene) noexcept;
    double blob_center_y(double range, const SceneConfig &scene) noexcept;

    // Pixels covered by the UE blob at `slot` (empty while occluded).
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> blob_support(std::span<const geometry::UeState> trajectory,
                                                                      const SceneConfig &scene, int slot);

    Frame render_background(const SceneConfig &scene, int slot);
    Frame render_scene(std::span<const geometry::UeState> trajectory, const SceneConfig &scene, int slot);

    // |gray(current) - gray(previous)| with gray = channel mean.
    Eigen::MatrixXd frame_difference(const Frame &current, const Frame &previous);

    // 1 where diff > threshold, else 0.
    Eigen::MatrixXd motion_mask(const Eigen::MatrixXd &diff, double threshold);
    double mask_area_fraction(const Eigen::MatrixXd &mask);

    inline constexpr double default_motion_threshold = 0.1;

    // mask(diff) * diff for one slot, resized to out_height x out_width.
    PreprocessedFrame preprocess_vision_slot(const Frame &current, const Frame &previous, double threshold,
                                             int out_height, int out_width);

    // The last W + 1 consecutive frames -> W preprocessed frames (the final W slots).
    std::vector<PreprocessedFrame> preprocess_vision(std::span<const Frame> frames, int window,
                                                     double threshold = default_motion_threshold, int out_height = 64,
                                                     int out_width = 64);
}

#endif
