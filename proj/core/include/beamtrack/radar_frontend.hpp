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

#ifndef BEAMTRACK_RADAR_FRONTEND_HPP
#define BEAMTRACK_RADAR_FRONTEND_HPP

#include "beamtrack/beam_geometry.hpp"
#include "beamtrack/episodes.hpp"

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace beamtrack::radar
{
    inline constexpr double speed_of_light = 299792458.0;

    // FMCW front end. Defaults give ~100 m unambiguous range and ~+-19 m/s Doppler span.
    struct RadarConfig
    {
        int num_rx = 4;          // N_r
        int num_fast = 64;       // N_s
        int num_chirps = 32;     // N_c
        double carrier_freq = 77e9;
        double chirp_slope = 15e12; // Hz/s
        double sample_rate = 10e6;  // complex samples per second
        double chirp_period = 50e-6;
        double rx_spacing = 0.5;    // wavelengths
        double noise_std = 0.01;
        int angle_fft_size = 64;
        int map_height = 64;
        int map_width = 64;

        void validate() const;
        double max_range() const noexcept { return sample_rate * speed_of_light / (2.0 * chirp_slope); }
        double beat_frequency(double range) const noexcept { return 2.0 * chirp_slope * range / speed_of_light; }
        double doppler_frequency(double radial_velocity) const noexcept
        {
            return 2.0 * radial_velocity * carrier_freq / speed_of_light;
        }
        double wavelength() const noexcept { return speed_of_light / carrier_freq; }
    };

    struct Scatterer
    {
        double range = 1.0;           // meters, > 0
        double radial_velocity = 0.0; // m/s
        double azimuth = 0.0;         // radians
        std::complex<double> amplitude{1.0, 0.0};
    };

    // Complex IF samples, logical shape N_r x N_s x N_c, row-major.
    struct RadarCube
    {
        int num_rx = 0;
        int num_fast = 0;
        int num_chirps = 0;
        int slot_index = 0;
        bool range_ambiguous = false; // some scatterer lies beyond the unambiguous range
        std::vector<std::complex<double>> samples;

        std::size_t index(int rx, int fast, int chirp) const noexcept
        {
            return (static_cast<std::size_t>(rx) * num_fast + fast) * num_chirps + chirp;
        }
        std::complex<double> &at(int rx, int fast, int chirp) noexcept { return samples[index(rx, fast, chirp)]; }
        const std::complex<double> &at(int rx, int fast, int chirp) const noexcept { return samples[index(rx, fast, chirp)]; }
    };

    // Both maps have entries in [0, 1] and shape map_height x map_width.
    struct RadarMaps
    {
        Eigen::MatrixXd range_angle;
        Eigen::MatrixXd range_doppler;
    };

    RadarCube synthesize_if_cube(std::span<const Scatterer> scatterers, const RadarConfig &config, std::uint64_t rng_seed,
                                 int slot_index = 0);

    // (N_s range bins) x (angle_fft_size) magnitudes; zero angle at column angle_fft_size / 2.
    Eigen::MatrixXd range_angle_map(const RadarCube &cube, const RadarConfig &config);

    // (N_s range bins) x (N_c) magnitudes; zero Doppler at column N_c / 2.
    Eigen::MatrixXd range_doppler_map(const RadarCube &cube, const RadarConfig &config);

    // Peak-relative dB, clipped to [-60, 0] dB, then min-max scaled to [0, 1].
    Eigen::MatrixXd normalize_db(const Eigen::MatrixXd &magnitude);

    RadarMaps preprocess_radar(const RadarCube &cube, const RadarConfig &config);

    // Nearest-bin predictions for a single scatterer, in map coordinates.
    int predicted_range_bin(double range, const RadarConfig &config);
    int predicted_doppler_column(double radial_velocity, const RadarConfig &config);
    int predicted_angle_column(double azimuth, const RadarConfig &config);

    // Scene content seen by the radar at one slot: the UE, fixed static reflectors and,
    // inside clutter episodes, a burst of random moving clutter plus extra noise.
    struct RadarSceneConfig
    {
        double ue_amplitude = 1.0; // at reference_range
        double reference_range = 10.0;
        int num_static_reflectors = 4;
        double static_amplitude = 0.5;
        std::vector<SlotInterval> clutter_episodes;
        int clutter_scatterers = 24;
        double clutter_amplitude = 4.0;
        double clutter_noise_factor = 20.0;

        void validate() const;
    };

    std::vector<Scatterer> scene_scatterers(const geometry::UeState &ue, const RadarSceneConfig &scene,
                                            const RadarConfig &config, int slot, std::uint64_t seed);

    // Noise level in effect at `slot` (raised inside clutter episodes).
    double slot_noise_std(const RadarSceneConfig &scene, const RadarConfig &config, int slot);
}

#endif
