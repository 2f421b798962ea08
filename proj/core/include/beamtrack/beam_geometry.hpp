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

#ifndef BEAMTRACK_BEAM_GEOMETRY_HPP
#define BEAMTRACK_BEAM_GEOMETRY_HPP

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace beamtrack::geometry
{
    using CVector = Eigen::VectorXcd;

    // Base-station uniform linear array.
    struct ArrayGeometry
    {
        int num_antennas = 32;        // N_t, >= 2
        double element_spacing = 0.5; // in wavelengths, > 0

        void validate() const;
    };

    // C unit-norm beams. Beam indices are 1-based throughout the library.
    struct BeamCodebook
    {
        std::vector<CVector> vectors;
        std::vector<double> steering_angles; // radians, one per beam

        int size() const noexcept { return static_cast<int>(vectors.size()); }
        const CVector &beam(int index) const; // index in 1..C
    };

    struct PathParams
    {
        double azimuth = 0.0; // radians, [-pi/2, pi/2]
        std::complex<double> complex_gain{1.0, 0.0};
    };

    struct ChannelState
    {
        CVector h;
        int slot_index = 0;
    };

    // Kinematic state of the UE at one slot. Positions in meters relative to the array,
    // y along broadside; azimuth is measured from broadside.
    struct UeState
    {
        double x = 0.0;
        double y = 10.0;
        double vx = 0.0;
        double vy = 0.0;
        double azimuth = 0.0;
        double range = 10.0;
        double speed = 0.0;
        double radial_velocity = 0.0; // d(range)/dt
        int pass_index = 0;
    };

    UeState make_ue_state(double x, double y, double vx, double vy, int pass_index = 0);

    // Parameters of the geometric LoS + weak-NLoS channel.
    struct PathModel
    {
        double reference_snr_db = 20.0; // matched-beam SNR of the LoS path at reference_range
        double reference_range = 10.0;  // meters
        double wavelength = 0.005;      // meters (60 GHz)
        int num_nlos = 2;
        double nlos_relative_db_min = -15.0;
        double nlos_relative_db_max = -8.0;

        void validate() const;
    };

    struct ScenarioConfig
    {
        ArrayGeometry array;
        double noise_power = 1.0; // sigma_n^2
        std::vector<UeState> trajectory;
        PathModel paths;
        std::uint64_t rng_seed = 0;

        int num_slots() const noexcept { return static_cast<int>(trajectory.size()); }
        // Checks the invariants, including trajectory length >= window + horizon + 1.
        void validate(int window, int horizon) const;
    };

    // Ground-truth beams b*[anchor .. anchor+J], 1-based.
    struct BeamLabels
    {
        std::vector<int> b_star;
        int anchor_slot = 0;

        int horizon() const noexcept { return static_cast<int>(b_star.size()) - 1; }
        bool operator==(const BeamLabels &) const = default;
    };

    // ULA response: a_m = exp(i 2 pi d m sin(theta)) / sqrt(N_t).
    CVector steering_vector(double azimuth, const ArrayGeometry &geometry);

    // C steering vectors with uniformly spaced sine values: sin(theta_c) = -1 + (2c - 1) / C.
    BeamCodebook build_dft_codebook(const ArrayGeometry &geometry, int num_beams);

    // The explicit path list realizing h at `slot` (LoS first, then NLoS reflectors).
    std::vector<PathParams> channel_paths(const ScenarioConfig &scenario, int slot);

    ChannelState channel_from_paths(std::span<const PathParams> paths, const ArrayGeometry &geometry, int slot);

    // h = sum_p gain_p a(theta_p); deterministic under scenario.rng_seed.
    ChannelState synthesize_channel(const ScenarioConfig &scenario, int slot);

    // |h^H v|^2
    double beam_gain(const CVector &h, const CVector &v);

    // Per-slot argmax_c |h[tau]^H v_c|^2, ties toward the smaller index.
    BeamLabels compute_optimal_beams(std::span<const ChannelState> channels, const BeamCodebook &codebook);

    int best_beam(const CVector &h, const BeamCodebook &codebook);

    double snr(const CVector &h, const CVector &v, double noise_power);

    // sum_tau log2(1 + SNR[tau]) in bits/s/Hz.
    double spectral_efficiency(std::span<const ChannelState> channels, std::span<const CVector> beams, double noise_power);

    // Piecewise-straight drive-by passes in front of the array.
    struct TrajectoryParams
    {
        int num_slots = 2100;
        double slot_period = 0.1;     // seconds
        double lateral_min = 8.0;     // meters, distance of the lane from the array
        double lateral_max = 20.0;
        double speed_min = 4.0;       // m/s
        double speed_max = 12.0;
        double max_azimuth_deg = 60.0;

        void validate() const;
    };

    std::vector<UeState> make_trajectory(const TrajectoryParams &params, std::uint64_t seed);
}

#endif
