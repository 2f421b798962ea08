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

#include "beamtrack/errors.hpp"
#include "beamtrack/random.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace beamtrack::geometry
{
    namespace
    {
        constexpr double angle_tolerance = 1e-12;

        double db_to_linear_power(double db) { return std::pow(10.0, db / 10.0); }
    }

    void ArrayGeometry::validate() const
    {
        require_config(num_antennas >= 2, "scenario.num_antennas", "must be >= 2");
        require_config(element_spacing > 0.0, "scenario.element_spacing", "must be > 0");
    }

    const CVector &BeamCodebook::beam(int index) const
    {
        if (index < 1 || index > size())
            throw IndexError("beam index " + std::to_string(index) + " outside 1.." + std::to_string(size()));
        return vectors[static_cast<std::size_t>(index - 1)];
    }

    UeState make_ue_state(double x, double y, double vx, double vy, int pass_index)
    {
        UeState s;
        s.x = x;
        s.y = y;
        s.vx = vx;
        s.vy = vy;
        s.range = std::hypot(x, y);
        s.azimuth = std::atan2(x, y);
        s.speed = std::hypot(vx, vy);
        s.radial_velocity = s.range > 0.0 ? (x * vx + y * vy) / s.range : 0.0;
        s.pass_index = pass_index;
        return s;
    }

    void PathModel::validate() const
    {
        require_config(reference_range > 0.0, "scenario.reference_range", "must be > 0");
        require_config(wavelength > 0.0, "scenario.wavelength", "must be > 0");
        require_config(num_nlos >= 0, "scenario.num_nlos", "must be >= 0");
        require_config(nlos_relative_db_min <= nlos_relative_db_max, "scenario.nlos_relative_db_min",
                       "must not exceed nlos_relative_db_max");
    }

    void ScenarioConfig::validate(int window, int horizon) const
    {
        array.validate();
        paths.validate();
        require_config(noise_power > 0.0, "scenario.noise_power", "must be > 0");
        require_config(num_slots() >= window + horizon + 1, "scenario.trajectory",
                       "trajectory length must be >= W + J + 1");
    }

    CVector steering_vector(double azimuth, const ArrayGeometry &geometry)
    {
        geometry.validate();
        if (!(std::abs(azimuth) <= std::numbers::pi / 2.0 + angle_tolerance))
            throw DomainError("azimuth " + std::to_string(azimuth) + " rad outside [-pi/2, pi/2]");

        const int n = geometry.num_antennas;
        const double phase_step = 2.0 * std::numbers::pi * geometry.element_spacing * std::sin(azimuth);
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        CVector a(n);
        for (int m = 0; m < n; ++m)
            a[m] = std::polar(scale, phase_step * m);
        return a;
    }

    BeamCodebook build_dft_codebook(const ArrayGeometry &geometry, int num_beams)
    {
        require_config(num_beams >= 2, "scenario.codebook_size", "codebook needs at least 2 beams");
        BeamCodebook book;
        book.vectors.reserve(static_cast<std::size_t>(num_beams));
        book.steering_angles.reserve(static_cast<std::size_t>(num_beams));
        for (int c = 1; c <= num_beams; ++c)
        {
            const double s = -1.0 + (2.0 * c - 1.0) / num_beams;
            const double angle = std::asin(s);
            book.steering_angles.push_back(angle);
            book.vectors.push_back(steering_vector(angle, geometry));
        }
        return book;
    }

    std::vector<PathParams> channel_paths(const ScenarioConfig &scenario, int slot)
    {
        if (slot < 0 || slot >= scenario.num_slots())
            throw IndexError("slot " + std::to_string(slot) + " outside trajectory of length " +
                             std::to_string(scenario.num_slots()));

        const UeState &ue = scenario.trajectory[static_cast<std::size_t>(slot)];
        const PathModel &pm = scenario.paths;

        // Matched-beam SNR at reference range equals reference_snr_db; free-space amplitude decay.
        const double ref_amplitude = std::sqrt(db_to_linear_power(pm.reference_snr_db) * scenario.noise_power);
        const double los_amplitude = ref_amplitude * pm.reference_range / ue.range;
        const double los_phase = -2.0 * std::numbers::pi * std::fmod(ue.range / pm.wavelength, 1.0);

        std::vector<PathParams> paths;
        paths.reserve(static_cast<std::size_t>(1 + pm.num_nlos));
        paths.push_back({ue.azimuth, std::polar(los_amplitude, los_phase)});

        // Reflectors are fixed per UE pass; their phases decorrelate slot to slot.
        Rng reflector_rng(mix_seed(scenario.rng_seed, 0x5EED0000ULL + static_cast<std::uint64_t>(ue.pass_index)));
        Rng phase_rng(mix_seed(scenario.rng_seed, 0xFA5E0000ULL + static_cast<std::uint64_t>(slot)));
        for (int p = 0; p < pm.num_nlos; ++p)
        {
            const double az = uniform(reflector_rng, -std::numbers::pi / 2.0, std::numbers::pi / 2.0);
            const double rel_db = uniform(reflector_rng, pm.nlos_relative_db_min, pm.nlos_relative_db_max);
            const double amp = los_amplitude * std::sqrt(db_to_linear_power(rel_db));
            const double phase = uniform(phase_rng, 0.0, 2.0 * std::numbers::pi);
            paths.push_back({az, std::polar(amp, phase)});
        }
        return paths;
    }

    ChannelState channel_from_paths(std::span<const PathParams> paths, const ArrayGeometry &geometry, int slot)
    {
        ChannelState state;
        state.slot_index = slot;
        state.h = CVector::Zero(geometry.num_antennas);
        for (const PathParams &p : paths)
            state.h += p.complex_gain * steering_vector(p.azimuth, geometry);
        return state;
    }

    ChannelState synthesize_channel(const ScenarioConfig &scenario, int slot)
    {
        const auto paths = channel_paths(scenario, slot);
        return channel_from_paths(paths, scenario.array, slot);
    }

    double beam_gain(const CVector &h, const CVector &v)
    {
        if (h.size() != v.size())
            throw ShapeError("beam_gain: channel length " + std::to_string(h.size()) + " != beam length " +
                             std::to_string(v.size()));
        return std::norm(h.dot(v)); // Eigen's dot conjugates the first argument
    }

    int best_beam(const CVector &h, const BeamCodebook &codebook)
    {
        if (codebook.size() == 0)
            throw ConfigError("empty codebook", "scenario.codebook_size");
        int best = 1;
        double best_gain = beam_gain(h, codebook.vectors[0]);
        for (int c = 2; c <= codebook.size(); ++c)
        {
            const double g = beam_gain(h, codebook.vectors[static_cast<std::size_t>(c - 1)]);
            if (g > best_gain)
            {
                best_gain = g;
                best = c;
            }
        }
        return best;
    }

    BeamLabels compute_optimal_beams(std::span<const ChannelState> channels, const BeamCodebook &codebook)
    {
        if (codebook.size() == 0)
            throw ConfigError("empty codebook", "scenario.codebook_size");
        if (channels.empty())
            throw ShapeError("compute_optimal_beams: no channel states supplied");
        BeamLabels labels;
        labels.anchor_slot = channels.front().slot_index;
        labels.b_star.reserve(channels.size());
        for (const ChannelState &ch : channels)
            labels.b_star.push_back(best_beam(ch.h, codebook));
        return labels;
    }

    double snr(const CVector &h, const CVector &v, double noise_power)
    {
        if (!(noise_power > 0.0))
            throw DomainError("noise power must be > 0");
        return beam_gain(h, v) / noise_power;
    }

    double spectral_efficiency(std::span<const ChannelState> channels, std::span<const CVector> beams, double noise_power)
    {
        if (channels.size() != beams.size())
            throw ShapeError("spectral_efficiency: " + std::to_string(channels.size()) + " channels vs " +
                             std::to_string(beams.size()) + " beams");
        double rate = 0.0;
        for (std::size_t i = 0; i < channels.size(); ++i)
            rate += std::log2(1.0 + snr(channels[i].h, beams[i], noise_power));
        return rate;
    }
}
