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

#include "beamtrack/radar_frontend.hpp"

#include "beamtrack/errors.hpp"
#include "beamtrack/image_ops.hpp"
#include "beamtrack/random.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace beamtrack::radar
{
    namespace
    {
        using cd = std::complex<double>;
        constexpr double two_pi = 2.0 * std::numbers::pi;
        constexpr double db_floor = -60.0;
        constexpr double db_epsilon = 1e-6;

        int wrap(long long k, int n) { return static_cast<int>(((k % n) + n) % n); }

        // Column holding DFT bin k after an fft-shift of length n.
        int shifted_column(long long k, int n) { return wrap(wrap(k, n) + n / 2, n); }

        void check_cube(const RadarCube &cube, const RadarConfig &config)
        {
            if (cube.num_rx != config.num_rx || cube.num_fast != config.num_fast || cube.num_chirps != config.num_chirps ||
                cube.samples.size() != static_cast<std::size_t>(config.num_rx) * config.num_fast * config.num_chirps)
                throw ShapeError("radar cube shape " + std::to_string(cube.num_rx) + "x" + std::to_string(cube.num_fast) +
                                 "x" + std::to_string(cube.num_chirps) + " does not match config " +
                                 std::to_string(config.num_rx) + "x" + std::to_string(config.num_fast) + "x" +
                                 std::to_string(config.num_chirps));
        }

        // FFT over fast time for every (rx, chirp); result laid out like the cube.
        std::vector<cd> range_fft(const RadarCube &cube)
        {
            Eigen::FFT<double> fft;
            std::vector<cd> out(cube.samples.size());
            std::vector<cd> in(static_cast<std::size_t>(cube.num_fast)), spec;
            for (int r = 0; r < cube.num_rx; ++r)
                for (int c = 0; c < cube.num_chirps; ++c)
                {
                    for (int n = 0; n < cube.num_fast; ++n)
                        in[static_cast<std::size_t>(n)] = cube.at(r, n, c);
                    fft.fwd(spec, in);
                    for (int n = 0; n < cube.num_fast; ++n)
                        out[cube.index(r, n, c)] = spec[static_cast<std::size_t>(n)];
                }
            return out;
        }
    }

    void RadarConfig::validate() const
    {
        require_config(num_rx >= 2, "radar.num_rx", "must be >= 2");
        require_config(num_fast >= 2, "radar.num_fast", "must be >= 2");
        require_config(num_chirps >= 2, "radar.num_chirps", "must be >= 2");
        require_config(carrier_freq > 0.0, "radar.carrier_freq", "must be > 0");
        require_config(chirp_slope > 0.0, "radar.chirp_slope", "must be > 0");
        require_config(sample_rate > 0.0, "radar.sample_rate", "must be > 0");
        require_config(chirp_period > 0.0, "radar.chirp_period", "must be > 0");
        require_config(sample_rate * chirp_period >= num_fast, "radar.chirp_period",
                       "chirp too short to hold num_fast samples at sample_rate");
        require_config(rx_spacing > 0.0, "radar.rx_spacing", "must be > 0");
        require_config(noise_std >= 0.0, "radar.noise_std", "must be >= 0");
        require_config(angle_fft_size >= num_rx, "radar.angle_fft_size", "must be >= num_rx");
        require_config(map_height >= 2, "radar.map_height", "must be >= 2");
        require_config(map_width >= 2, "radar.map_width", "must be >= 2");
    }

    RadarCube synthesize_if_cube(std::span<const Scatterer> scatterers, const RadarConfig &config, std::uint64_t rng_seed,
                                 int slot_index)
    {
        config.validate();
        RadarCube cube;
        cube.num_rx = config.num_rx;
        cube.num_fast = config.num_fast;
        cube.num_chirps = config.num_chirps;
        cube.slot_index = slot_index;
        cube.samples.assign(static_cast<std::size_t>(config.num_rx) * config.num_fast * config.num_chirps, cd{});

        std::vector<cd> rx_phasor(static_cast<std::size_t>(config.num_rx));
        std::vector<cd> fast_phasor(static_cast<std::size_t>(config.num_fast));
        std::vector<cd> chirp_phasor(static_cast<std::size_t>(config.num_chirps));
        for (const Scatterer &s : scatterers)
        {
            if (!(s.range > 0.0))
                throw DomainError("scatterer range must be > 0");
            if (s.range >= config.max_range())
                cube.range_ambiguous = true;
            const double fb = config.beat_frequency(s.range);
            const double fd = config.doppler_frequency(s.radial_velocity);
            const double spatial = config.rx_spacing * std::sin(s.azimuth);
            for (int r = 0; r < config.num_rx; ++r)
                rx_phasor[static_cast<std::size_t>(r)] = std::polar(1.0, two_pi * spatial * r);
            for (int n = 0; n < config.num_fast; ++n)
                fast_phasor[static_cast<std::size_t>(n)] = std::polar(1.0, two_pi * fb * n / config.sample_rate);
            for (int c = 0; c < config.num_chirps; ++c)
                chirp_phasor[static_cast<std::size_t>(c)] = std::polar(1.0, two_pi * fd * c * config.chirp_period);

            for (int r = 0; r < config.num_rx; ++r)
            {
                const cd ar = s.amplitude * rx_phasor[static_cast<std::size_t>(r)];
                for (int n = 0; n < config.num_fast; ++n)
                {
                    const cd arn = ar * fast_phasor[static_cast<std::size_t>(n)];
                    cd *row = &cube.at(r, n, 0);
                    for (int c = 0; c < config.num_chirps; ++c)
                        row[c] += arn * chirp_phasor[static_cast<std::size_t>(c)];
                }
            }
        }

        if (config.noise_std > 0.0)
        {
            Rng rng(mix_seed(rng_seed, 0x0AD0ULL + static_cast<std::uint64_t>(slot_index)));
            const double component_std = config.noise_std / std::numbers::sqrt2;
            for (cd &x : cube.samples)
            {
                const double re = standard_normal(rng);
                const double im = standard_normal(rng);
                x += cd(component_std * re, component_std * im);
            }
        }
        return cube;
    }

    Eigen::MatrixXd range_angle_map(const RadarCube &cube, const RadarConfig &config)
    {
        check_cube(cube, config);
        const std::vector<cd> ranged = range_fft(cube);
        const int n_angle = config.angle_fft_size;

        Eigen::FFT<double> fft;
        Eigen::MatrixXd map = Eigen::MatrixXd::Zero(cube.num_fast, n_angle);
        std::vector<cd> in(static_cast<std::size_t>(n_angle)), spec;
        for (int n = 0; n < cube.num_fast; ++n)
            for (int c = 0; c < cube.num_chirps; ++c)
            {
                std::fill(in.begin(), in.end(), cd{});
                for (int r = 0; r < cube.num_rx; ++r)
                    in[static_cast<std::size_t>(r)] = ranged[cube.index(r, n, c)];
                fft.fwd(spec, in);
                for (int a = 0; a < n_angle; ++a)
                    map(n, shifted_column(a, n_angle)) += std::abs(spec[static_cast<std::size_t>(a)]);
            }
        return map / static_cast<double>(cube.num_chirps);
    }

    Eigen::MatrixXd range_doppler_map(const RadarCube &cube, const RadarConfig &config)
    {
        check_cube(cube, config);
        const std::vector<cd> ranged = range_fft(cube);
        const int n_chirps = cube.num_chirps;

        Eigen::FFT<double> fft;
        Eigen::MatrixXd map = Eigen::MatrixXd::Zero(cube.num_fast, n_chirps);
        std::vector<cd> in(static_cast<std::size_t>(n_chirps)), spec;
        for (int r = 0; r < cube.num_rx; ++r)
            for (int n = 0; n < cube.num_fast; ++n)
            {
                for (int c = 0; c < n_chirps; ++c)
                    in[static_cast<std::size_t>(c)] = ranged[cube.index(r, n, c)];
                fft.fwd(spec, in);
                for (int d = 0; d < n_chirps; ++d)
                    map(n, shifted_column(d, n_chirps)) += std::abs(spec[static_cast<std::size_t>(d)]);
            }
        return map / static_cast<double>(cube.num_rx);
    }

    Eigen::MatrixXd normalize_db(const Eigen::MatrixXd &magnitude)
    {
        const double peak = magnitude.size() > 0 ? magnitude.maxCoeff() : 0.0;
        Eigen::MatrixXd rel = peak > 0.0 ? Eigen::MatrixXd(magnitude / peak) : magnitude;
        Eigen::MatrixXd db = rel.unaryExpr([](double v) {
            return std::clamp(20.0 * std::log10(v + db_epsilon), db_floor, 0.0);
        });
        return normalize_min_max(db);
    }

    RadarMaps preprocess_radar(const RadarCube &cube, const RadarConfig &config)
    {
        RadarMaps maps;
        maps.range_angle = resize_bilinear(normalize_db(range_angle_map(cube, config)), config.map_height, config.map_width);
        maps.range_doppler =
            resize_bilinear(normalize_db(range_doppler_map(cube, config)), config.map_height, config.map_width);
        return maps;
    }

    int predicted_range_bin(double range, const RadarConfig &config)
    {
        const double bin = config.beat_frequency(range) * config.num_fast / config.sample_rate;
        return wrap(std::llround(bin), config.num_fast);
    }

    int predicted_doppler_column(double radial_velocity, const RadarConfig &config)
    {
        const double bin = config.doppler_frequency(radial_velocity) * config.chirp_period * config.num_chirps;
        return shifted_column(std::llround(bin), config.num_chirps);
    }

    int predicted_angle_column(double azimuth, const RadarConfig &config)
    {
        const double bin = config.angle_fft_size * config.rx_spacing * std::sin(azimuth);
        return shifted_column(std::llround(bin), config.angle_fft_size);
    }

    void RadarSceneConfig::validate() const
    {
        require_config(ue_amplitude > 0.0, "radar_scene.ue_amplitude", "must be > 0");
        require_config(reference_range > 0.0, "radar_scene.reference_range", "must be > 0");
        require_config(num_static_reflectors >= 0, "radar_scene.num_static_reflectors", "must be >= 0");
        require_config(clutter_scatterers >= 0, "radar_scene.clutter_scatterers", "must be >= 0");
        require_config(clutter_noise_factor >= 1.0, "radar_scene.clutter_noise_factor", "must be >= 1");
    }

    std::vector<Scatterer> scene_scatterers(const geometry::UeState &ue, const RadarSceneConfig &scene,
                                            const RadarConfig &config, int slot, std::uint64_t seed)
    {
        const double r_max = config.max_range();
        const double k = 4.0 * std::numbers::pi / config.wavelength();
        std::vector<Scatterer> out;

        // Two-way spreading on amplitude ~ 1/R^2.
        const double ue_amp = scene.ue_amplitude * std::pow(scene.reference_range / ue.range, 2.0);
        out.push_back({ue.range, ue.radial_velocity, ue.azimuth, std::polar(ue_amp, -std::fmod(k * ue.range, two_pi))});

        Rng fixed(mix_seed(seed, 0x57A7ULL));
        for (int i = 0; i < scene.num_static_reflectors; ++i)
        {
            const double range = uniform(fixed, 3.0, 0.8 * r_max);
            const double az = uniform(fixed, -std::numbers::pi / 3.0, std::numbers::pi / 3.0);
            const double amp = scene.static_amplitude * uniform(fixed, 0.3, 1.0);
            const double phase = uniform(fixed, 0.0, two_pi);
            out.push_back({range, 0.0, az, std::polar(amp, phase)});
        }

        if (in_any(scene.clutter_episodes, slot))
        {
            Rng burst(mix_seed(seed, 0xC1077E00ULL + static_cast<std::uint64_t>(slot)));
            const double v_max = speed_of_light / (4.0 * config.carrier_freq * config.chirp_period);
            for (int i = 0; i < scene.clutter_scatterers; ++i)
            {
                const double range = uniform(burst, 3.0, 0.6 * r_max);
                const double az = uniform(burst, -std::numbers::pi / 3.0, std::numbers::pi / 3.0);
                const double v = uniform(burst, -0.9 * v_max, 0.9 * v_max);
                const double amp = scene.clutter_amplitude * scene.ue_amplitude * uniform(burst, 0.3, 1.0);
                const double phase = uniform(burst, 0.0, two_pi);
                out.push_back({range, v, az, std::polar(amp, phase)});
            }
        }
        return out;
    }

    double slot_noise_std(const RadarSceneConfig &scene, const RadarConfig &config, int slot)
    {
        return in_any(scene.clutter_episodes, slot) ? config.noise_std * scene.clutter_noise_factor : config.noise_std;
    }
}
