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
#include "beamtrack/episodes.hpp"

#include "beamtrack/errors.hpp"
#include "beamtrack/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace beamtrack::geometry
{
    void TrajectoryParams::validate() const
    {
        require_config(num_slots > 0, "scenario.num_slots", "must be > 0");
        require_config(slot_period > 0.0, "scenario.slot_period", "must be > 0");
        require_config(lateral_min > 0.0 && lateral_min <= lateral_max, "scenario.lateral_min",
                       "need 0 < lateral_min <= lateral_max");
        require_config(speed_min > 0.0 && speed_min <= speed_max, "scenario.speed_min",
                       "need 0 < speed_min <= speed_max");
        require_config(max_azimuth_deg > 0.0 && max_azimuth_deg < 90.0, "scenario.max_azimuth_deg",
                       "must lie in (0, 90)");
    }

    std::vector<UeState> make_trajectory(const TrajectoryParams &params, std::uint64_t seed)
    {
        params.validate();
        Rng rng(mix_seed(seed, 0x7EA3ULL));
        const double tan_max = std::tan(params.max_azimuth_deg * std::numbers::pi / 180.0);

        std::vector<UeState> out;
        out.reserve(static_cast<std::size_t>(params.num_slots));
        int pass = 0;
        while (static_cast<int>(out.size()) < params.num_slots)
        {
            const double lane = uniform(rng, params.lateral_min, params.lateral_max);
            const double speed = uniform(rng, params.speed_min, params.speed_max);
            const double direction = uniform01(rng) < 0.5 ? -1.0 : 1.0;
            const double x_max = lane * tan_max;
            // Random entry phase so consecutive passes do not all start on the same pixel.
            double x = -direction * x_max + direction * uniform(rng, 0.0, speed * params.slot_period);
            while (std::abs(x) <= x_max && static_cast<int>(out.size()) < params.num_slots)
            {
                out.push_back(make_ue_state(x, lane, direction * speed, 0.0, pass));
                x += direction * speed * params.slot_period;
            }
            ++pass;
        }
        return out;
    }
}

namespace beamtrack
{
    bool in_any(std::span<const SlotInterval> intervals, int slot) noexcept
    {
        for (const SlotInterval &iv : intervals)
            if (iv.contains(slot))
                return true;
        return false;
    }

    std::vector<SlotInterval> make_episodes(int num_slots, double fraction, int min_length, int max_length,
                                            std::uint64_t seed)
    {
        require_config(fraction >= 0.0 && fraction < 1.0, "episodes.fraction", "must lie in [0, 1)");
        require_config(min_length >= 1 && min_length <= max_length, "episodes.min_length",
                       "need 1 <= min_length <= max_length");
        std::vector<SlotInterval> out;
        if (fraction <= 0.0 || num_slots <= 0)
            return out;

        Rng rng(mix_seed(seed, 0xE915ULL));
        const double mean_length = 0.5 * (min_length + max_length);
        // Gap lengths drawn so the expected covered fraction matches `fraction`.
        const double mean_gap = mean_length * (1.0 - fraction) / fraction;
        int cursor = static_cast<int>(uniform(rng, 0.0, 2.0 * mean_gap));
        while (cursor < num_slots)
        {
            const int length = min_length + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(max_length - min_length + 1)));
            const int end = std::min(num_slots, cursor + length);
            out.push_back({cursor, end});
            cursor = end + 1 + static_cast<int>(uniform(rng, 0.0, 2.0 * mean_gap));
        }
        return out;
    }
}
