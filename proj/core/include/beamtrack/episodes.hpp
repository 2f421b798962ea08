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

#ifndef BEAMTRACK_EPISODES_HPP
#define BEAMTRACK_EPISODES_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace beamtrack
{
    // Half-open slot interval [begin, end).
    struct SlotInterval
    {
        int begin = 0;
        int end = 0;

        bool contains(int slot) const noexcept { return slot >= begin && slot < end; }
        int length() const noexcept { return end - begin; }
        bool operator==(const SlotInterval &) const = default;
    };

    bool in_any(std::span<const SlotInterval> intervals, int slot) noexcept;

    // Non-overlapping random episodes covering roughly `fraction` of [0, num_slots).
    std::vector<SlotInterval> make_episodes(int num_slots, double fraction, int min_length, int max_length,
                                            std::uint64_t seed);
}

#endif
