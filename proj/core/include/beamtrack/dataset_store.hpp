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

#ifndef BEAMTRACK_DATASET_STORE_HPP
#define BEAMTRACK_DATASET_STORE_HPP

#include "beamtrack/array_container.hpp"
#include "beamtrack/beam_geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace beamtrack::data
{
    using ArrayPtr = std::shared_ptr<const io::NdArray>;

    // One slot of a per-slot stream. Vision arrays are {1, h, w}, radar arrays {2, h, w}.
    struct SlotArray
    {
        int slot_index = 0;
        ArrayPtr array; // may be null where no observation exists (e.g. the first vision slot)
    };

    struct SlotLabel
    {
        int slot_index = 0;
        int beam = 1; // 1-based
    };

    // Observations for slots anchor-W+1 .. anchor and labels for anchor .. anchor+J.
    // Samples that overlap share the per-slot arrays.
    struct SequenceSample
    {
        int anchor_slot = 0;
        std::vector<ArrayPtr> vision;
        std::vector<ArrayPtr> radar;
        geometry::BeamLabels labels;

        int window() const noexcept { return static_cast<int>(vision.size()); }
        int horizon() const noexcept { return labels.horizon(); }
    };

    struct DatasetInfo
    {
        int window = 8;     // W
        int horizon = 3;    // J
        int num_beams = 32; // C
    };

    inline constexpr int manifest_version = 1;

    // One sample per anchor position t with t - W >= 0 and t + J <= T - 1: T - W - J samples.
    std::vector<SequenceSample> assemble_samples(std::span<const SlotArray> vision, std::span<const SlotArray> radar,
                                                 std::span<const SlotLabel> labels, int window, int horizon);

    enum class SplitMode
    {
        random,
        temporal_blocks
    };

    struct SplitSpec
    {
        double train_fraction = 0.8;
        std::uint64_t seed = 0;
        SplitMode mode = SplitMode::random;
        int block_length = 50; // samples per block in temporal_blocks mode

        void validate() const;
    };

    struct SplitResult
    {
        std::vector<SequenceSample> train;
        std::vector<SequenceSample> validation;
    };

    // floor(N * fraction) training samples, the rest for validation; both sorted by anchor.
    SplitResult split(std::span<const SequenceSample> samples, const SplitSpec &spec);

    struct DatasetStats
    {
        std::vector<long long> counts; // index c - 1
        std::vector<double> alpha;     // N_total / (C * max(count, 1))
        long long total = 0;
    };

    DatasetStats class_histogram(std::span<const SequenceSample> samples, int num_beams);

    // Writes manifest.csv plus one .arr per distinct observation array.
    void save_dataset(std::span<const SequenceSample> samples, const DatasetInfo &info, const std::filesystem::path &directory);

    struct LoadedDataset
    {
        DatasetInfo info;
        std::vector<SequenceSample> samples;
    };

    LoadedDataset load_dataset(const std::filesystem::path &directory);

    // Optional per-slot side information written by the synthetic generator (slots.csv).
    struct SlotMetadata
    {
        int slot_index = 0;
        double azimuth = 0.0;
        double range = 0.0;
        int beam = 1;
        bool vision_degraded = false;
        bool radar_degraded = false;
    };

    void save_slot_metadata(std::span<const SlotMetadata> slots, const std::filesystem::path &directory);
    std::optional<std::vector<SlotMetadata>> load_slot_metadata(const std::filesystem::path &directory);

    enum class Degradation
    {
        vision,
        radar
    };

    // True when any observation slot of the sample falls in a degraded slot of the given kind.
    bool sample_degraded(const SequenceSample &sample, std::span<const SlotMetadata> slots, Degradation kind);
}

#endif
