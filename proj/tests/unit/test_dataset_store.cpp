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

#include "beamtrack/array_container.hpp"
#include "beamtrack/dataset_generator.hpp"
#include "beamtrack/dataset_store.hpp"
#include "beamtrack/errors.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <unistd.h>
#include <set>

using namespace beamtrack;
using namespace beamtrack::data;
namespace fs = std::filesystem;

namespace
{
    struct Streams
    {
        std::vector<SlotArray> vision, radar;
        std::vector<SlotLabel> labels;
    };

    Streams make_streams(int total, int first_slot = 0, int num_beams = 32)
    {
        Streams s;
        for (int i = 0; i < total; ++i)
        {
            const int slot = first_slot + i;
            const float v = static_cast<float>(slot);
            s.vision.push_back({slot, i == 0 ? nullptr
                                             : std::make_shared<const io::NdArray>(io::NdArray({1, 2, 2}, {v, v + 0.25f, v + 0.5f, v + 0.75f}))});
            s.radar.push_back({slot, std::make_shared<const io::NdArray>(
                                         io::NdArray({2, 2, 2}, {v, -v, v * 2, -v * 2, 1, 2, 3, 4}))});
            s.labels.push_back({slot, 1 + (slot * 7) % num_beams});
        }
        return s;
    }

    std::vector<SequenceSample> samples_of(const Streams &s, int w, int j)
    {
        return assemble_samples(s.vision, s.radar, s.labels, w, j);
    }

    class TempDir
    {
    public:
        TempDir()
        {
            static int counter = 0;
            path_ = fs::temp_directory_path() / ("beamtrack_ds_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
            fs::remove_all(path_);
        }
        ~TempDir() { fs::remove_all(path_); }
        const fs::path &path() const { return path_; }

    private:
        fs::path path_;
    };
}

TEST(Assemble, TwelveSlotsGiveOneSample)
{
    const auto out = samples_of(make_streams(12), 8, 3);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].anchor_slot, 8);
    EXPECT_EQ(out[0].window(), 8);
    EXPECT_EQ(out[0].horizon(), 3);
    EXPECT_EQ(out[0].vision.front()->data[0], 1.0f);
    EXPECT_EQ(out[0].vision.back()->data[0], 8.0f);
    EXPECT_EQ(out[0].labels.b_star, (std::vector<int>{1 + 56 % 32, 1 + 63 % 32, 1 + 70 % 32, 1 + 77 % 32}));
}

TEST(Assemble, CountFormula)
{
    EXPECT_EQ(samples_of(make_streams(4060), 8, 3).size(), 4049u);
    for (int t : {12, 13, 40})
        for (int w : {1, 4, 8})
            for (int j : {0, 1, 3})
                EXPECT_EQ(static_cast<int>(samples_of(make_streams(t), w, j).size()), std::max(0, t - w - j));
    EXPECT_TRUE(samples_of(make_streams(11), 8, 3).empty());
}

TEST(Assemble, OverlappingSamplesShareArrays)
{
    const auto out = samples_of(make_streams(20), 8, 3);
    EXPECT_EQ(out[0].vision[1].get(), out[1].vision[0].get());
    EXPECT_EQ(out[0].radar[1].get(), out[1].radar[0].get());
}

TEST(Assemble, MisalignedStreamsThrow)
{
    Streams s = make_streams(20);
    s.radar.pop_back();
    EXPECT_THROW(samples_of(s, 8, 3), AlignmentError);
    s = make_streams(20);
    s.labels[5].slot_index = 99;
    EXPECT_THROW(samples_of(s, 8, 3), AlignmentError);
    s = make_streams(20);
    s.vision[4].array = nullptr;
    EXPECT_THROW(samples_of(s, 8, 3), WindowingError);
    EXPECT_THROW(samples_of(make_streams(20), 0, 3), ConfigError);
}

TEST(Split, SizesDisjointSortedAndDeterministic)
{
    const auto all = samples_of(make_streams(300), 8, 3);
    SplitSpec spec;
    spec.seed = 4;
    const SplitResult a = split(all, spec), b = split(all, spec);
    EXPECT_EQ(a.train.size(), static_cast<std::size_t>(289 * 8 / 10));
    EXPECT_EQ(a.train.size() + a.validation.size(), all.size());
    std::set<int> anchors;
    for (const auto *part : {&a.train, &a.validation})
        for (std::size_t i = 0; i < part->size(); ++i)
        {
            anchors.insert((*part)[i].anchor_slot);
            if (i > 0)
                EXPECT_LT((*part)[i - 1].anchor_slot, (*part)[i].anchor_slot);
        }
    EXPECT_EQ(anchors.size(), all.size());
    ASSERT_EQ(a.validation.size(), b.validation.size());
    for (std::size_t i = 0; i < a.validation.size(); ++i)
        EXPECT_EQ(a.validation[i].anchor_slot, b.validation[i].anchor_slot);

    spec.seed = 5;
    const SplitResult c = split(all, spec);
    bool differs = false;
    for (std::size_t i = 0; i < c.validation.size(); ++i)
        differs |= c.validation[i].anchor_slot != a.validation[i].anchor_slot;
    EXPECT_TRUE(differs);
}

TEST(Split, TemporalBlocksKeepContiguousRuns)
{
    const auto all = samples_of(make_streams(511), 8, 3);
    SplitSpec spec;
    spec.mode = SplitMode::temporal_blocks;
    spec.block_length = 50;
    spec.train_fraction = 0.8;
    const SplitResult r = split(all, spec);
    EXPECT_EQ(r.train.size(), 400u);
    // Validation is made of whole blocks: anchors come in runs whose block ids are complete.
    std::map<int, int> per_block;
    for (const auto &s : r.validation)
        ++per_block[(s.anchor_slot - 8) / 50];
    for (const auto &[block, count] : per_block)
        EXPECT_EQ(count, 50) << "block " << block;
}

TEST(Split, DegenerateFractionsRejected)
{
    const auto all = samples_of(make_streams(15), 8, 3);
    SplitSpec spec;
    spec.train_fraction = 0.2;
    EXPECT_THROW(split(all, spec), ConfigError);
    spec.train_fraction = 1.0;
    EXPECT_THROW(split(all, spec), ConfigError);
}

TEST(Histogram, CountsAndAlpha)
{
    const auto all = samples_of(make_streams(40, 0, 4), 8, 3);
    const DatasetStats st = class_histogram(all, 4);
    long long sum = 0;
    for (auto c : st.counts)
        sum += c;
    EXPECT_EQ(sum, static_cast<long long>(all.size()) * 4);
    EXPECT_EQ(st.total, sum);
    for (std::size_t c = 0; c < 4; ++c)
        EXPECT_NEAR(st.alpha[c], static_cast<double>(sum) / (4.0 * std::max<long long>(st.counts[c], 1)), 1e-12);

    const DatasetStats sparse = class_histogram(all, 8);
    for (std::size_t c = 4; c < 8; ++c)
    {
        EXPECT_EQ(sparse.counts[c], 0);
        EXPECT_NEAR(sparse.alpha[c], static_cast<double>(sum) / 8.0, 1e-12);
    }
    EXPECT_THROW(class_histogram({}, 4), Error);
    EXPECT_THROW(class_histogram(all, 3), IndexError);
}

TEST(Store, RoundTripIsBitExact)
{
    TempDir dir;
    const auto all = samples_of(make_streams(40), 8, 3);
    save_dataset(all, DatasetInfo{8, 3, 32}, dir.path());
    const LoadedDataset back = load_dataset(dir.path());
    EXPECT_EQ(back.info.window, 8);
    EXPECT_EQ(back.info.horizon, 3);
    EXPECT_EQ(back.info.num_beams, 32);
    ASSERT_EQ(back.samples.size(), all.size());
    for (std::size_t i = 0; i < all.size(); ++i)
    {
        EXPECT_EQ(back.samples[i].anchor_slot, all[i].anchor_slot);
        EXPECT_EQ(back.samples[i].labels, all[i].labels);
        for (int k = 0; k < 8; ++k)
        {
            EXPECT_EQ(*back.samples[i].vision[static_cast<std::size_t>(k)], *all[i].vision[static_cast<std::size_t>(k)]);
            EXPECT_EQ(*back.samples[i].radar[static_cast<std::size_t>(k)], *all[i].radar[static_cast<std::size_t>(k)]);
        }
    }
    // Each slot is stored once and shared again after loading.
    EXPECT_EQ(back.samples[0].vision[1].get(), back.samples[1].vision[0].get());
}

TEST(Store, EmptyDatasetRoundTrips)
{
    TempDir dir;
    save_dataset({}, DatasetInfo{8, 3, 32}, dir.path());
    EXPECT_TRUE(load_dataset(dir.path()).samples.empty());
}

TEST(Store, CorruptedArrayRaisesChecksumError)
{
    TempDir dir;
    save_dataset(samples_of(make_streams(14), 8, 3), DatasetInfo{8, 3, 32}, dir.path());
    fs::path victim;
    for (const auto &e : fs::recursive_directory_iterator(dir.path()))
        if (e.path().extension() == ".arr")
        {
            victim = e.path();
            break;
        }
    ASSERT_FALSE(victim.empty());
    std::vector<char> bytes;
    {
        std::ifstream is(victim, std::ios::binary);
        bytes.assign(std::istreambuf_iterator<char>(is), {});
    }
    bytes[bytes.size() - 6] ^= 0x10; // inside the float payload
    {
        std::ofstream os(victim, std::ios::binary | std::ios::trunc);
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
    EXPECT_THROW(load_dataset(dir.path()), ChecksumError);
}

TEST(Store, MissingFilesAndBadManifest)
{
    TempDir dir;
    EXPECT_THROW(load_dataset(dir.path()), MissingArtifactError);
    fs::create_directories(dir.path());
    std::ofstream(dir.path() / "manifest.csv") << "anchor,foo\n1,2\n";
    EXPECT_THROW(load_dataset(dir.path()), FormatError);
    std::ofstream(dir.path() / "manifest.csv", std::ios::trunc) << "# beamtrack-manifest version=9 W=8 J=3 C=32\n";
    EXPECT_THROW(load_dataset(dir.path()), FormatError);
}

TEST(Container, EncodeDecodeAndCrc)
{
    const std::string text = "123456789";
    EXPECT_EQ(io::crc32(std::span(reinterpret_cast<const std::uint8_t *>(text.data()), text.size())), 0xCBF43926u);
    const io::NdArray a({2, 3}, {1, 2, 3, 4, 5, 6});
    const auto bytes = io::encode_array(a);
    EXPECT_EQ(bytes.size(), 4u + 2 + 2 + 4 + 16 + 24 + 4);
    EXPECT_EQ(io::decode_array(bytes, "mem"), a);
    auto broken = bytes;
    broken[0] = 'X';
    EXPECT_THROW(io::decode_array(broken, "mem"), FormatError);
    auto truncated = bytes;
    truncated.resize(10);
    EXPECT_THROW(io::decode_array(truncated, "mem"), FormatError);
    EXPECT_THROW(io::NdArray({2, 2}, {1, 2, 3}), ShapeError);
}

TEST(Generator, SmallScenarioIsConsistent)
{
    GeneratorConfig cfg;
    cfg.trajectory.num_slots = 120;
    cfg.radar.map_height = cfg.radar.map_width = 16;
    cfg.vision_height = cfg.vision_width = 16;
    cfg.scene.height = cfg.scene.width = 32;
    const GeneratedDataset a = generate_dataset(cfg);
    EXPECT_EQ(a.samples.size(), 120u - 8u - 3u);
    EXPECT_EQ(a.slots.size(), 120u);
    const auto &s = a.samples.front();
    EXPECT_EQ(s.vision.front()->dims, (std::vector<std::uint64_t>{1, 16, 16}));
    EXPECT_EQ(s.radar.front()->dims, (std::vector<std::uint64_t>{2, 16, 16}));
    for (const auto &occ : a.occlusions)
        for (const auto &clu : a.clutter)
            EXPECT_TRUE(occ.end <= clu.begin || clu.end <= occ.begin);
    for (const auto &m : a.slots)
    {
        EXPECT_EQ(m.vision_degraded, in_any(a.occlusions, m.slot_index));
        EXPECT_EQ(m.radar_degraded, in_any(a.clutter, m.slot_index));
    }
    for (const auto &smp : a.samples)
        EXPECT_EQ(smp.labels.b_star.front(), a.slots[static_cast<std::size_t>(smp.anchor_slot)].beam);

    const GeneratedDataset b = generate_dataset(cfg);
    ASSERT_EQ(a.samples.size(), b.samples.size());
    EXPECT_EQ(*a.samples[5].radar[3], *b.samples[5].radar[3]);
    EXPECT_EQ(a.samples[5].labels, b.samples[5].labels);
}

TEST(Metadata, RoundTripAndDegradedSamples)
{
    TempDir dir;
    std::vector<SlotMetadata> slots;
    for (int i = 0; i < 30; ++i)
        slots.push_back({i, 0.1 * i, 10.0 + i, 1 + i % 5, i >= 12 && i < 15, i == 25});
    save_slot_metadata(slots, dir.path());
    const auto back = load_slot_metadata(dir.path());
    ASSERT_TRUE(back.has_value());
    ASSERT_EQ(back->size(), 30u);
    EXPECT_EQ((*back)[7].azimuth, slots[7].azimuth);
    EXPECT_TRUE((*back)[13].vision_degraded);

    const auto all = samples_of(make_streams(30), 8, 3);
    for (const auto &s : all)
    {
        const bool vis = s.anchor_slot >= 12 && s.anchor_slot - 7 <= 14;
        const bool rad = s.anchor_slot >= 25 && s.anchor_slot - 7 <= 25;
        EXPECT_EQ(sample_degraded(s, *back, Degradation::vision), vis);
        EXPECT_EQ(sample_degraded(s, *back, Degradation::radar), rad);
    }
    EXPECT_FALSE(load_slot_metadata(dir.path() / "nothing").has_value());
}
