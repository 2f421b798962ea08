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

#include "beamtrack/dataset_store.hpp"

#include "beamtrack/errors.hpp"
#include "beamtrack/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace beamtrack::data
{
    namespace fs = std::filesystem;

    namespace
    {
        std::vector<std::string> split_csv(const std::string &line)
        {
            std::vector<std::string> out;
            std::string field;
            std::istringstream is(line);
            while (std::getline(is, field, ','))
                out.push_back(field);
            if (!line.empty() && line.back() == ',')
                out.emplace_back();
            return out;
        }

        int parse_int(const std::string &s, const std::string &what)
        {
            std::size_t used = 0;
            int v = 0;
            try
            {
                v = std::stoi(s, &used);
            }
            catch (const std::exception &)
            {
                throw FormatError("cannot parse " + what + " from '" + s + "'");
            }
            if (used != s.size())
                throw FormatError("trailing characters in " + what + " '" + s + "'");
            return v;
        }

        std::string slot_name(const char *prefix, int slot, int duplicate)
        {
            char buf[64];
            if (duplicate == 0)
                std::snprintf(buf, sizeof buf, "%s/s%06d.arr", prefix, slot);
            else
                std::snprintf(buf, sizeof buf, "%s/s%06d_%d.arr", prefix, slot, duplicate);
            return buf;
        }

        // Assigns a relative file name to every distinct array; shared arrays are written once.
        class ArtifactWriter
        {
        public:
            ArtifactWriter(fs::path root, const char *prefix) : root_(std::move(root)), prefix_(prefix)
            {
                fs::create_directories(root_ / prefix_);
            }

            std::string put(const ArrayPtr &array, int slot)
            {
                if (!array)
                    throw Error("save_dataset: sample references a missing observation at slot " + std::to_string(slot));
                if (auto it = by_pointer_.find(array.get()); it != by_pointer_.end())
                    return it->second;
                int duplicate = 0;
                std::string name = slot_name(prefix_, slot, duplicate);
                while (used_.contains(name))
                    name = slot_name(prefix_, slot, ++duplicate);
                io::write_array(root_ / name, *array);
                used_.insert({name, array.get()});
                by_pointer_.insert({array.get(), name});
                return name;
            }

        private:
            fs::path root_;
            const char *prefix_;
            std::map<const io::NdArray *, std::string> by_pointer_;
            std::map<std::string, const io::NdArray *> used_;
        };
    }

    std::vector<SequenceSample> assemble_samples(std::span<const SlotArray> vision, std::span<const SlotArray> radar,
                                                 std::span<const SlotLabel> labels, int window, int horizon)
    {
        require_config(window >= 1, "dataset.window", "must be >= 1");
        require_config(horizon >= 0, "dataset.horizon", "must be >= 0");
        if (vision.size() != radar.size() || vision.size() != labels.size())
            throw AlignmentError("streams differ in length: vision " + std::to_string(vision.size()) + ", radar " +
                                 std::to_string(radar.size()) + ", labels " + std::to_string(labels.size()));
        const int total = static_cast<int>(vision.size());
        for (int i = 0; i < total; ++i)
        {
            const auto k = static_cast<std::size_t>(i);
            const int expected = vision.empty() ? 0 : vision[0].slot_index + i;
            if (vision[k].slot_index != expected || radar[k].slot_index != expected || labels[k].slot_index != expected)
                throw AlignmentError("streams misaligned at position " + std::to_string(i));
        }

        std::vector<SequenceSample> out;
        for (int t = window; t + horizon <= total - 1; ++t)
        {
            SequenceSample s;
            s.anchor_slot = vision[static_cast<std::size_t>(t)].slot_index;
            for (int tau = t - window + 1; tau <= t; ++tau)
            {
                const auto k = static_cast<std::size_t>(tau);
                if (!vision[k].array || !radar[k].array)
                    throw WindowingError("missing observation at slot " + std::to_string(vision[k].slot_index));
                s.vision.push_back(vision[k].array);
                s.radar.push_back(radar[k].array);
            }
            s.labels.anchor_slot = s.anchor_slot;
            for (int tau = t; tau <= t + horizon; ++tau)
                s.labels.b_star.push_back(labels[static_cast<std::size_t>(tau)].beam);
            out.push_back(std::move(s));
        }
        return out;
    }

    void SplitSpec::validate() const
    {
        require_config(train_fraction > 0.0 && train_fraction < 1.0, "dataset.train_fraction", "must lie in (0, 1)");
        require_config(block_length >= 1, "dataset.block_length", "must be >= 1");
    }

    SplitResult split(std::span<const SequenceSample> samples, const SplitSpec &spec)
    {
        spec.validate();
        const std::size_t n = samples.size();
        const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * spec.train_fraction));
        if (n < 2 || n_train == 0 || n_train == n)
            throw ConfigError("split of " + std::to_string(n) + " samples at fraction " + std::to_string(spec.train_fraction) +
                                  " leaves an empty side",
                              "dataset.train_fraction");

        std::vector<std::size_t> by_anchor(n);
        std::iota(by_anchor.begin(), by_anchor.end(), 0);
        std::stable_sort(by_anchor.begin(), by_anchor.end(),
                         [&](std::size_t a, std::size_t b) { return samples[a].anchor_slot < samples[b].anchor_slot; });

        Rng rng(mix_seed(spec.seed, 0x5B117ULL));
        auto shuffle = [&rng](auto &v) {
            for (std::size_t i = v.size(); i > 1; --i)
                std::swap(v[i - 1], v[uniform_index(rng, i)]);
        };

        std::vector<std::size_t> order;
        if (spec.mode == SplitMode::random)
        {
            order = by_anchor;
            shuffle(order);
        }
        else
        {
            std::vector<std::vector<std::size_t>> blocks;
            for (std::size_t i = 0; i < n; i += static_cast<std::size_t>(spec.block_length))
                blocks.emplace_back(by_anchor.begin() + static_cast<std::ptrdiff_t>(i),
                                    by_anchor.begin() + static_cast<std::ptrdiff_t>(std::min(n, i + static_cast<std::size_t>(spec.block_length))));
            shuffle(blocks);
            for (const auto &b : blocks)
                order.insert(order.end(), b.begin(), b.end());
        }

        std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
        std::vector<std::size_t> val_idx(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
        auto by_anchor_less = [&](std::size_t a, std::size_t b) {
            return samples[a].anchor_slot != samples[b].anchor_slot ? samples[a].anchor_slot < samples[b].anchor_slot : a < b;
        };
        std::sort(train_idx.begin(), train_idx.end(), by_anchor_less);
        std::sort(val_idx.begin(), val_idx.end(), by_anchor_less);

        SplitResult result;
        for (auto i : train_idx)
            result.train.push_back(samples[i]);
        for (auto i : val_idx)
            result.validation.push_back(samples[i]);
        return result;
    }

    DatasetStats class_histogram(std::span<const SequenceSample> samples, int num_beams)
    {
        require_config(num_beams >= 1, "scenario.codebook_size", "must be >= 1");
        if (samples.empty())
            throw Error("class_histogram: empty sample set");
        DatasetStats stats;
        stats.counts.assign(static_cast<std::size_t>(num_beams), 0);
        for (const auto &s : samples)
            for (int b : s.labels.b_star)
            {
                if (b < 1 || b > num_beams)
                    throw IndexError("label " + std::to_string(b) + " outside 1.." + std::to_string(num_beams));
                ++stats.counts[static_cast<std::size_t>(b - 1)];
                ++stats.total;
            }
        stats.alpha.resize(stats.counts.size());
        for (std::size_t c = 0; c < stats.counts.size(); ++c)
            stats.alpha[c] = static_cast<double>(stats.total) /
                             (static_cast<double>(num_beams) * static_cast<double>(std::max<long long>(stats.counts[c], 1)));
        return stats;
    }

    void save_dataset(std::span<const SequenceSample> samples, const DatasetInfo &info, const fs::path &directory)
    {
        fs::create_directories(directory);
        ArtifactWriter vision_writer(directory, "vision");
        ArtifactWriter radar_writer(directory, "radar");

        std::ofstream os(directory / "manifest.csv", std::ios::trunc);
        if (!os)
            throw Error("cannot write manifest in '" + directory.string() + "'");
        os << "# beamtrack-manifest version=" << manifest_version << " W=" << info.window << " J=" << info.horizon
           << " C=" << info.num_beams << "\n";
        os << "anchor_slot";
        for (int i = 0; i < info.window; ++i)
            os << ",vision_path_" << i;
        for (int i = 0; i < info.window; ++i)
            os << ",radar_path_" << i;
        for (int j = 0; j <= info.horizon; ++j)
            os << ",label_" << j;
        os << "\n";

        for (const auto &s : samples)
        {
            if (s.window() != info.window || static_cast<int>(s.radar.size()) != info.window || s.horizon() != info.horizon)
                throw ShapeError("save_dataset: sample at anchor " + std::to_string(s.anchor_slot) +
                                 " does not match W/J of the dataset header");
            os << s.anchor_slot;
            const int first = s.anchor_slot - info.window + 1;
            for (int i = 0; i < info.window; ++i)
                os << ',' << vision_writer.put(s.vision[static_cast<std::size_t>(i)], first + i);
            for (int i = 0; i < info.window; ++i)
                os << ',' << radar_writer.put(s.radar[static_cast<std::size_t>(i)], first + i);
            for (int b : s.labels.b_star)
                os << ',' << b;
            os << "\n";
        }
        if (!os)
            throw Error("failed writing manifest in '" + directory.string() + "'");
    }

    LoadedDataset load_dataset(const fs::path &directory)
    {
        const fs::path manifest = directory / "manifest.csv";
        std::ifstream is(manifest);
        if (!is)
            throw MissingArtifactError(manifest.string());

        std::string header;
        std::getline(is, header);
        LoadedDataset out;
        int version = -1;
        {
            std::istringstream hs(header);
            std::string tag, word;
            hs >> tag >> word;
            if (tag != "#" || word != "beamtrack-manifest")
                throw FormatError("'" + manifest.string() + "' is not a beamtrack manifest");
            while (hs >> word)
            {
                const auto eq = word.find('=');
                if (eq == std::string::npos)
                    throw FormatError("bad manifest header token '" + word + "'");
                const std::string key = word.substr(0, eq);
                const int value = parse_int(word.substr(eq + 1), "manifest header " + key);
                if (key == "version")
                    version = value;
                else if (key == "W")
                    out.info.window = value;
                else if (key == "J")
                    out.info.horizon = value;
                else if (key == "C")
                    out.info.num_beams = value;
                else
                    throw FormatError("unknown manifest header key '" + key + "'");
            }
        }
        if (version != manifest_version)
            throw FormatError("manifest version " + std::to_string(version) + " not supported (expected " +
                              std::to_string(manifest_version) + ")");

        const int w = out.info.window, j = out.info.horizon;
        const std::size_t columns = 1 + 2 * static_cast<std::size_t>(w) + static_cast<std::size_t>(j) + 1;
        std::string line;
        std::getline(is, line); // column names
        if (split_csv(line).size() != columns)
            throw FormatError("manifest column header does not match W/J");

        std::map<std::string, ArrayPtr> cache;
        auto load = [&](const std::string &rel) {
            if (auto it = cache.find(rel); it != cache.end())
                return it->second;
            const fs::path p = directory / rel;
            if (!fs::exists(p))
                throw MissingArtifactError(p.string());
            auto arr = std::make_shared<const io::NdArray>(io::read_array(p));
            cache.emplace(rel, arr);
            return ArrayPtr(arr);
        };

        int row = 0;
        while (std::getline(is, line))
        {
            ++row;
            if (line.empty())
                continue;
            const auto fields = split_csv(line);
            if (fields.size() != columns)
                throw FormatError("manifest row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                                  " columns, expected " + std::to_string(columns));
            SequenceSample s;
            s.anchor_slot = parse_int(fields[0], "anchor_slot");
            for (int i = 0; i < w; ++i)
                s.vision.push_back(load(fields[1 + static_cast<std::size_t>(i)]));
            for (int i = 0; i < w; ++i)
                s.radar.push_back(load(fields[1 + static_cast<std::size_t>(w + i)]));
            s.labels.anchor_slot = s.anchor_slot;
            for (int k = 0; k <= j; ++k)
            {
                const int b = parse_int(fields[1 + 2 * static_cast<std::size_t>(w) + static_cast<std::size_t>(k)], "label");
                if (b < 1 || b > out.info.num_beams)
                    throw FormatError("manifest row " + std::to_string(row) + " label " + std::to_string(b) + " outside 1.." +
                                      std::to_string(out.info.num_beams));
                s.labels.b_star.push_back(b);
            }
            out.samples.push_back(std::move(s));
        }
        return out;
    }

    void save_slot_metadata(std::span<const SlotMetadata> slots, const fs::path &directory)
    {
        fs::create_directories(directory);
        std::ofstream os(directory / "slots.csv", std::ios::trunc);
        os << "slot,azimuth,range,beam,vision_degraded,radar_degraded\n";
        os.precision(17);
        for (const auto &s : slots)
            os << s.slot_index << ',' << s.azimuth << ',' << s.range << ',' << s.beam << ',' << int(s.vision_degraded) << ','
               << int(s.radar_degraded) << "\n";
        if (!os)
            throw Error("failed writing slots.csv in '" + directory.string() + "'");
    }

    std::optional<std::vector<SlotMetadata>> load_slot_metadata(const fs::path &directory)
    {
        std::ifstream is(directory / "slots.csv");
        if (!is)
            return std::nullopt;
        std::string line;
        std::getline(is, line);
        std::vector<SlotMetadata> out;
        while (std::getline(is, line))
        {
            if (line.empty())
                continue;
            const auto f = split_csv(line);
            if (f.size() != 6)
                throw FormatError("slots.csv row has " + std::to_string(f.size()) + " columns, expected 6");
            SlotMetadata m;
            m.slot_index = parse_int(f[0], "slot");
            m.azimuth = std::stod(f[1]);
            m.range = std::stod(f[2]);
            m.beam = parse_int(f[3], "beam");
            m.vision_degraded = parse_int(f[4], "vision_degraded") != 0;
            m.radar_degraded = parse_int(f[5], "radar_degraded") != 0;
            out.push_back(m);
        }
        return out;
    }

    bool sample_degraded(const SequenceSample &sample, std::span<const SlotMetadata> slots, Degradation kind)
    {
        if (slots.empty())
            return false;
        const int base = slots.front().slot_index;
        for (int tau = sample.anchor_slot - sample.window() + 1; tau <= sample.anchor_slot; ++tau)
        {
            const int k = tau - base;
            if (k < 0 || k >= static_cast<int>(slots.size()))
                continue;
            const SlotMetadata &m = slots[static_cast<std::size_t>(k)];
            if (kind == Degradation::vision ? m.vision_degraded : m.radar_degraded)
                return true;
        }
        return false;
    }
}
