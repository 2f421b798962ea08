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

#include "beamtrack/checkpoint.hpp"

#include "beamtrack/array_container.hpp"
#include "beamtrack/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace beamtrack::model
{
    namespace fs = std::filesystem;

    namespace
    {
        constexpr const char *format_tag = "beamtrack-checkpoint";

        std::string weight_file(std::size_t index, const std::string &name)
        {
            char prefix[16];
            std::snprintf(prefix, sizeof prefix, "%03zu_", index);
            return std::string("weights/") + prefix + name + ".arr";
        }

        nlohmann::json meta_json(const CheckpointMeta &meta)
        {
            nlohmann::json j{{"format", format_tag},
                             {"version", checkpoint_version},
                             {"kind", meta.kind},
                             {"spec", spec_to_json(meta.spec)},
                             {"seed", meta.seed},
                             {"epoch", meta.epoch}};
            if (std::isfinite(meta.validation_loss))
                j["validation_loss"] = meta.validation_loss;
            else
                j["validation_loss"] = nullptr;
            return j;
        }

        void write_meta(const nlohmann::json &j, const fs::path &directory)
        {
            std::ofstream out(directory / "meta.json", std::ios::trunc);
            if (!out)
                throw MissingArtifactError((directory / "meta.json").string());
            out << j.dump(2) << '\n';
        }

        nlohmann::json read_meta_json(const fs::path &directory)
        {
            const fs::path path = directory / "meta.json";
            std::ifstream in(path);
            if (!in)
                throw MissingArtifactError(path.string());
            try
            {
                return nlohmann::json::parse(in);
            }
            catch (const nlohmann::json::exception &e)
            {
                throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
            }
        }
    }

    void save_checkpoint(const Model &model, const CheckpointMeta &meta_in, const fs::path &directory)
    {
        CheckpointMeta meta = meta_in;
        meta.kind = "model";
        meta.spec = model.spec();
        fs::create_directories(directory / "weights");
        nlohmann::json j = meta_json(meta);
        nlohmann::json list = nlohmann::json::array();
        const auto params = model.parameters();
        for (std::size_t i = 0; i < params.size(); ++i)
        {
            const std::string file = weight_file(i, params[i]->name);
            io::write_array(directory / file, io::NdArray::from_matrix(params[i]->value));
            list.push_back({{"name", params[i]->name}, {"file", file}});
        }
        j["weights"] = list;
        write_meta(j, directory);
    }

    void save_oracle_checkpoint(const ModelSpec &spec, const fs::path &directory)
    {
        fs::create_directories(directory);
        CheckpointMeta meta;
        meta.kind = "oracle";
        meta.spec = spec;
        write_meta(meta_json(meta), directory);
    }

    CheckpointMeta read_checkpoint_meta(const fs::path &directory)
    {
        const nlohmann::json j = read_meta_json(directory);
        try
        {
            if (j.at("format").get<std::string>() != format_tag)
                throw FormatError("'" + directory.string() + "' is not a checkpoint");
            if (j.at("version").get<int>() != checkpoint_version)
                throw FormatError("unsupported checkpoint version " + j.at("version").dump());
            CheckpointMeta meta;
            meta.kind = j.at("kind").get<std::string>();
            if (meta.kind != "model" && meta.kind != "oracle")
                throw FormatError("unknown checkpoint kind '" + meta.kind + "'");
            meta.spec = spec_from_json(j.at("spec"), "checkpoint.spec");
            meta.seed = j.at("seed").get<std::uint64_t>();
            meta.epoch = j.at("epoch").get<int>();
            const auto &v = j.at("validation_loss");
            meta.validation_loss = v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
            return meta;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw FormatError("malformed checkpoint metadata in '" + directory.string() + "': " + e.what());
        }
        catch (const ConfigError &e)
        {
            throw FormatError("invalid model spec in checkpoint '" + directory.string() + "': " + e.what());
        }
    }

    Model load_model(const fs::path &directory)
    {
        const CheckpointMeta meta = read_checkpoint_meta(directory);
        if (meta.kind != "model")
            throw FormatError("checkpoint '" + directory.string() + "' holds no model weights");
        const nlohmann::json j = read_meta_json(directory);
        Model model(meta.spec, meta.seed);
        auto params = model.parameters();
        const auto &list = j.at("weights");
        if (!list.is_array() || list.size() != params.size())
            throw FormatError("checkpoint '" + directory.string() + "' weight list does not match its spec");
        for (std::size_t i = 0; i < params.size(); ++i)
        {
            const auto &entry = list[i];
            if (entry.at("name").get<std::string>() != params[i]->name)
                throw FormatError("weight " + std::to_string(i) + " is '" + entry.at("name").get<std::string>() +
                                  "', expected '" + params[i]->name + "'");
            const io::NdArray a = io::read_array(directory / entry.at("file").get<std::string>());
            const auto rows = static_cast<std::uint64_t>(params[i]->value.rows());
            const auto cols = static_cast<std::uint64_t>(params[i]->value.cols());
            if (a.dims.size() != 2 || a.dims[0] != rows || a.dims[1] != cols)
                throw FormatError("weight '" + params[i]->name + "' has the wrong shape");
            params[i]->value = Eigen::Map<const nn::RMat>(a.data.data(), params[i]->value.rows(), params[i]->value.cols());
        }
        return model;
    }

    LoadedCheckpoint load_checkpoint(const fs::path &directory)
    {
        LoadedCheckpoint out;
        out.meta = read_checkpoint_meta(directory);
        if (out.meta.kind == "oracle")
            out.predictor = std::make_unique<OracleStub>(out.meta.spec);
        else
            out.predictor = std::make_unique<Model>(load_model(directory));
        return out;
    }

    std::vector<BeamProbSeries> OracleStub::predict(std::span<const data::SequenceSample> samples) const
    {
        std::vector<BeamProbSeries> out;
        out.reserve(samples.size());
        for (const auto &s : samples)
        {
            if (s.horizon() != spec_.horizon)
                throw ShapeError("sample horizon does not match the checkpoint");
            Eigen::MatrixXd logits = Eigen::MatrixXd::Zero(spec_.horizon + 1, spec_.num_beams);
            for (int j = 0; j <= spec_.horizon; ++j)
            {
                const int b = s.labels.b_star[static_cast<std::size_t>(j)];
                if (b < 1 || b > spec_.num_beams)
                    throw IndexError("label outside the codebook");
                logits(j, b - 1) = 50.0;
            }
            out.push_back(make_series(std::move(logits)));
        }
        return out;
    }
}
