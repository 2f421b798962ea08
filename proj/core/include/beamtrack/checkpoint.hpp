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

#ifndef BEAMTRACK_CHECKPOINT_HPP
#define BEAMTRACK_CHECKPOINT_HPP

#include "beamtrack/models.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>

namespace beamtrack::model
{
    inline constexpr int checkpoint_version = 1;

    // kind "model": trained weights. kind "oracle": a stub that predicts the ground-truth
    // labels, used to validate the evaluation path end to end.
    struct CheckpointMeta
    {
        std::string kind = "model";
        ModelSpec spec;
        std::uint64_t seed = 0;
        int epoch = -1;
        double validation_loss = std::numeric_limits<double>::quiet_NaN();
    };

    // Writes <dir>/meta.json and one array file per weight tensor under <dir>/weights.
    void save_checkpoint(const Model &model, const CheckpointMeta &meta, const std::filesystem::path &directory);
    void save_oracle_checkpoint(const ModelSpec &spec, const std::filesystem::path &directory);

    CheckpointMeta read_checkpoint_meta(const std::filesystem::path &directory);

    struct LoadedCheckpoint
    {
        CheckpointMeta meta;
        std::unique_ptr<Predictor> predictor;
        // Null for the oracle stub.
        const Model *model() const { return dynamic_cast<const Model *>(predictor.get()); }
    };

    LoadedCheckpoint load_checkpoint(const std::filesystem::path &directory);
    // Throws FormatError unless the checkpoint holds model weights.
    Model load_model(const std::filesystem::path &directory);

    class OracleStub : public Predictor
    {
    public:
        explicit OracleStub(const ModelSpec &spec) : spec_(spec) {}
        std::vector<BeamProbSeries> predict(std::span<const data::SequenceSample> samples) const override;
        std::string identity() const override { return "oracle"; }
        int num_beams() const override { return spec_.num_beams; }
        int horizon() const override { return spec_.horizon; }

    private:
        ModelSpec spec_;
    };
}

#endif
