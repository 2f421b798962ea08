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

#ifndef BEAMTRACK_MODELS_HPP
#define BEAMTRACK_MODELS_HPP

#include "beamtrack/beam_geometry.hpp"
#include "beamtrack/dataset_store.hpp"
#include "beamtrack/nn.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace beamtrack::model
{
    enum class Role
    {
        teacher,
        student
    };

    enum class ConvKind
    {
        standard,
        depthwise_separable
    };

    struct ModalityMask
    {
        bool vision = true;
        bool radar = true;
        bool operator==(const ModalityMask &) const = default;
    };

    // Architecture description. Each modality branch is a stack of stride-2 conv blocks,
    // a pool to a pool_grid x pool_grid layout and a linear projection (D0 / D1). The
    // fused D-dimensional sequence runs through a GRU and J+1 learned attention queries.
    struct ModelSpec
    {
        Role role = Role::teacher;
        std::vector<int> vision_channels{16, 32, 64};
        std::vector<int> radar_channels{16, 32, 64};
        ConvKind conv_kind = ConvKind::standard;
        int kernel = 3;
        int pool_grid = 4;
        int d0 = 128;
        int d1 = 128;
        int d = 256;
        int gru_layers = 2;
        int gru_hidden = 256;
        int mha_heads = 4;
        int classifier_hidden = 256;
        int window = 8;      // W
        int horizon = 3;     // J
        int num_beams = 32;  // C
        int input_height = 64;
        int input_width = 64;
        ModalityMask modality;

        void validate(const std::string &path = "model") const;
        bool operator==(const ModelSpec &) const = default;
    };

    ModelSpec default_teacher_spec();
    ModelSpec default_student_spec();

    nlohmann::json spec_to_json(const ModelSpec &spec);
    // Rejects unknown keys; error fields are reported under `path`.
    ModelSpec spec_from_json(const nlohmann::json &j, const std::string &path, ModelSpec base = {});

    const char *role_name(Role role);
    const char *conv_kind_name(ConvKind kind);

    // Per-sample output: (J+1) x C logits and row-normalized probabilities.
    struct BeamProbSeries
    {
        Eigen::MatrixXd logits;
        Eigen::MatrixXd probs;

        int slots() const noexcept { return static_cast<int>(logits.rows()); }
        int num_beams() const noexcept { return static_cast<int>(logits.cols()); }
    };

    // p_c = exp(z_c / temperature) / sum_j exp(z_j / temperature).
    Eigen::RowVectorXd tempered_softmax(const Eigen::RowVectorXd &logits, double temperature);
    Eigen::MatrixXd tempered_softmax_rows(const Eigen::MatrixXd &logits, double temperature);

    BeamProbSeries make_series(Eigen::MatrixXd logits);

    // A mini-batch in network layout. Images are stored time-major: item tau * B + b.
    struct Batch
    {
        int items = 0;  // B
        int window = 0; // W
        nn::RMat vision; // 1 x (W*B*h*w); empty when vision is masked off
        nn::RMat radar;  // 2 x (W*B*h*w); empty when radar is masked off
    };

    Batch make_batch(std::span<const data::SequenceSample> samples, const ModelSpec &spec);
    Batch make_batch(std::span<const data::SequenceSample *const> samples, const ModelSpec &spec);

    struct BlockCount
    {
        std::string name;
        long long params = 0;
        long long flops = 0;
    };

    // FLOPs are per sample (one forward pass over W slots); one multiply-accumulate = 2 FLOPs.
    struct ComplexityReport
    {
        long long param_count = 0;
        long long flop_count = 0;
        std::vector<BlockCount> breakdown;
    };

    ComplexityReport complexity(const ModelSpec &spec);
    long long count_params(const ModelSpec &spec);
    long long count_flops(const ModelSpec &spec);

    // Anything that maps samples to beam probability series.
    class Predictor
    {
    public:
        virtual ~Predictor() = default;
        virtual std::vector<BeamProbSeries> predict(std::span<const data::SequenceSample> samples) const = 0;
        virtual std::string identity() const = 0;
        virtual int num_beams() const = 0;
        virtual int horizon() const = 0;
    };

    class Model : public Predictor
    {
    public:
        struct Branch
        {
            std::vector<nn::ConvBlock> convs;
            nn::GridPool pool;
            nn::Linear projection;
        };

        struct BranchCache
        {
            std::vector<nn::ConvBlock::Cache> convs;
            nn::Linear::Cache projection;
        };

        struct Cache
        {
            int items = 0;
            BranchCache vision, radar;
            nn::Linear::Cache fusion;
            nn::Mat fused;
            std::vector<nn::GruLayer::Cache> gru;
            nn::QueryAttention::Cache attention;
            nn::Linear::Cache classifier_hidden;
            nn::Mat hidden;
            nn::Linear::Cache classifier_out;
        };

        Model(const ModelSpec &spec, std::uint64_t seed);

        const ModelSpec &spec() const noexcept { return spec_; }

        // Logits C x ((J+1)*B); column j * B + b is slot j of item b.
        nn::Mat forward(const Batch &batch, Cache *cache = nullptr) const;
        // Accumulates parameter gradients for d(loss)/d(logits).
        void backward(const Cache &cache, const nn::Mat &dlogits);

        std::vector<nn::Param *> parameters();
        std::vector<const nn::Param *> parameters() const;
        long long parameter_count() const;
        void zero_grad();

        std::vector<nn::Mat> state() const;
        void load_state(const std::vector<nn::Mat> &weights);

        // (J+1) x C logits per sample, in sample order.
        std::vector<Eigen::MatrixXd> logits(std::span<const data::SequenceSample> samples, int batch_size = 64) const;
        std::vector<BeamProbSeries> predict(std::span<const data::SequenceSample> samples) const override;
        BeamProbSeries predict(const data::SequenceSample &sample) const;
        std::string identity() const override;
        int num_beams() const override { return spec_.num_beams; }
        int horizon() const override { return spec_.horizon; }

    private:
        static Branch build_branch(const std::string &name, const ModelSpec &spec, int in_channels,
                                   const std::vector<int> &widths, int out_dim);
        nn::Mat branch_forward(const Branch &branch, const nn::RMat &images, int items, BranchCache *cache) const;
        void branch_backward(Branch &branch, const BranchCache &cache, const nn::Mat &dy, int items);

        ModelSpec spec_;
        std::optional<Branch> vision_;
        std::optional<Branch> radar_;
        nn::Linear fusion_;
        std::vector<nn::GruLayer> gru_;
        nn::QueryAttention attention_;
        nn::Linear classifier_hidden_;
        nn::Linear classifier_out_;
    };

    // Reshapes network logits (C x (J+1)*B) into one (J+1) x C matrix per item.
    std::vector<Eigen::MatrixXd> split_logits(const nn::Mat &logits, int items, int slots);
}

#endif
