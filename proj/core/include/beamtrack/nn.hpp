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

#ifndef BEAMTRACK_NN_HPP
#define BEAMTRACK_NN_HPP

#include "beamtrack/random.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

// Minimal layer library with hand-written backward passes.
//
// Feature batches are column-per-item matrices (features x items). Image batches are
// row-major (channels x items*height*width) with item-major, row-major pixel order.
// Sequences are time-major: column tau * batch + b holds item b at step tau.
namespace beamtrack::nn
{
    using Mat = Eigen::MatrixXf;
    using RMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    struct Param
    {
        std::string name;
        Mat value;
        Mat grad;

        Param() = default;
        Param(std::string n, Eigen::Index rows, Eigen::Index cols);
        Eigen::Index size() const noexcept { return value.size(); }
    };

    // U(-bound, bound) with bound = 1 / sqrt(fan_in).
    void init_uniform_fan_in(Param &p, int fan_in, Rng &rng);
    void init_uniform(Param &p, float bound, Rng &rng);

    Mat relu(const Mat &x);
    RMat relu(const RMat &x);
    // dy masked by (out > 0).
    Mat relu_backward(const Mat &out, const Mat &dy);
    RMat relu_backward(const RMat &out, const RMat &dy);

    struct ImageDims
    {
        int channels = 1;
        int height = 1;
        int width = 1;
    };

    // 2-D convolution followed by ReLU. Depthwise-separable blocks apply a linear per-channel
    // kxk filter and then a 1x1 channel mixer (+ReLU).
    class ConvBlock
    {
    public:
        enum class Kind
        {
            standard,
            depthwise_separable
        };

        struct Cache
        {
            RMat cols;       // im2col of the input
            RMat depthwise;  // linear depthwise output (separable only)
            RMat out;        // block output after ReLU
            int items = 0;
        };

        ConvBlock(const std::string &name, Kind kind, ImageDims in, int out_channels, int kernel, int stride, int pad);

        RMat forward(const RMat &x, int items, Cache *cache) const;
        RMat backward(const Cache &cache, const RMat &dy, bool need_input_grad);

        ImageDims input_dims() const noexcept { return in_; }
        ImageDims output_dims() const noexcept { return out_; }
        Kind kind() const noexcept { return kind_; }
        void init(Rng &rng);
        std::vector<Param *> params();

    private:
        RMat im2col(const RMat &x, int items) const;
        RMat col2im(const RMat &cols, int items) const;

        Kind kind_;
        ImageDims in_;
        ImageDims out_;
        int kernel_, stride_, pad_;
        Param weight_; // standard: out x (in*k*k); separable: in x (k*k) depthwise
        Param bias_;
        Param pointwise_weight_; // separable only: out x in
        Param pointwise_bias_;
    };

    // Average pool to a grid x grid layout, flattened per item to (C*grid*grid) x items.
    class GridPool
    {
    public:
        GridPool(ImageDims in, int grid);
        Mat forward(const RMat &x, int items) const;
        RMat backward(const Mat &dy, int items) const;
        int output_features() const noexcept { return in_.channels * grid_ * grid_; }

    private:
        ImageDims in_;
        int grid_;
    };

    class Linear
    {
    public:
        struct Cache
        {
            Mat x;
        };

        Linear(const std::string &name, int in_features, int out_features);
        Mat forward(const Mat &x, Cache *cache) const;
        Mat backward(const Cache &cache, const Mat &dy, bool need_input_grad);
        void init(Rng &rng);
        std::vector<Param *> params();
        int in_features() const noexcept { return static_cast<int>(weight_.value.cols()); }
        int out_features() const noexcept { return static_cast<int>(weight_.value.rows()); }

    private:
        Param weight_;
        Param bias_;
    };

    // Single GRU layer (reset/update/new gate order r, z, n) over a time-major sequence.
    class GruLayer
    {
    public:
        struct Cache
        {
            Mat x;
            Mat h_prev; // H x steps*batch: state entering each step
            Mat r, z, n;
            Mat hn;     // W_hn h_prev + b_hn
            int steps = 0;
            int batch = 0;
        };

        GruLayer(const std::string &name, int input_size, int hidden_size);
        Mat forward(const Mat &x, int steps, int batch, Cache *cache) const;
        Mat backward(const Cache &cache, const Mat &dy, bool need_input_grad);
        void init(Rng &rng);
        std::vector<Param *> params();
        int hidden_size() const noexcept { return hidden_; }

    private:
        int hidden_;
        Param w_ih_, w_hh_, b_ih_, b_hh_;
    };

    // Multi-head attention with `num_queries` learned queries attending over the steps of
    // each item; output columns are query-major (j * batch + b).
    class QueryAttention
    {
    public:
        struct Cache
        {
            Mat x;
            Mat q, k, v;
            std::vector<Mat> attention; // per (b, head): queries x steps
            Mat concat;
            int steps = 0;
            int batch = 0;
        };

        QueryAttention(const std::string &name, int model_dim, int heads, int num_queries);
        Mat forward(const Mat &x, int steps, int batch, Cache *cache) const;
        Mat backward(const Cache &cache, const Mat &dy);
        void init(Rng &rng);
        std::vector<Param *> params();
        int num_queries() const noexcept { return static_cast<int>(queries_.value.cols()); }

    private:
        int dim_;
        int heads_;
        Param queries_;
        Param wq_, bq_, wk_, bk_, wv_, bv_, wo_, bo_;
    };
}

#endif
