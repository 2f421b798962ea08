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

#include "beamtrack/nn.hpp"

#include "beamtrack/errors.hpp"

#include <cmath>
#include <string>

namespace beamtrack::nn
{
    namespace
    {
        Mat sigmoid(const Mat &x) { return (1.0f / (1.0f + (-x.array()).exp())).matrix(); }

        // Row-wise softmax with max subtraction.
        Mat softmax_rows(const Mat &s)
        {
            Mat out(s.rows(), s.cols());
            for (Eigen::Index r = 0; r < s.rows(); ++r)
            {
                const float m = s.row(r).maxCoeff();
                out.row(r) = (s.row(r).array() - m).exp().matrix();
                out.row(r) /= out.row(r).sum();
            }
            return out;
        }
    }

    Param::Param(std::string n, Eigen::Index rows, Eigen::Index cols)
        : name(std::move(n)), value(Mat::Zero(rows, cols)), grad(Mat::Zero(rows, cols))
    {
    }

    void init_uniform(Param &p, float bound, Rng &rng)
    {
        for (Eigen::Index i = 0; i < p.value.size(); ++i)
            p.value.data()[i] = static_cast<float>(uniform(rng, -bound, bound));
    }

    void init_uniform_fan_in(Param &p, int fan_in, Rng &rng)
    {
        init_uniform(p, 1.0f / std::sqrt(static_cast<float>(fan_in)), rng);
    }

    Mat relu(const Mat &x) { return x.cwiseMax(0.0f); }
    RMat relu(const RMat &x) { return x.cwiseMax(0.0f); }

    Mat relu_backward(const Mat &out, const Mat &dy) { return (out.array() > 0.0f).select(dy, 0.0f); }
    RMat relu_backward(const RMat &out, const RMat &dy) { return (out.array() > 0.0f).select(dy, 0.0f); }

    // ------------------------------------------------------------------ ConvBlock

    ConvBlock::ConvBlock(const std::string &name, Kind kind, ImageDims in, int out_channels, int kernel, int stride, int pad)
        : kind_(kind), in_(in), kernel_(kernel), stride_(stride), pad_(pad)
    {
        if (kernel < 1 || stride < 1 || pad < 0 || out_channels < 1 || in.channels < 1)
            throw ConfigError("invalid convolution geometry", "model." + name);
        out_.channels = out_channels;
        out_.height = (in.height + 2 * pad - kernel) / stride + 1;
        out_.width = (in.width + 2 * pad - kernel) / stride + 1;
        if (out_.height < 1 || out_.width < 1)
            throw ConfigError("input " + std::to_string(in.height) + "x" + std::to_string(in.width) +
                                  " too small for the convolution stack",
                              "model." + name);
        const int kk = kernel * kernel;
        if (kind == Kind::standard)
        {
            weight_ = Param(name + ".weight", out_channels, in.channels * kk);
            bias_ = Param(name + ".bias", out_channels, 1);
        }
        else
        {
            weight_ = Param(name + ".depthwise.weight", in.channels, kk);
            bias_ = Param(name + ".depthwise.bias", in.channels, 1);
            pointwise_weight_ = Param(name + ".pointwise.weight", out_channels, in.channels);
            pointwise_bias_ = Param(name + ".pointwise.bias", out_channels, 1);
        }
    }

    void ConvBlock::init(Rng &rng)
    {
        const int kk = kernel_ * kernel_;
        if (kind_ == Kind::standard)
            init_uniform_fan_in(weight_, in_.channels * kk, rng);
        else
        {
            init_uniform_fan_in(weight_, kk, rng);
            init_uniform_fan_in(pointwise_weight_, in_.channels, rng);
        }
    }

    std::vector<Param *> ConvBlock::params()
    {
        if (kind_ == Kind::standard)
            return {&weight_, &bias_};
        return {&weight_, &bias_, &pointwise_weight_, &pointwise_bias_};
    }

    RMat ConvBlock::im2col(const RMat &x, int items) const
    {
        const int k = kernel_;
        const int in_plane = in_.height * in_.width;
        const int out_plane = out_.height * out_.width;
        RMat cols(in_.channels * k * k, static_cast<Eigen::Index>(items) * out_plane);
        for (int c = 0; c < in_.channels; ++c)
        {
            const float *src_row = x.row(c).data();
            for (int ky = 0; ky < k; ++ky)
                for (int kx = 0; kx < k; ++kx)
                {
                    float *dst = cols.row((c * k + ky) * k + kx).data();
                    for (int n = 0; n < items; ++n)
                    {
                        const float *src = src_row + static_cast<std::ptrdiff_t>(n) * in_plane;
                        float *out = dst + static_cast<std::ptrdiff_t>(n) * out_plane;
                        for (int oy = 0; oy < out_.height; ++oy)
                        {
                            const int iy = oy * stride_ - pad_ + ky;
                            float *out_row = out + oy * out_.width;
                            if (iy < 0 || iy >= in_.height)
                            {
                                std::fill(out_row, out_row + out_.width, 0.0f);
                                continue;
                            }
                            const float *in_row = src + iy * in_.width;
                            for (int ox = 0; ox < out_.width; ++ox)
                            {
                                const int ix = ox * stride_ - pad_ + kx;
                                out_row[ox] = (ix >= 0 && ix < in_.width) ? in_row[ix] : 0.0f;
                            }
                        }
                    }
                }
        }
        return cols;
    }

    RMat ConvBlock::col2im(const RMat &cols, int items) const
    {
        const int k = kernel_;
        const int in_plane = in_.height * in_.width;
        const int out_plane = out_.height * out_.width;
        RMat x = RMat::Zero(in_.channels, static_cast<Eigen::Index>(items) * in_plane);
        for (int c = 0; c < in_.channels; ++c)
        {
            float *dst_row = x.row(c).data();
            for (int ky = 0; ky < k; ++ky)
                for (int kx = 0; kx < k; ++kx)
                {
                    const float *src = cols.row((c * k + ky) * k + kx).data();
                    for (int n = 0; n < items; ++n)
                    {
                        float *dst = dst_row + static_cast<std::ptrdiff_t>(n) * in_plane;
                        const float *in = src + static_cast<std::ptrdiff_t>(n) * out_plane;
                        for (int oy = 0; oy < out_.height; ++oy)
                        {
                            const int iy = oy * stride_ - pad_ + ky;
                            if (iy < 0 || iy >= in_.height)
                                continue;
                            float *dst_line = dst + iy * in_.width;
                            const float *in_row = in + oy * out_.width;
                            for (int ox = 0; ox < out_.width; ++ox)
                            {
                                const int ix = ox * stride_ - pad_ + kx;
                                if (ix >= 0 && ix < in_.width)
                                    dst_line[ix] += in_row[ox];
                            }
                        }
                    }
                }
        }
        return x;
    }

    RMat ConvBlock::forward(const RMat &x, int items, Cache *cache) const
    {
        if (x.rows() != in_.channels || x.cols() != static_cast<Eigen::Index>(items) * in_.height * in_.width)
            throw ShapeError("conv input is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) + ", expected " +
                             std::to_string(in_.channels) + "x" + std::to_string(items * in_.height * in_.width));
        RMat cols = im2col(x, items);
        RMat out;
        if (kind_ == Kind::standard)
        {
            out.noalias() = weight_.value * cols;
            out.colwise() += bias_.value.col(0);
            out = relu(out);
        }
        else
        {
            const int kk = kernel_ * kernel_;
            RMat dw(in_.channels, cols.cols());
            for (int c = 0; c < in_.channels; ++c)
                dw.row(c).noalias() = weight_.value.row(c) * cols.middleRows(c * kk, kk);
            dw.colwise() += bias_.value.col(0);
            out.noalias() = pointwise_weight_.value * dw;
            out.colwise() += pointwise_bias_.value.col(0);
            out = relu(out);
            if (cache)
                cache->depthwise = std::move(dw);
        }
        if (cache)
        {
            cache->cols = std::move(cols);
            cache->out = out;
            cache->items = items;
        }
        return out;
    }

    RMat ConvBlock::backward(const Cache &cache, const RMat &dy, bool need_input_grad)
    {
        const RMat dpre = relu_backward(cache.out, dy);
        RMat dcols;
        if (kind_ == Kind::standard)
        {
            weight_.grad.noalias() += dpre * cache.cols.transpose();
            bias_.grad.col(0) += dpre.rowwise().sum();
            if (need_input_grad)
                dcols.noalias() = weight_.value.transpose() * dpre;
        }
        else
        {
            const int kk = kernel_ * kernel_;
            pointwise_weight_.grad.noalias() += dpre * cache.depthwise.transpose();
            pointwise_bias_.grad.col(0) += dpre.rowwise().sum();
            const RMat ddw = pointwise_weight_.value.transpose() * dpre;
            if (need_input_grad)
                dcols.resize(cache.cols.rows(), cache.cols.cols());
            for (int c = 0; c < in_.channels; ++c)
            {
                weight_.grad.row(c).noalias() += ddw.row(c) * cache.cols.middleRows(c * kk, kk).transpose();
                bias_.grad(c, 0) += ddw.row(c).sum();
                if (need_input_grad)
                    dcols.middleRows(c * kk, kk).noalias() = weight_.value.row(c).transpose() * ddw.row(c);
            }
        }
        if (!need_input_grad)
            return {};
        return col2im(dcols, cache.items);
    }

    // ------------------------------------------------------------------ GridPool

    GridPool::GridPool(ImageDims in, int grid) : in_(in), grid_(grid)
    {
        if (grid < 1 || in.height % grid != 0 || in.width % grid != 0)
            throw ConfigError("pool grid " + std::to_string(grid) + " must divide the final feature map " +
                                  std::to_string(in.height) + "x" + std::to_string(in.width),
                              "model.pool_grid");
    }

    Mat GridPool::forward(const RMat &x, int items) const
    {
        const int bh = in_.height / grid_, bw = in_.width / grid_;
        const int plane = in_.height * in_.width;
        const float scale = 1.0f / static_cast<float>(bh * bw);
        Mat out = Mat::Zero(output_features(), items);
        for (int c = 0; c < in_.channels; ++c)
            for (int n = 0; n < items; ++n)
            {
                const float *src = x.row(c).data() + static_cast<std::ptrdiff_t>(n) * plane;
                for (int y = 0; y < in_.height; ++y)
                    for (int xx = 0; xx < in_.width; ++xx)
                        out(c * grid_ * grid_ + (y / bh) * grid_ + xx / bw, n) += src[y * in_.width + xx];
            }
        return out * scale;
    }

    RMat GridPool::backward(const Mat &dy, int items) const
    {
        const int bh = in_.height / grid_, bw = in_.width / grid_;
        const int plane = in_.height * in_.width;
        const float scale = 1.0f / static_cast<float>(bh * bw);
        RMat dx(in_.channels, static_cast<Eigen::Index>(items) * plane);
        for (int c = 0; c < in_.channels; ++c)
            for (int n = 0; n < items; ++n)
            {
                float *dst = dx.row(c).data() + static_cast<std::ptrdiff_t>(n) * plane;
                for (int y = 0; y < in_.height; ++y)
                    for (int xx = 0; xx < in_.width; ++xx)
                        dst[y * in_.width + xx] = dy(c * grid_ * grid_ + (y / bh) * grid_ + xx / bw, n) * scale;
            }
        return dx;
    }

    // ------------------------------------------------------------------ Linear

    Linear::Linear(const std::string &name, int in_features, int out_features)
        : weight_(name + ".weight", out_features, in_features), bias_(name + ".bias", out_features, 1)
    {
    }

    void Linear::init(Rng &rng) { init_uniform_fan_in(weight_, in_features(), rng); }

    std::vector<Param *> Linear::params() { return {&weight_, &bias_}; }

    Mat Linear::forward(const Mat &x, Cache *cache) const
    {
        if (x.rows() != in_features())
            throw ShapeError(weight_.name + ": input has " + std::to_string(x.rows()) + " features, expected " +
                             std::to_string(in_features()));
        Mat y = weight_.value * x;
        y.colwise() += bias_.value.col(0);
        if (cache)
            cache->x = x;
        return y;
    }

    Mat Linear::backward(const Cache &cache, const Mat &dy, bool need_input_grad)
    {
        weight_.grad.noalias() += dy * cache.x.transpose();
        bias_.grad.col(0) += dy.rowwise().sum();
        if (!need_input_grad)
            return {};
        return weight_.value.transpose() * dy;
    }

    // ------------------------------------------------------------------ GruLayer

    GruLayer::GruLayer(const std::string &name, int input_size, int hidden_size)
        : hidden_(hidden_size), w_ih_(name + ".w_ih", 3 * hidden_size, input_size),
          w_hh_(name + ".w_hh", 3 * hidden_size, hidden_size), b_ih_(name + ".b_ih", 3 * hidden_size, 1),
          b_hh_(name + ".b_hh", 3 * hidden_size, 1)
    {
    }

    void GruLayer::init(Rng &rng)
    {
        init_uniform_fan_in(w_ih_, hidden_, rng);
        init_uniform_fan_in(w_hh_, hidden_, rng);
    }

    std::vector<Param *> GruLayer::params() { return {&w_ih_, &w_hh_, &b_ih_, &b_hh_}; }

    Mat GruLayer::forward(const Mat &x, int steps, int batch, Cache *cache) const
    {
        const int h = hidden_;
        if (x.rows() != w_ih_.value.cols() || x.cols() != static_cast<Eigen::Index>(steps) * batch)
            throw ShapeError(w_ih_.name + ": sequence input has wrong shape");
        Mat gi = w_ih_.value * x;
        gi.colwise() += b_ih_.value.col(0);

        Mat out(h, x.cols());
        Mat state = Mat::Zero(h, batch);
        if (cache)
        {
            cache->x = x;
            cache->h_prev.resize(h, x.cols());
            cache->r.resize(h, x.cols());
            cache->z.resize(h, x.cols());
            cache->n.resize(h, x.cols());
            cache->hn.resize(h, x.cols());
            cache->steps = steps;
            cache->batch = batch;
        }
        Mat gh(3 * h, batch);
        for (int t = 0; t < steps; ++t)
        {
            const Eigen::Index c0 = static_cast<Eigen::Index>(t) * batch;
            gh.noalias() = w_hh_.value * state;
            gh.colwise() += b_hh_.value.col(0);
            const Mat r = sigmoid(gi.block(0, c0, h, batch) + gh.topRows(h));
            const Mat z = sigmoid(gi.block(h, c0, h, batch) + gh.middleRows(h, h));
            const Mat hn = gh.bottomRows(h);
            const Mat n = (gi.block(2 * h, c0, h, batch).array() + r.array() * hn.array()).tanh().matrix();
            if (cache)
            {
                cache->h_prev.middleCols(c0, batch) = state;
                cache->r.middleCols(c0, batch) = r;
                cache->z.middleCols(c0, batch) = z;
                cache->n.middleCols(c0, batch) = n;
                cache->hn.middleCols(c0, batch) = hn;
            }
            state = ((1.0f - z.array()) * n.array() + z.array() * state.array()).matrix();
            out.middleCols(c0, batch) = state;
        }
        return out;
    }

    Mat GruLayer::backward(const Cache &cache, const Mat &dy, bool need_input_grad)
    {
        const int h = hidden_;
        const int batch = cache.batch;
        Mat dgi(3 * h, dy.cols());
        Mat dgh(3 * h, dy.cols());
        Mat dh_next = Mat::Zero(h, batch);
        for (int t = cache.steps - 1; t >= 0; --t)
        {
            const Eigen::Index c0 = static_cast<Eigen::Index>(t) * batch;
            const auto r = cache.r.middleCols(c0, batch).array();
            const auto z = cache.z.middleCols(c0, batch).array();
            const auto n = cache.n.middleCols(c0, batch).array();
            const auto hp = cache.h_prev.middleCols(c0, batch).array();
            const auto hn = cache.hn.middleCols(c0, batch).array();

            const Mat dh = dy.middleCols(c0, batch) + dh_next;
            const auto dha = dh.array();
            const Eigen::ArrayXXf dn_pre = dha * (1.0f - z) * (1.0f - n * n);
            const Eigen::ArrayXXf dz_pre = dha * (hp - n) * z * (1.0f - z);
            const Eigen::ArrayXXf dr_pre = dn_pre * hn * r * (1.0f - r);

            dgi.block(0, c0, h, batch) = dr_pre.matrix();
            dgi.block(h, c0, h, batch) = dz_pre.matrix();
            dgi.block(2 * h, c0, h, batch) = dn_pre.matrix();
            dgh.block(0, c0, h, batch) = dr_pre.matrix();
            dgh.block(h, c0, h, batch) = dz_pre.matrix();
            dgh.block(2 * h, c0, h, batch) = (dn_pre * r).matrix();

            dh_next = (dha * z).matrix();
            dh_next.noalias() += w_hh_.value.transpose() * dgh.middleCols(c0, batch);
        }
        w_hh_.grad.noalias() += dgh * cache.h_prev.transpose();
        b_hh_.grad.col(0) += dgh.rowwise().sum();
        w_ih_.grad.noalias() += dgi * cache.x.transpose();
        b_ih_.grad.col(0) += dgi.rowwise().sum();
        if (!need_input_grad)
            return {};
        return w_ih_.value.transpose() * dgi;
    }

    // ------------------------------------------------------------------ QueryAttention

    QueryAttention::QueryAttention(const std::string &name, int model_dim, int heads, int num_queries)
        : dim_(model_dim), heads_(heads), queries_(name + ".queries", model_dim, num_queries),
          wq_(name + ".wq", model_dim, model_dim), bq_(name + ".bq", model_dim, 1), wk_(name + ".wk", model_dim, model_dim),
          bk_(name + ".bk", model_dim, 1), wv_(name + ".wv", model_dim, model_dim), bv_(name + ".bv", model_dim, 1),
          wo_(name + ".wo", model_dim, model_dim), bo_(name + ".bo", model_dim, 1)
    {
        if (heads < 1 || model_dim % heads != 0)
            throw ConfigError("attention heads must divide the model dimension", "model.mha_heads");
    }

    void QueryAttention::init(Rng &rng)
    {
        init_uniform(queries_, 1.0f, rng);
        for (Param *p : {&wq_, &wk_, &wv_, &wo_})
            init_uniform_fan_in(*p, dim_, rng);
    }

    std::vector<Param *> QueryAttention::params() { return {&queries_, &wq_, &bq_, &wk_, &bk_, &wv_, &bv_, &wo_, &bo_}; }

    Mat QueryAttention::forward(const Mat &x, int steps, int batch, Cache *cache) const
    {
        if (x.rows() != dim_ || x.cols() != static_cast<Eigen::Index>(steps) * batch)
            throw ShapeError(wq_.name + ": attention input has wrong shape");
        const int dk = dim_ / heads_;
        const int nq = num_queries();
        const float scale = 1.0f / std::sqrt(static_cast<float>(dk));

        Mat q = wq_.value * queries_.value;
        q.colwise() += bq_.value.col(0);
        Mat k = wk_.value * x;
        k.colwise() += bk_.value.col(0);
        Mat v = wv_.value * x;
        v.colwise() += bv_.value.col(0);

        Mat concat(dim_, static_cast<Eigen::Index>(nq) * batch);
        std::vector<Mat> attention;
        if (cache)
            attention.reserve(static_cast<std::size_t>(batch * heads_));
        for (int b = 0; b < batch; ++b)
        {
            const auto item_cols = Eigen::seqN(b, steps, batch);
            const auto out_cols = Eigen::seqN(b, nq, batch);
            for (int hd = 0; hd < heads_; ++hd)
            {
                const auto rows = Eigen::seqN(hd * dk, dk);
                const Mat kb = k(rows, item_cols);
                const Mat vb = v(rows, item_cols);
                const Mat a = softmax_rows((q.middleRows(hd * dk, dk).transpose() * kb) * scale);
                concat(rows, out_cols) = vb * a.transpose();
                if (cache)
                    attention.push_back(a);
            }
        }
        Mat y = wo_.value * concat;
        y.colwise() += bo_.value.col(0);
        if (cache)
        {
            cache->x = x;
            cache->q = std::move(q);
            cache->k = std::move(k);
            cache->v = std::move(v);
            cache->attention = std::move(attention);
            cache->concat = std::move(concat);
            cache->steps = steps;
            cache->batch = batch;
        }
        return y;
    }

    Mat QueryAttention::backward(const Cache &cache, const Mat &dy)
    {
        const int dk = dim_ / heads_;
        const int nq = num_queries();
        const int steps = cache.steps, batch = cache.batch;
        const float scale = 1.0f / std::sqrt(static_cast<float>(dk));

        wo_.grad.noalias() += dy * cache.concat.transpose();
        bo_.grad.col(0) += dy.rowwise().sum();
        const Mat dconcat = wo_.value.transpose() * dy;

        Mat dq = Mat::Zero(dim_, nq);
        Mat dk_full = Mat::Zero(dim_, cache.k.cols());
        Mat dv_full = Mat::Zero(dim_, cache.v.cols());
        for (int b = 0; b < batch; ++b)
        {
            const auto item_cols = Eigen::seqN(b, steps, batch);
            const auto out_cols = Eigen::seqN(b, nq, batch);
            for (int hd = 0; hd < heads_; ++hd)
            {
                const auto rows = Eigen::seqN(hd * dk, dk);
                const Mat &a = cache.attention[static_cast<std::size_t>(b * heads_ + hd)];
                const Mat kb = cache.k(rows, item_cols);
                const Mat vb = cache.v(rows, item_cols);
                const Mat d_out = dconcat(rows, out_cols);

                dv_full(rows, item_cols) = d_out * a;
                const Mat da = d_out.transpose() * vb;
                const Eigen::VectorXf row_dot = (da.array() * a.array()).rowwise().sum();
                const Mat ds = (a.array() * (da.colwise() - row_dot).array()).matrix() * scale;
                dq.middleRows(hd * dk, dk).noalias() += kb * ds.transpose();
                dk_full(rows, item_cols) = cache.q.middleRows(hd * dk, dk) * ds;
            }
        }

        wq_.grad.noalias() += dq * queries_.value.transpose();
        bq_.grad.col(0) += dq.rowwise().sum();
        queries_.grad.noalias() += wq_.value.transpose() * dq;

        wk_.grad.noalias() += dk_full * cache.x.transpose();
        bk_.grad.col(0) += dk_full.rowwise().sum();
        wv_.grad.noalias() += dv_full * cache.x.transpose();
        bv_.grad.col(0) += dv_full.rowwise().sum();

        Mat dx = wk_.value.transpose() * dk_full;
        dx.noalias() += wv_.value.transpose() * dv_full;
        return dx;
    }
}
