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

#include "beamtrack/errors.hpp"
#include "beamtrack/nn.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>

using namespace beamtrack;
using namespace beamtrack::nn;

namespace
{
    using MatD = Eigen::MatrixXd;

    RMat random_rmat(Rng &rng, Eigen::Index r, Eigen::Index c)
    {
        RMat m(r, c);
        for (Eigen::Index i = 0; i < m.size(); ++i)
            m.data()[i] = static_cast<float>(uniform(rng, -1.0, 1.0));
        return m;
    }

    Mat random_mat(Rng &rng, Eigen::Index r, Eigen::Index c)
    {
        Mat m(r, c);
        for (Eigen::Index i = 0; i < m.size(); ++i)
            m.data()[i] = static_cast<float>(uniform(rng, -1.0, 1.0));
        return m;
    }

    template <class M> double weighted_sum(const M &out, const MatD &w)
    {
        double s = 0.0;
        for (Eigen::Index r = 0; r < out.rows(); ++r)
            for (Eigen::Index c = 0; c < out.cols(); ++c)
                s += static_cast<double>(out(r, c)) * w(r, c);
        return s;
    }

    // Compares analytic gradients against central differences on up to `samples`
    // coordinates per tensor. Aggregate relative error absorbs the occasional ReLU kink.
    struct GradCheck
    {
        std::function<double()> loss;
        double step = 1e-2;

        double error(float *data, const float *grad, Eigen::Index size, Rng &rng, int samples = 40) const
        {
            Eigen::VectorXd analytic(std::min<Eigen::Index>(size, samples)), numeric(analytic.size());
            for (Eigen::Index s = 0; s < analytic.size(); ++s)
            {
                const Eigen::Index i = size <= samples ? s : static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(size)));
                const float keep = data[i];
                data[i] = keep + static_cast<float>(step);
                const double up = loss();
                data[i] = keep - static_cast<float>(step);
                const double down = loss();
                data[i] = keep;
                numeric(s) = (up - down) / (2.0 * step);
                analytic(s) = grad[i];
            }
            return (analytic - numeric).norm() / std::max({analytic.norm(), numeric.norm(), 1e-2});
        }
    };

    void zero(std::vector<Param *> ps)
    {
        for (Param *p : ps)
            p->grad.setZero();
    }

    // Direct convolution in double; returns channels x (items*h*w) without activation.
    MatD conv_oracle(const RMat &x, int items, ImageDims in, const Mat &w, const Mat &b, int out_c, int k, int stride, int pad,
                     bool depthwise)
    {
        const int oh = (in.height + 2 * pad - k) / stride + 1, ow = (in.width + 2 * pad - k) / stride + 1;
        MatD out = MatD::Zero(out_c, static_cast<Eigen::Index>(items) * oh * ow);
        for (int n = 0; n < items; ++n)
            for (int o = 0; o < out_c; ++o)
                for (int y = 0; y < oh; ++y)
                    for (int xx = 0; xx < ow; ++xx)
                    {
                        double acc = b(o, 0);
                        for (int c = 0; c < in.channels; ++c)
                        {
                            if (depthwise && c != o)
                                continue;
                            for (int ky = 0; ky < k; ++ky)
                                for (int kx = 0; kx < k; ++kx)
                                {
                                    const int iy = y * stride - pad + ky, ix = xx * stride - pad + kx;
                                    if (iy < 0 || ix < 0 || iy >= in.height || ix >= in.width)
                                        continue;
                                    const double wv = depthwise ? w(c, ky * k + kx) : w(o, (c * k + ky) * k + kx);
                                    acc += wv * x(c, (n * in.height + iy) * in.width + ix);
                                }
                        }
                        out(o, (n * oh + y) * ow + xx) = acc;
                    }
        return out;
    }

    MatD sigmoid(const MatD &x) { return (1.0 / (1.0 + (-x.array()).exp())).matrix(); }
}

TEST(Relu, ForwardAndBackward)
{
    Mat x(2, 2);
    x << -1.0f, 0.0f, 2.0f, -3.0f;
    Mat expected(2, 2);
    expected << 0.0f, 0.0f, 2.0f, 0.0f;
    EXPECT_EQ(relu(x), expected);
    Mat dy = Mat::Constant(2, 2, 5.0f);
    Mat dx(2, 2);
    dx << 0.0f, 0.0f, 5.0f, 0.0f;
    EXPECT_EQ(relu_backward(relu(x), dy), dx);
}

TEST(Init, FanInBounds)
{
    Rng rng(1);
    Param p("w", 64, 100);
    init_uniform_fan_in(p, 100, rng);
    EXPECT_LE(p.value.cwiseAbs().maxCoeff(), 0.1f);
    EXPECT_GT(p.value.cwiseAbs().maxCoeff(), 0.09f);
    EXPECT_NEAR(p.value.mean(), 0.0f, 0.005f);
    EXPECT_EQ(p.grad.rows(), 64);
    EXPECT_EQ(p.grad.squaredNorm(), 0.0f);
}

TEST(ConvBlock, StandardForwardMatchesDirectConvolution)
{
    Rng rng(2);
    ConvBlock conv("c", ConvBlock::Kind::standard, {3, 7, 6}, 4, 3, 2, 1);
    conv.init(rng);
    EXPECT_EQ(conv.output_dims().height, 4);
    EXPECT_EQ(conv.output_dims().width, 3);
    const RMat x = random_rmat(rng, 3, 2 * 7 * 6);
    const RMat y = conv.forward(x, 2, nullptr);
    const auto ps = conv.params();
    const MatD ref = conv_oracle(x, 2, {3, 7, 6}, ps[0]->value, ps[1]->value, 4, 3, 2, 1, false).cwiseMax(0.0);
    EXPECT_LT((y.cast<double>() - ref).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(ConvBlock, SeparableForwardMatchesDirectConvolution)
{
    Rng rng(3);
    ConvBlock conv("c", ConvBlock::Kind::depthwise_separable, {3, 8, 8}, 5, 3, 2, 1);
    conv.init(rng);
    const RMat x = random_rmat(rng, 3, 2 * 64);
    const RMat y = conv.forward(x, 2, nullptr);
    const auto ps = conv.params();
    const MatD dw = conv_oracle(x, 2, {3, 8, 8}, ps[0]->value, ps[1]->value, 3, 3, 2, 1, true);
    MatD ref = ps[2]->value.cast<double>() * dw;
    ref.colwise() += ps[3]->value.col(0).cast<double>();
    EXPECT_LT((y.cast<double>() - ref.cwiseMax(0.0)).cwiseAbs().maxCoeff(), 1e-5);
    EXPECT_EQ(ps[0]->value.rows(), 3);
    EXPECT_EQ(ps[0]->value.cols(), 9);
    EXPECT_EQ(ps[2]->value.rows(), 5);
}

class ConvGradient : public ::testing::TestWithParam<ConvBlock::Kind>
{
};

TEST_P(ConvGradient, MatchesFiniteDifferences)
{
    Rng rng(4);
    const ImageDims in{2, 6, 6};
    ConvBlock conv("c", GetParam(), in, 3, 3, 2, 1);
    conv.init(rng);
    RMat x = random_rmat(rng, 2, 2 * 36);
    const int oplane = conv.output_dims().height * conv.output_dims().width;
    const MatD w = MatD::Random(3, 2 * oplane);

    ConvBlock::Cache cache;
    const RMat y = conv.forward(x, 2, &cache);
    zero(conv.params());
    const RMat dx = conv.backward(cache, w.cast<float>(), true);

    // Exact: the output bias gradient is the upstream gradient summed over active outputs.
    const Param *out_bias = conv.params().back();
    for (int o = 0; o < 3; ++o)
    {
        double expected = 0.0;
        for (Eigen::Index c = 0; c < y.cols(); ++c)
            expected += y(o, c) > 0.0f ? w(o, c) : 0.0;
        EXPECT_NEAR(out_bias->grad(o, 0), expected, 1e-4);
    }

    GradCheck gc{[&] { return weighted_sum(conv.forward(x, 2, nullptr), w); }, 1e-3};
    for (Param *p : conv.params())
        EXPECT_LT(gc.error(p->value.data(), p->grad.data(), p->size(), rng), 5e-2) << p->name;
    EXPECT_LT(gc.error(x.data(), dx.data(), x.size(), rng), 5e-2);
}

INSTANTIATE_TEST_SUITE_P(Kinds, ConvGradient,
                         ::testing::Values(ConvBlock::Kind::standard, ConvBlock::Kind::depthwise_separable));

TEST(GridPool, ForwardAndAdjoint)
{
    Rng rng(5);
    GridPool pool({2, 4, 6}, 2);
    EXPECT_EQ(pool.output_features(), 8);
    const RMat x = random_rmat(rng, 2, 3 * 24);
    const Mat y = pool.forward(x, 3);
    for (int n = 0; n < 3; ++n)
        for (int c = 0; c < 2; ++c)
            for (int gy = 0; gy < 2; ++gy)
                for (int gx = 0; gx < 2; ++gx)
                {
                    double acc = 0.0;
                    for (int yy = 2 * gy; yy < 2 * gy + 2; ++yy)
                        for (int xx = 3 * gx; xx < 3 * gx + 3; ++xx)
                            acc += x(c, n * 24 + yy * 6 + xx);
                    EXPECT_NEAR(y(c * 4 + gy * 2 + gx, n), acc / 6.0, 1e-6);
                }
    // <pool(x), g> == <x, pool^T(g)>
    const Mat g = random_mat(rng, 8, 3);
    const RMat back = pool.backward(g, 3);
    EXPECT_NEAR((y.cwiseProduct(g)).sum(), (x.cwiseProduct(back)).sum(), 1e-4);
    EXPECT_THROW(GridPool({1, 5, 5}, 2), ConfigError);
}

TEST(Linear, ForwardAndGradient)
{
    Rng rng(6);
    Linear lin("l", 5, 3);
    lin.init(rng);
    Mat x = random_mat(rng, 5, 4);
    const auto ps = lin.params();
    const Mat y = lin.forward(x, nullptr);
    MatD ref = ps[0]->value.cast<double>() * x.cast<double>();
    ref.colwise() += ps[1]->value.col(0).cast<double>();
    EXPECT_LT((y.cast<double>() - ref).cwiseAbs().maxCoeff(), 1e-6);

    const MatD w = MatD::Random(3, 4);
    Linear::Cache cache;
    lin.forward(x, &cache);
    zero(lin.params());
    const Mat dx = lin.backward(cache, w.cast<float>(), true);
    GradCheck gc{[&] { return weighted_sum(lin.forward(x, nullptr), w); }};
    for (Param *p : lin.params())
        EXPECT_LT(gc.error(p->value.data(), p->grad.data(), p->size(), rng), 1e-3);
    EXPECT_LT(gc.error(x.data(), dx.data(), x.size(), rng), 1e-3);
    EXPECT_THROW(lin.forward(Mat::Zero(4, 1), nullptr), ShapeError);
}

TEST(Gru, ForwardMatchesGateEquations)
{
    Rng rng(7);
    const int in = 3, h = 4, steps = 3, batch = 2;
    GruLayer gru("g", in, h);
    gru.init(rng);
    const Mat x = random_mat(rng, in, steps * batch);
    const Mat y = gru.forward(x, steps, batch, nullptr);
    const auto ps = gru.params();
    const MatD wih = ps[0]->value.cast<double>(), whh = ps[1]->value.cast<double>();
    const Eigen::VectorXd bih = ps[2]->value.col(0).cast<double>(), bhh = ps[3]->value.col(0).cast<double>();
    for (int b = 0; b < batch; ++b)
    {
        Eigen::VectorXd state = Eigen::VectorXd::Zero(h);
        for (int t = 0; t < steps; ++t)
        {
            const Eigen::VectorXd xt = x.col(t * batch + b).cast<double>();
            const Eigen::VectorXd gi = wih * xt + bih, gh = whh * state + bhh;
            const Eigen::VectorXd r = sigmoid(gi.head(h) + gh.head(h));
            const Eigen::VectorXd z = sigmoid(gi.segment(h, h) + gh.segment(h, h));
            const Eigen::VectorXd n = (gi.tail(h).array() + r.array() * gh.tail(h).array()).tanh().matrix();
            state = ((1.0 - z.array()) * n.array() + z.array() * state.array()).matrix();
            EXPECT_LT((y.col(t * batch + b).cast<double>() - state).cwiseAbs().maxCoeff(), 1e-5);
        }
    }
}

TEST(Gru, GradientMatchesFiniteDifferences)
{
    Rng rng(8);
    GruLayer gru("g", 3, 5);
    gru.init(rng);
    Mat x = random_mat(rng, 3, 4 * 2);
    const MatD w = MatD::Random(5, 8);
    GruLayer::Cache cache;
    gru.forward(x, 4, 2, &cache);
    zero(gru.params());
    const Mat dx = gru.backward(cache, w.cast<float>(), true);
    GradCheck gc{[&] { return weighted_sum(gru.forward(x, 4, 2, nullptr), w); }, 1e-3};
    for (Param *p : gru.params())
        EXPECT_LT(gc.error(p->value.data(), p->grad.data(), p->size(), rng), 1e-2) << p->name;
    EXPECT_LT(gc.error(x.data(), dx.data(), x.size(), rng), 1e-2);
}

TEST(Gru, Causal)
{
    Rng rng(9);
    GruLayer gru("g", 3, 4);
    gru.init(rng);
    Mat x = random_mat(rng, 3, 5);
    const Mat a = gru.forward(x, 5, 1, nullptr);
    x.col(4).setConstant(3.0f);
    const Mat b = gru.forward(x, 5, 1, nullptr);
    EXPECT_EQ(a.leftCols(4), b.leftCols(4));
    EXPECT_NE(a.col(4), b.col(4));
}

TEST(QueryAttention, ForwardMatchesDirectComputation)
{
    Rng rng(10);
    const int d = 8, heads = 2, nq = 3, steps = 5, batch = 2;
    QueryAttention att("a", d, heads, nq);
    att.init(rng);
    const Mat x = random_mat(rng, d, steps * batch);
    const Mat y = att.forward(x, steps, batch, nullptr);
    ASSERT_EQ(y.cols(), nq * batch);
    const auto ps = att.params();
    auto dbl = [&](int i) { return MatD(ps[static_cast<std::size_t>(i)]->value.cast<double>()); };
    const MatD queries = dbl(0), wq = dbl(1), bq = dbl(2), wk = dbl(3), bk = dbl(4), wv = dbl(5), bv = dbl(6), wo = dbl(7),
               bo = dbl(8);
    const int dk = d / heads;
    for (int b = 0; b < batch; ++b)
        for (int j = 0; j < nq; ++j)
        {
            const Eigen::VectorXd q = wq * queries.col(j) + bq.col(0);
            Eigen::VectorXd concat(d);
            for (int hd = 0; hd < heads; ++hd)
            {
                Eigen::VectorXd score(steps);
                std::vector<Eigen::VectorXd> values;
                for (int t = 0; t < steps; ++t)
                {
                    const Eigen::VectorXd xt = x.col(t * batch + b).cast<double>();
                    const Eigen::VectorXd k = wk * xt + bk.col(0);
                    values.push_back(wv * xt + bv.col(0));
                    score(t) = q.segment(hd * dk, dk).dot(k.segment(hd * dk, dk)) / std::sqrt(double(dk));
                }
                const Eigen::VectorXd a = (score.array() - score.maxCoeff()).exp().matrix();
                Eigen::VectorXd mix = Eigen::VectorXd::Zero(dk);
                for (int t = 0; t < steps; ++t)
                    mix += a(t) / a.sum() * values[static_cast<std::size_t>(t)].segment(hd * dk, dk);
                concat.segment(hd * dk, dk) = mix;
            }
            const Eigen::VectorXd out = wo * concat + bo.col(0);
            EXPECT_LT((y.col(j * batch + b).cast<double>() - out).cwiseAbs().maxCoeff(), 1e-5);
        }
}

TEST(QueryAttention, GradientMatchesFiniteDifferences)
{
    Rng rng(11);
    QueryAttention att("a", 8, 2, 3);
    att.init(rng);
    Mat x = random_mat(rng, 8, 4 * 2);
    const MatD w = MatD::Random(8, 6);
    QueryAttention::Cache cache;
    att.forward(x, 4, 2, &cache);
    zero(att.params());
    const Mat dx = att.backward(cache, w.cast<float>());
    // Shifting every key by the same bias leaves the softmax unchanged.
    EXPECT_LT(att.params()[4]->grad.cwiseAbs().maxCoeff(), 1e-5f);
    GradCheck gc{[&] { return weighted_sum(att.forward(x, 4, 2, nullptr), w); }, 1e-3};
    for (Param *p : att.params())
        EXPECT_LT(gc.error(p->value.data(), p->grad.data(), p->size(), rng), 1e-2) << p->name;
    EXPECT_LT(gc.error(x.data(), dx.data(), x.size(), rng), 1e-2);
}

TEST(QueryAttention, ItemsAreIndependent)
{
    Rng rng(12);
    QueryAttention att("a", 8, 4, 2);
    att.init(rng);
    Mat x = random_mat(rng, 8, 3 * 2);
    const Mat a = att.forward(x, 3, 2, nullptr);
    for (int t = 0; t < 3; ++t)
        x.col(t * 2 + 1).setConstant(0.5f);
    const Mat b = att.forward(x, 3, 2, nullptr);
    for (int j = 0; j < 2; ++j)
    {
        EXPECT_EQ(a.col(j * 2), b.col(j * 2));
        EXPECT_NE(a.col(j * 2 + 1), b.col(j * 2 + 1));
    }
}
