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

#include "beamtrack/models.hpp"

#include "beamtrack/errors.hpp"
#include "json_reader.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace beamtrack::model
{
    namespace
    {
        int conv_out(int size, int kernel) { return (size + 2 * (kernel / 2) - kernel) / 2 + 1; }

        void copy_plane(const io::NdArray &array, std::size_t plane, int h, int w, float *dst)
        {
            const std::size_t n = static_cast<std::size_t>(h) * static_cast<std::size_t>(w);
            std::copy_n(array.data.data() + plane * n, n, dst);
        }

        void check_array(const data::ArrayPtr &a, std::uint64_t channels, const ModelSpec &spec, const char *what)
        {
            if (!a)
                throw ShapeError(std::string(what) + " observation missing");
            if (a->dims.size() != 3 || a->dims[0] != channels || a->dims[1] != static_cast<std::uint64_t>(spec.input_height) ||
                a->dims[2] != static_cast<std::uint64_t>(spec.input_width))
                throw ShapeError(std::string(what) + " array shape does not match the model input " +
                                 std::to_string(channels) + "x" + std::to_string(spec.input_height) + "x" +
                                 std::to_string(spec.input_width));
        }
    }

    const char *role_name(Role role) { return role == Role::teacher ? "teacher" : "student"; }

    const char *conv_kind_name(ConvKind kind)
    {
        return kind == ConvKind::standard ? "standard" : "depthwise_separable";
    }

    void ModelSpec::validate(const std::string &path) const
    {
        const auto f = [&](const char *name) { return path + "." + name; };
        require_config(!vision_channels.empty() && !radar_channels.empty(), f("vision_channels"),
                       "conv stacks need at least one block");
        for (const auto *widths : {&vision_channels, &radar_channels})
            for (int c : *widths)
                require_config(c > 0, f(widths == &vision_channels ? "vision_channels" : "radar_channels"),
                               "conv widths must be positive");
        require_config(kernel >= 1 && kernel % 2 == 1, f("kernel"), "kernel must be a positive odd integer");
        require_config(pool_grid >= 1, f("pool_grid"), "must be >= 1");
        require_config(d0 > 0, f("d0"), "must be > 0");
        require_config(d1 > 0, f("d1"), "must be > 0");
        require_config(d > 0, f("d"), "must be > 0");
        require_config(gru_layers == 1 || gru_layers == 2, f("gru_layers"), "must be 1 or 2");
        require_config(gru_hidden > 0, f("gru_hidden"), "must be > 0");
        require_config(mha_heads > 0 && gru_hidden % mha_heads == 0, f("mha_heads"),
                       "must divide the attention width gru_hidden");
        require_config(classifier_hidden > 0, f("classifier_hidden"), "must be > 0");
        require_config(window >= 1, f("window"), "must be >= 1");
        require_config(horizon >= 0, f("horizon"), "must be >= 0");
        require_config(num_beams >= 2, f("num_beams"), "must be >= 2");
        require_config(modality.vision || modality.radar, f("modality"), "at least one modality must be on");
        require_config(input_height >= 1 && input_width >= 1, f("input_height"), "must be >= 1");
        for (const auto *widths : {&vision_channels, &radar_channels})
        {
            int h = input_height, w = input_width;
            for (std::size_t i = 0; i < widths->size(); ++i)
            {
                h = conv_out(h, kernel);
                w = conv_out(w, kernel);
            }
            require_config(h >= 1 && w >= 1 && h % pool_grid == 0 && w % pool_grid == 0, f("pool_grid"),
                           "pool grid must divide the final " + std::to_string(h) + "x" + std::to_string(w) +
                               " feature map");
        }
    }

    ModelSpec default_teacher_spec() { return ModelSpec{}; }

    ModelSpec default_student_spec()
    {
        ModelSpec s;
        s.role = Role::student;
        s.vision_channels = {8, 16, 32};
        s.radar_channels = {8, 16, 32};
        s.conv_kind = ConvKind::depthwise_separable;
        s.pool_grid = 2;
        s.d0 = 32;
        s.d1 = 32;
        s.d = 64;
        s.gru_layers = 1;
        s.gru_hidden = 64;
        s.mha_heads = 2;
        s.classifier_hidden = 64;
        return s;
    }

    nlohmann::json spec_to_json(const ModelSpec &s)
    {
        return {{"role", role_name(s.role)},
                {"vision_channels", s.vision_channels},
                {"radar_channels", s.radar_channels},
                {"conv_kind", conv_kind_name(s.conv_kind)},
                {"kernel", s.kernel},
                {"pool_grid", s.pool_grid},
                {"d0", s.d0},
                {"d1", s.d1},
                {"d", s.d},
                {"gru_layers", s.gru_layers},
                {"gru_hidden", s.gru_hidden},
                {"mha_heads", s.mha_heads},
                {"classifier_hidden", s.classifier_hidden},
                {"window", s.window},
                {"horizon", s.horizon},
                {"num_beams", s.num_beams},
                {"input_height", s.input_height},
                {"input_width", s.input_width},
                {"modality", {{"vision", s.modality.vision}, {"radar", s.modality.radar}}}};
    }

    ModelSpec spec_from_json(const nlohmann::json &j, const std::string &path, ModelSpec s)
    {
        detail::ObjectReader r(j, path);
        std::string text;
        if (r.get("role", text))
        {
            if (text == "teacher")
                s.role = Role::teacher;
            else if (text == "student")
                s.role = Role::student;
            else
                throw ConfigError("expected 'teacher' or 'student'", r.field("role"));
        }
        if (r.get("conv_kind", text))
        {
            if (text == "standard")
                s.conv_kind = ConvKind::standard;
            else if (text == "depthwise_separable")
                s.conv_kind = ConvKind::depthwise_separable;
            else
                throw ConfigError("expected 'standard' or 'depthwise_separable'", r.field("conv_kind"));
        }
        r.get("vision_channels", s.vision_channels);
        r.get("radar_channels", s.radar_channels);
        r.get("kernel", s.kernel);
        r.get("pool_grid", s.pool_grid);
        r.get("d0", s.d0);
        r.get("d1", s.d1);
        r.get("d", s.d);
        r.get("gru_layers", s.gru_layers);
        r.get("gru_hidden", s.gru_hidden);
        r.get("mha_heads", s.mha_heads);
        r.get("classifier_hidden", s.classifier_hidden);
        r.get("window", s.window);
        r.get("horizon", s.horizon);
        r.get("num_beams", s.num_beams);
        r.get("input_height", s.input_height);
        r.get("input_width", s.input_width);
        if (const auto *m = r.child("modality"))
        {
            detail::ObjectReader mr(*m, r.field("modality"));
            mr.get("vision", s.modality.vision);
            mr.get("radar", s.modality.radar);
            mr.finish();
        }
        r.finish();
        s.validate(path);
        return s;
    }

    Eigen::RowVectorXd tempered_softmax(const Eigen::RowVectorXd &logits, double temperature)
    {
        if (!(temperature > 0.0))
            throw DomainError("softmax temperature must be > 0");
        if (logits.size() == 0)
            throw ShapeError("empty logit row");
        Eigen::RowVectorXd e = ((logits.array() - logits.maxCoeff()) / temperature).exp().matrix();
        return e / e.sum();
    }

    Eigen::MatrixXd tempered_softmax_rows(const Eigen::MatrixXd &logits, double temperature)
    {
        Eigen::MatrixXd p(logits.rows(), logits.cols());
        for (Eigen::Index r = 0; r < logits.rows(); ++r)
            p.row(r) = tempered_softmax(logits.row(r), temperature);
        return p;
    }

    BeamProbSeries make_series(Eigen::MatrixXd logits)
    {
        BeamProbSeries s;
        s.probs = tempered_softmax_rows(logits, 1.0);
        s.logits = std::move(logits);
        return s;
    }

    Batch make_batch(std::span<const data::SequenceSample *const> samples, const ModelSpec &spec)
    {
        Batch b;
        b.items = static_cast<int>(samples.size());
        b.window = spec.window;
        const int h = spec.input_height, w = spec.input_width;
        const Eigen::Index plane = static_cast<Eigen::Index>(h) * w;
        const Eigen::Index cols = static_cast<Eigen::Index>(b.items) * b.window * plane;
        if (spec.modality.vision)
            b.vision.resize(1, cols);
        if (spec.modality.radar)
            b.radar.resize(2, cols);
        for (int i = 0; i < b.items; ++i)
        {
            const auto &s = *samples[static_cast<std::size_t>(i)];
            if (s.window() != spec.window || static_cast<int>(s.radar.size()) != spec.window)
                throw ShapeError("sample window " + std::to_string(s.window()) + " does not match model window " +
                                 std::to_string(spec.window));
            if (s.horizon() != spec.horizon)
                throw ShapeError("sample horizon does not match model horizon");
            for (int t = 0; t < b.window; ++t)
            {
                const Eigen::Index off = (static_cast<Eigen::Index>(t) * b.items + i) * plane;
                if (spec.modality.vision)
                {
                    const auto &a = s.vision[static_cast<std::size_t>(t)];
                    check_array(a, 1, spec, "vision");
                    copy_plane(*a, 0, h, w, b.vision.data() + off);
                }
                if (spec.modality.radar)
                {
                    const auto &a = s.radar[static_cast<std::size_t>(t)];
                    check_array(a, 2, spec, "radar");
                    copy_plane(*a, 0, h, w, b.radar.row(0).data() + off);
                    copy_plane(*a, 1, h, w, b.radar.row(1).data() + off);
                }
            }
        }
        return b;
    }

    Batch make_batch(std::span<const data::SequenceSample> samples, const ModelSpec &spec)
    {
        std::vector<const data::SequenceSample *> ptrs;
        ptrs.reserve(samples.size());
        for (const auto &s : samples)
            ptrs.push_back(&s);
        return make_batch(std::span<const data::SequenceSample *const>(ptrs), spec);
    }

    std::vector<Eigen::MatrixXd> split_logits(const nn::Mat &logits, int items, int slots)
    {
        std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(items));
        for (int b = 0; b < items; ++b)
        {
            Eigen::MatrixXd m(slots, logits.rows());
            for (int j = 0; j < slots; ++j)
                m.row(j) = logits.col(static_cast<Eigen::Index>(j) * items + b).cast<double>().transpose();
            out[static_cast<std::size_t>(b)] = std::move(m);
        }
        return out;
    }

    // ------------------------------------------------------------------ Model

    Model::Branch Model::build_branch(const std::string &name, const ModelSpec &spec, int in_channels,
                                      const std::vector<int> &widths, int out_dim)
    {
        const auto kind =
            spec.conv_kind == ConvKind::standard ? nn::ConvBlock::Kind::standard : nn::ConvBlock::Kind::depthwise_separable;
        std::vector<nn::ConvBlock> convs;
        nn::ImageDims dims{in_channels, spec.input_height, spec.input_width};
        for (std::size_t i = 0; i < widths.size(); ++i)
        {
            convs.emplace_back(name + ".conv" + std::to_string(i), kind, dims, widths[i], spec.kernel, 2, spec.kernel / 2);
            dims = convs.back().output_dims();
        }
        nn::GridPool pool(dims, spec.pool_grid);
        nn::Linear projection(name + ".projection", pool.output_features(), out_dim);
        return Branch{std::move(convs), pool, std::move(projection)};
    }

    Model::Model(const ModelSpec &spec, std::uint64_t seed)
        : spec_(spec), fusion_("fusion", spec.d0 + spec.d1, spec.d),
          attention_("attention", spec.gru_hidden, spec.mha_heads, spec.horizon + 1),
          classifier_hidden_("classifier.hidden", spec.gru_hidden, spec.classifier_hidden),
          classifier_out_("classifier.out", spec.classifier_hidden, spec.num_beams)
    {
        spec_.validate();
        if (spec_.modality.vision)
            vision_ = build_branch("vision", spec_, 1, spec_.vision_channels, spec_.d0);
        if (spec_.modality.radar)
            radar_ = build_branch("radar", spec_, 2, spec_.radar_channels, spec_.d1);
        for (int l = 0; l < spec_.gru_layers; ++l)
            gru_.emplace_back("gru" + std::to_string(l), l == 0 ? spec_.d : spec_.gru_hidden, spec_.gru_hidden);

        Rng rng(mix_seed(seed, 0x1417));
        for (auto *branch : {&vision_, &radar_})
            if (*branch)
            {
                for (auto &c : (*branch)->convs)
                    c.init(rng);
                (*branch)->projection.init(rng);
            }
        fusion_.init(rng);
        for (auto &g : gru_)
            g.init(rng);
        attention_.init(rng);
        classifier_hidden_.init(rng);
        classifier_out_.init(rng);
    }

    nn::Mat Model::branch_forward(const Branch &branch, const nn::RMat &images, int items, BranchCache *cache) const
    {
        if (cache)
            cache->convs.resize(branch.convs.size());
        nn::RMat x = images;
        for (std::size_t i = 0; i < branch.convs.size(); ++i)
            x = branch.convs[i].forward(x, items, cache ? &cache->convs[i] : nullptr);
        const nn::Mat pooled = branch.pool.forward(x, items);
        return branch.projection.forward(pooled, cache ? &cache->projection : nullptr);
    }

    void Model::branch_backward(Branch &branch, const BranchCache &cache, const nn::Mat &dy, int items)
    {
        const nn::Mat dpooled = branch.projection.backward(cache.projection, dy, true);
        nn::RMat dx = branch.pool.backward(dpooled, items);
        for (std::size_t i = branch.convs.size(); i-- > 0;)
            dx = branch.convs[i].backward(cache.convs[i], dx, i > 0);
    }

    nn::Mat Model::forward(const Batch &batch, Cache *cache) const
    {
        const int items = batch.items;
        const int steps = spec_.window;
        if (batch.window != steps)
            throw ShapeError("batch window does not match the model window");
        const int n = items * steps;
        if (cache)
            cache->items = items;

        nn::Mat concat = nn::Mat::Zero(spec_.d0 + spec_.d1, n);
        if (vision_)
            concat.topRows(spec_.d0) = branch_forward(*vision_, batch.vision, n, cache ? &cache->vision : nullptr);
        if (radar_)
            concat.bottomRows(spec_.d1) = branch_forward(*radar_, batch.radar, n, cache ? &cache->radar : nullptr);

        nn::Mat x = nn::relu(fusion_.forward(concat, cache ? &cache->fusion : nullptr));
        if (cache)
        {
            cache->fused = x;
            cache->gru.resize(gru_.size());
        }
        for (std::size_t l = 0; l < gru_.size(); ++l)
            x = gru_[l].forward(x, steps, items, cache ? &cache->gru[l] : nullptr);
        const nn::Mat attended = attention_.forward(x, steps, items, cache ? &cache->attention : nullptr);
        nn::Mat hidden = nn::relu(classifier_hidden_.forward(attended, cache ? &cache->classifier_hidden : nullptr));
        nn::Mat logits = classifier_out_.forward(hidden, cache ? &cache->classifier_out : nullptr);
        if (cache)
            cache->hidden = std::move(hidden);
        return logits;
    }

    void Model::backward(const Cache &cache, const nn::Mat &dlogits)
    {
        const int n = cache.items * spec_.window;
        nn::Mat d = classifier_out_.backward(cache.classifier_out, dlogits, true);
        d = nn::relu_backward(cache.hidden, d);
        d = classifier_hidden_.backward(cache.classifier_hidden, d, true);
        d = attention_.backward(cache.attention, d);
        for (std::size_t l = gru_.size(); l-- > 0;)
            d = gru_[l].backward(cache.gru[l], d, true);
        d = nn::relu_backward(cache.fused, d);
        const nn::Mat dconcat = fusion_.backward(cache.fusion, d, true);
        if (vision_)
            branch_backward(*vision_, cache.vision, dconcat.topRows(spec_.d0), n);
        if (radar_)
            branch_backward(*radar_, cache.radar, dconcat.bottomRows(spec_.d1), n);
    }

    std::vector<nn::Param *> Model::parameters()
    {
        std::vector<nn::Param *> out;
        const auto add = [&](std::vector<nn::Param *> ps) { out.insert(out.end(), ps.begin(), ps.end()); };
        for (auto *branch : {&vision_, &radar_})
            if (*branch)
            {
                for (auto &c : (*branch)->convs)
                    add(c.params());
                add((*branch)->projection.params());
            }
        add(fusion_.params());
        for (auto &g : gru_)
            add(g.params());
        add(attention_.params());
        add(classifier_hidden_.params());
        add(classifier_out_.params());
        return out;
    }

    std::vector<const nn::Param *> Model::parameters() const
    {
        auto ps = const_cast<Model *>(this)->parameters();
        return {ps.begin(), ps.end()};
    }

    long long Model::parameter_count() const
    {
        long long n = 0;
        for (const auto *p : parameters())
            n += p->size();
        return n;
    }

    void Model::zero_grad()
    {
        for (auto *p : parameters())
            p->grad.setZero();
    }

    std::vector<nn::Mat> Model::state() const
    {
        std::vector<nn::Mat> out;
        for (const auto *p : parameters())
            out.push_back(p->value);
        return out;
    }

    void Model::load_state(const std::vector<nn::Mat> &weights)
    {
        auto ps = parameters();
        if (ps.size() != weights.size())
            throw ShapeError("weight count mismatch: model has " + std::to_string(ps.size()) + ", got " +
                             std::to_string(weights.size()));
        for (std::size_t i = 0; i < ps.size(); ++i)
        {
            if (ps[i]->value.rows() != weights[i].rows() || ps[i]->value.cols() != weights[i].cols())
                throw ShapeError("weight shape mismatch for " + ps[i]->name);
            ps[i]->value = weights[i];
        }
    }

    std::vector<Eigen::MatrixXd> Model::logits(std::span<const data::SequenceSample> samples, int batch_size) const
    {
        std::vector<Eigen::MatrixXd> out;
        out.reserve(samples.size());
        batch_size = std::max(batch_size, 1);
        for (std::size_t begin = 0; begin < samples.size(); begin += static_cast<std::size_t>(batch_size))
        {
            const auto chunk = samples.subspan(begin, std::min<std::size_t>(static_cast<std::size_t>(batch_size),
                                                                             samples.size() - begin));
            const Batch b = make_batch(chunk, spec_);
            auto part = split_logits(forward(b), b.items, spec_.horizon + 1);
            for (auto &m : part)
                out.push_back(std::move(m));
        }
        return out;
    }

    std::vector<BeamProbSeries> Model::predict(std::span<const data::SequenceSample> samples) const
    {
        std::vector<BeamProbSeries> out;
        out.reserve(samples.size());
        for (auto &m : logits(samples))
            out.push_back(make_series(std::move(m)));
        return out;
    }

    BeamProbSeries Model::predict(const data::SequenceSample &sample) const
    {
        return std::move(predict(std::span<const data::SequenceSample>(&sample, 1)).front());
    }

    std::string Model::identity() const
    {
        std::ostringstream os;
        os << role_name(spec_.role);
        if (!spec_.modality.radar)
            os << "-vision-only";
        else if (!spec_.modality.vision)
            os << "-radar-only";
        return os.str();
    }
}
