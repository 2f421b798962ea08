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

#include "beamtrack/training.hpp"

#include "beamtrack/errors.hpp"
#include "beamtrack/random.hpp"
#include "json_reader.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace beamtrack::training
{
    namespace
    {
        class Adam
        {
        public:
            Adam(const std::vector<nn::Param *> &params, const TrainConfig &c)
                : b1_(static_cast<float>(c.adam_beta1)), b2_(static_cast<float>(c.adam_beta2)),
                  eps_(static_cast<float>(c.adam_epsilon))
            {
                for (const auto *p : params)
                {
                    m_.push_back(nn::Mat::Zero(p->value.rows(), p->value.cols()));
                    v_.push_back(nn::Mat::Zero(p->value.rows(), p->value.cols()));
                }
            }

            void step(const std::vector<nn::Param *> &params, double lr)
            {
                ++t_;
                const float c1 = 1.0f - std::pow(b1_, static_cast<float>(t_));
                const float c2 = 1.0f - std::pow(b2_, static_cast<float>(t_));
                const float a = static_cast<float>(lr);
                for (std::size_t i = 0; i < params.size(); ++i)
                {
                    auto &p = *params[i];
                    m_[i] = b1_ * m_[i] + (1.0f - b1_) * p.grad;
                    v_[i] = b2_ * v_[i] + (1.0f - b2_) * p.grad.cwiseAbs2();
                    p.value.array() -= a * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
                }
            }

        private:
            float b1_, b2_, eps_;
            long t_ = 0;
            std::vector<nn::Mat> m_, v_;
        };

        void clip_gradients(const std::vector<nn::Param *> &params, double max_norm)
        {
            if (max_norm <= 0.0)
                return;
            double sq = 0.0;
            for (const auto *p : params)
                sq += p->grad.cast<double>().squaredNorm();
            const double norm = std::sqrt(sq);
            if (norm > max_norm)
            {
                const float s = static_cast<float>(max_norm / norm);
                for (auto *p : params)
                    p->grad *= s;
            }
        }

        TrainResult run(const model::ModelSpec &spec, std::span<const data::SequenceSample> train,
                        std::span<const data::SequenceSample> validation, const model::Model *teacher,
                        const TrainConfig &config, const TrainOptions &options)
        {
            config.validate();
            spec.validate();
            if (train.empty() || validation.empty())
                throw ConfigError("training and validation sets must be nonempty", "dataset.train_fraction");
            if (teacher)
            {
                const auto &ts = teacher->spec();
                if (ts.num_beams != spec.num_beams || ts.horizon != spec.horizon)
                    throw ConfigError("teacher and student disagree on codebook size or horizon", "model.student");
                if (ts.window != spec.window)
                    throw ConfigError("teacher and student disagree on the window", "model.student.window");
            }

            const FocalAlpha alpha = make_alpha(config, train, spec.num_beams);
            const bool distill = teacher != nullptr;
            const bool use_distill_grad = distill && config.beta > 0.0;
            const double beta = distill ? config.beta : 0.0;

            // The teacher is frozen and deterministic, so its logits are computed once.
            std::vector<Eigen::MatrixXd> teacher_train, teacher_val;
            if (distill)
            {
                teacher_train = teacher->logits(train);
                teacher_val = teacher->logits(validation);
            }

            TrainResult result{model::Model(spec, config.seed), {}, -1, std::numeric_limits<double>::infinity()};
            model::Model &net = result.model;
            auto params = net.parameters();
            Adam adam(params, config);
            Rng order_rng(mix_seed(config.seed, 0x5bd1));
            std::vector<std::size_t> order(train.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::vector<nn::Mat> best_state = net.state();

            std::ofstream log_file;
            if (!options.log_path.empty())
            {
                log_file.open(options.log_path, std::ios::trunc);
                if (!log_file)
                    throw MissingArtifactError(options.log_path.string());
            }

            const int slots = spec.horizon + 1;
            const ScheduleConfig schedule = config.schedule();
            int since_best = 0;
            for (int epoch = 0; epoch < config.max_epochs; ++epoch)
            {
                const double lr = lr_schedule(epoch, schedule);
                for (std::size_t i = order.size(); i > 1; --i)
                    std::swap(order[i - 1], order[uniform_index(order_rng, i)]);

                double sum_task = 0.0, sum_distill = 0.0, sum_total = 0.0;
                for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(config.batch_size))
                {
                    const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(config.batch_size));
                    const int items = static_cast<int>(end - begin);
                    std::vector<const data::SequenceSample *> ptrs;
                    for (std::size_t k = begin; k < end; ++k)
                        ptrs.push_back(&train[order[k]]);
                    const model::Batch batch = model::make_batch(std::span<const data::SequenceSample *const>(ptrs), spec);

                    model::Model::Cache cache;
                    const nn::Mat out = net.forward(batch, &cache);
                    const auto per_item = model::split_logits(out, items, slots);
                    nn::Mat dlogits(out.rows(), out.cols());
                    double batch_total = 0.0;
                    for (int b = 0; b < items; ++b)
                    {
                        const std::size_t idx = order[begin + static_cast<std::size_t>(b)];
                        const auto &logits = per_item[static_cast<std::size_t>(b)];
                        const auto &labels = train[idx].labels;
                        const double task = task_loss(model::make_series(logits), labels, alpha, config.focal_gamma);
                        double kd = 0.0;
                        if (distill)
                            kd = distill_loss(teacher_train[idx], logits, config.temperature);
                        const LossBreakdown lb = overall_loss(task, kd, beta);
                        sum_task += lb.task;
                        sum_distill += lb.distill;
                        batch_total += lb.total;

                        Eigen::MatrixXd g = task_loss_grad(logits, labels, alpha, config.focal_gamma);
                        if (use_distill_grad)
                            g = (1.0 - beta) * g + beta * distill_loss_grad(teacher_train[idx], logits, config.temperature);
                        g /= static_cast<double>(items);
                        for (int j = 0; j < slots; ++j)
                            dlogits.col(static_cast<Eigen::Index>(j) * items + b) = g.row(j).transpose().cast<float>();
                    }
                    if (!std::isfinite(batch_total))
                        throw TrainingAbort("non-finite loss at epoch " + std::to_string(epoch) + ", batch starting at " +
                                            std::to_string(begin));
                    sum_total += batch_total;

                    net.zero_grad();
                    net.backward(cache, dlogits);
                    clip_gradients(params, config.clip_norm);
                    adam.step(params, lr);
                }

                EpochLog log;
                log.epoch = epoch;
                log.lr = lr;
                const double n = static_cast<double>(train.size());
                log.train_task = sum_task / n;
                log.train_distill = sum_distill / n;
                log.train_total = sum_total / n;
                double val = validation_loss(net, validation, distill ? &teacher_val : nullptr, config, alpha);
                if (options.validation_override)
                    val = options.validation_override(epoch, val);
                if (!std::isfinite(val))
                    throw TrainingAbort("non-finite validation loss at epoch " + std::to_string(epoch));
                log.validation_loss = val;
                log.best = val < result.best_validation_loss;
                if (log.best)
                {
                    result.best_validation_loss = val;
                    result.best_epoch = epoch;
                    best_state = net.state();
                    since_best = 0;
                }
                else
                    ++since_best;

                result.log.push_back(log);
                if (log_file)
                    log_file << log.to_json().dump() << '\n' << std::flush;
                if (options.on_epoch)
                    options.on_epoch(log);
                if (since_best >= config.patience)
                    break;
            }
            net.load_state(best_state);
            return result;
        }
    }

    void TrainConfig::validate() const
    {
        require_config(beta >= 0.0 && beta <= 1.0, "training.beta", "must lie in [0, 1]");
        require_config(temperature > 0.0, "training.temperature", "must be > 0");
        require_config(focal_gamma >= 0.0, "training.focal_gamma", "must be >= 0");
        require_config(focal_alpha > 0.0, "training.focal_alpha", "must be > 0");
        require_config(lr_init > 0.0, "training.lr_init", "must be > 0");
        require_config(lr_min < lr_init, "training.lr_min", "must be below lr_init");
        require_config(cycle_length >= 1, "training.cycle_length", "must be >= 1");
        require_config(max_epochs >= 1, "training.max_epochs", "must be >= 1");
        require_config(batch_size >= 1, "training.batch_size", "must be >= 1");
        require_config(patience >= 1, "training.patience", "must be >= 1");
        require_config(adam_beta1 >= 0.0 && adam_beta1 < 1.0, "training.adam_beta1", "must lie in [0, 1)");
        require_config(adam_beta2 >= 0.0 && adam_beta2 < 1.0, "training.adam_beta2", "must lie in [0, 1)");
        require_config(adam_epsilon > 0.0, "training.adam_epsilon", "must be > 0");
    }

    ScheduleConfig TrainConfig::schedule() const
    {
        return {lr_init, lr_min > 0.0 ? lr_min : lr_init / 100.0, cycle_length};
    }

    nlohmann::json train_config_to_json(const TrainConfig &c)
    {
        return {{"beta", c.beta},
                {"temperature", c.temperature},
                {"focal_gamma", c.focal_gamma},
                {"focal_alpha", c.focal_alpha},
                {"class_balanced_alpha", c.class_balanced_alpha},
                {"lr_init", c.lr_init},
                {"lr_min", c.lr_min},
                {"cycle_length", c.cycle_length},
                {"max_epochs", c.max_epochs},
                {"batch_size", c.batch_size},
                {"patience", c.patience},
                {"seed", c.seed},
                {"clip_norm", c.clip_norm},
                {"optimizer", "adam"},
                {"adam_beta1", c.adam_beta1},
                {"adam_beta2", c.adam_beta2},
                {"adam_epsilon", c.adam_epsilon}};
    }

    TrainConfig train_config_from_json(const nlohmann::json &j, const std::string &path, TrainConfig c)
    {
        detail::ObjectReader r(j, path);
        r.get("beta", c.beta);
        r.get("temperature", c.temperature);
        r.get("focal_gamma", c.focal_gamma);
        r.get("focal_alpha", c.focal_alpha);
        r.get("class_balanced_alpha", c.class_balanced_alpha);
        r.get("lr_init", c.lr_init);
        r.get("lr_min", c.lr_min);
        r.get("cycle_length", c.cycle_length);
        r.get("max_epochs", c.max_epochs);
        r.get("batch_size", c.batch_size);
        r.get("patience", c.patience);
        r.get("seed", c.seed);
        r.get("clip_norm", c.clip_norm);
        std::string optimizer;
        if (r.get("optimizer", optimizer) && optimizer != "adam")
            throw ConfigError("only 'adam' is supported", r.field("optimizer"));
        r.get("adam_beta1", c.adam_beta1);
        r.get("adam_beta2", c.adam_beta2);
        r.get("adam_epsilon", c.adam_epsilon);
        r.finish();
        c.validate();
        return c;
    }

    nlohmann::json EpochLog::to_json() const
    {
        return {{"epoch", epoch},
                {"train_task", train_task},
                {"train_distill", train_distill},
                {"train_total", train_total},
                {"validation_loss", validation_loss},
                {"lr", lr},
                {"best", best}};
    }

    FocalAlpha make_alpha(const TrainConfig &config, std::span<const data::SequenceSample> train, int num_beams)
    {
        FocalAlpha a;
        a.scalar = config.focal_alpha;
        if (config.class_balanced_alpha)
            a.per_class = data::class_histogram(train, num_beams).alpha;
        return a;
    }

    double validation_loss(const model::Model &model, std::span<const data::SequenceSample> samples,
                           const std::vector<Eigen::MatrixXd> *teacher_logits, const TrainConfig &config,
                           const FocalAlpha &alpha)
    {
        if (samples.empty())
            throw ConfigError("validation set is empty", "dataset.train_fraction");
        const auto logits = model.logits(samples, config.batch_size);
        double sum = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i)
        {
            const double task = task_loss(model::make_series(logits[i]), samples[i].labels, alpha, config.focal_gamma);
            if (!teacher_logits)
            {
                sum += task;
                continue;
            }
            const double kd = distill_loss((*teacher_logits)[i], logits[i], config.temperature);
            sum += overall_loss(task, kd, config.beta).total;
        }
        return sum / static_cast<double>(samples.size());
    }

    TrainResult train_teacher(const model::ModelSpec &spec, std::span<const data::SequenceSample> train,
                              std::span<const data::SequenceSample> validation, const TrainConfig &config,
                              const TrainOptions &options)
    {
        return run(spec, train, validation, nullptr, config, options);
    }

    TrainResult train_student_kd(const model::ModelSpec &spec, std::span<const data::SequenceSample> train,
                                 std::span<const data::SequenceSample> validation, const model::Model &teacher,
                                 const TrainConfig &config, const TrainOptions &options)
    {
        return run(spec, train, validation, &teacher, config, options);
    }
}
