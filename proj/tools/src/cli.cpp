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

#include "beamtrack_cli/cli.hpp"

#include "beamtrack/checkpoint.hpp"
#include "beamtrack/dataset_generator.hpp"
#include "beamtrack/dataset_store.hpp"
#include "beamtrack/errors.hpp"
#include "beamtrack/metrics.hpp"
#include "beamtrack/reports.hpp"
#include "beamtrack/run_config.hpp"
#include "beamtrack/training.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace beamtrack::cli
{
    namespace fs = std::filesystem;

    namespace
    {
        struct Options
        {
            std::string config;
            std::string out = ".";
            std::string data;
            std::string checkpoint;
            std::string teacher;
            std::string modality = "both";
            std::string split = "validation";
            std::string subset = "all";
            std::optional<std::uint64_t> seed;
            bool no_kd = false;
            std::vector<std::string> metrics;
        };

        RunConfig load_config(const Options &o)
        {
            return o.config.empty() ? default_run_config() : load_run_config(o.config);
        }

        void apply_modality(model::ModelSpec &spec, const std::string &modality)
        {
            if (modality == "vision")
                spec.modality = {true, false};
            else if (modality == "radar")
                spec.modality = {false, true};
            else
                spec.modality = {true, true};
        }

        void write_text(const fs::path &path, const std::string &text)
        {
            if (path.has_parent_path())
                fs::create_directories(path.parent_path());
            std::ofstream out(path, std::ios::trunc);
            if (!out)
                throw MissingArtifactError(path.string());
            out << text;
        }

        data::LoadedDataset load_data(const Options &o, const RunConfig &cfg)
        {
            if (o.data.empty())
                throw MissingArtifactError("--data <dataset directory>");
            auto ds = data::load_dataset(o.data);
            if (ds.info.window != cfg.generator.window)
                throw ConfigError("dataset on disk has W=" + std::to_string(ds.info.window), "dataset.window");
            if (ds.info.horizon != cfg.generator.horizon)
                throw ConfigError("dataset on disk has J=" + std::to_string(ds.info.horizon), "dataset.horizon");
            if (ds.info.num_beams != cfg.generator.codebook_size)
                throw ConfigError("dataset on disk has C=" + std::to_string(ds.info.num_beams), "scenario.codebook_size");
            return ds;
        }

        void print_log(std::ostream &out, const training::EpochLog &l)
        {
            out << "epoch " << l.epoch << "  lr " << l.lr << "  train " << l.train_total << "  val " << l.validation_loss
                << (l.best ? "  *" : "") << '\n';
        }

        int gen_data(const Options &o, std::ostream &out)
        {
            RunConfig cfg = load_config(o);
            if (o.seed)
                cfg.generator.seed = *o.seed;
            const auto ds = data::generate_dataset(cfg.generator);
            data::save_dataset(ds.samples, ds.info, o.out);
            data::save_slot_metadata(ds.slots, o.out);
            write_text(fs::path(o.out) / "config.json", run_config_to_json(cfg).dump(2) + "\n");
            out << "wrote " << ds.samples.size() << " samples (" << ds.slots.size() << " slots, "
                << ds.occlusions.size() << " occlusion and " << ds.clutter.size() << " clutter episodes) to " << o.out
                << '\n';
            return exit_success;
        }

        int train(const Options &o, bool teacher_role, std::ostream &out)
        {
            RunConfig cfg = load_config(o);
            if (o.seed)
                cfg.training.seed = *o.seed;
            const auto ds = load_data(o, cfg);
            const auto parts = data::split(ds.samples, cfg.split);

            model::ModelSpec spec = teacher_role ? cfg.teacher : cfg.student;
            apply_modality(spec, o.modality);
            training::TrainOptions options;
            fs::create_directories(o.out);
            options.log_path = fs::path(o.out) / "train_log.jsonl";
            options.on_epoch = [&](const training::EpochLog &l) { print_log(out, l); };

            std::optional<training::TrainResult> result;
            if (teacher_role || o.no_kd)
                result.emplace(training::train_teacher(spec, parts.train, parts.validation, cfg.training, options));
            else
            {
                if (o.teacher.empty())
                    throw MissingArtifactError("--teacher <checkpoint directory>");
                const model::Model teacher = model::load_model(o.teacher);
                result.emplace(
                    training::train_student_kd(spec, parts.train, parts.validation, teacher, cfg.training, options));
            }
            model::CheckpointMeta meta;
            meta.seed = cfg.training.seed;
            meta.epoch = result->best_epoch;
            meta.validation_loss = result->best_validation_loss;
            model::save_checkpoint(result->model, meta, o.out);
            out << "best epoch " << result->best_epoch << " (validation loss " << result->best_validation_loss
                << "), checkpoint in " << o.out << '\n';
            return exit_success;
        }

        int evaluate(const Options &o, std::ostream &out)
        {
            const RunConfig cfg = load_config(o);
            if (o.checkpoint.empty())
                throw MissingArtifactError("--checkpoint <checkpoint directory>");
            const auto ckpt = model::load_checkpoint(o.checkpoint);
            const auto ds = load_data(o, cfg);
            if (ckpt.predictor->num_beams() != ds.info.num_beams || ckpt.predictor->horizon() != ds.info.horizon)
                throw ConfigError("checkpoint does not match the dataset codebook or horizon", "model");

            std::vector<data::SequenceSample> samples;
            if (o.split == "all")
                samples = ds.samples;
            else
            {
                auto parts = data::split(ds.samples, cfg.split);
                samples = o.split == "train" ? std::move(parts.train) : std::move(parts.validation);
            }
            std::string identity = ckpt.predictor->identity();
            if (o.subset != "all")
            {
                const auto slots = data::load_slot_metadata(o.data);
                if (!slots)
                    throw MissingArtifactError((fs::path(o.data) / "slots.csv").string());
                const auto kind = o.subset == "vision-degraded" ? data::Degradation::vision : data::Degradation::radar;
                std::erase_if(samples, [&](const data::SequenceSample &s) { return !data::sample_degraded(s, *slots, kind); });
                identity += "@" + o.subset;
            }
            if (samples.empty())
                throw ConfigError("no samples in the selected split/subset", "dataset.train_fraction");

            const auto series = ckpt.predictor->predict(samples);
            std::vector<geometry::BeamLabels> labels;
            for (const auto &s : samples)
                labels.push_back(s.labels);
            const auto report = eval::compute_metrics(series, labels, identity, config_digest(cfg), cfg.evaluation);
            write_text(fs::path(o.out) / "metrics.jsonl", report.to_json().dump() + "\n");
            out << eval::results_table(std::span<const eval::MetricsReport>(&report, 1));
            return exit_success;
        }

        std::vector<eval::MetricsReport> read_metrics(const Options &o)
        {
            std::vector<eval::MetricsReport> reports;
            for (const auto &path : o.metrics)
            {
                std::ifstream in(path);
                if (!in)
                    throw MissingArtifactError(path);
                std::string line;
                while (std::getline(in, line))
                {
                    if (line.empty())
                        continue;
                    try
                    {
                        reports.push_back(eval::MetricsReport::from_json(nlohmann::json::parse(line)));
                    }
                    catch (const nlohmann::json::exception &e)
                    {
                        throw FormatError("'" + path + "': " + e.what());
                    }
                }
            }
            if (reports.empty())
                throw MissingArtifactError("--metrics <metrics.jsonl>");
            return reports;
        }

        int report(const Options &o, std::ostream &out)
        {
            const RunConfig cfg = load_config(o);
            std::string text;
            if (!o.metrics.empty())
            {
                const auto reports = read_metrics(o);
                text += "Averaged over slots (%)\n" + eval::results_table(reports) + "\n";
                text += "Per slot (%)\n" + eval::per_slot_table(reports) + "\n";
            }
            text += "Complexity\n" + eval::complexity_report(cfg.teacher, cfg.student);
            write_text(fs::path(o.out) / "report.txt", text);
            out << text;
            return exit_success;
        }

        int plot(const Options &o, std::ostream &out)
        {
            const auto reports = read_metrics(o);
            write_text(fs::path(o.out) / "topk.svg", eval::topk_bars_svg(reports));
            write_text(fs::path(o.out) / "dba.svg", eval::dba_lines_svg(reports));
            out << "wrote " << (fs::path(o.out) / "topk.svg").string() << " and " << (fs::path(o.out) / "dba.svg").string()
                << '\n';
            return exit_success;
        }
    }

    int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
    {
        Options o;
        CLI::App app{"beamtrack: sensing-aided beam tracking workbench", "beamtrack"};
        app.require_subcommand(1, 1);

        const auto common = [&](CLI::App *sub) {
            sub->add_option("--config", o.config, "run-config JSON file (defaults when omitted)");
            sub->add_option("--out", o.out, "output directory");
        };
        auto *gen = app.add_subcommand("gen-data", "synthesize and persist a dataset");
        common(gen);
        gen->add_option("--seed", o.seed, "scenario seed override");

        auto *tt = app.add_subcommand("train-teacher", "train the multimodal teacher");
        auto *ts = app.add_subcommand("train-student", "train the compact student (with distillation unless --no-kd)");
        for (auto *sub : {tt, ts})
        {
            common(sub);
            sub->add_option("--data", o.data, "dataset directory")->required();
            sub->add_option("--seed", o.seed, "training seed override");
            sub->add_option("--modality", o.modality, "input modalities")
                ->check(CLI::IsMember({"vision", "radar", "both"}));
        }
        ts->add_flag("--no-kd", o.no_kd, "train on the task loss only");
        ts->add_option("--teacher", o.teacher, "teacher checkpoint directory");

        auto *ev = app.add_subcommand("evaluate", "compute metrics for a checkpoint");
        common(ev);
        ev->add_option("--data", o.data, "dataset directory")->required();
        ev->add_option("--checkpoint", o.checkpoint, "checkpoint directory")->required();
        ev->add_option("--split", o.split, "samples to evaluate")->check(CLI::IsMember({"train", "validation", "all"}));
        ev->add_option("--subset", o.subset, "restrict to degraded episodes")
            ->check(CLI::IsMember({"all", "vision-degraded", "radar-degraded"}));
        ev->add_option("--seed", o.seed, "unused; accepted for uniformity");

        auto *rp = app.add_subcommand("report", "merge metrics and complexity into one table");
        common(rp);
        rp->add_option("--metrics", o.metrics, "metrics.jsonl files");

        auto *pl = app.add_subcommand("plot", "per-slot Top-k bars and DBA lines as SVG");
        common(pl);
        pl->add_option("--metrics", o.metrics, "metrics.jsonl files")->required();

        std::vector<std::string> argv_store{"beamtrack"};
        argv_store.insert(argv_store.end(), args.begin(), args.end());
        std::vector<char *> argv;
        for (auto &a : argv_store)
            argv.push_back(a.data());

        try
        {
            app.parse(static_cast<int>(argv.size()), argv.data());
        }
        catch (const CLI::CallForHelp &)
        {
            out << app.help();
            return exit_success;
        }
        catch (const CLI::ParseError &e)
        {
            err << "error: " << e.what() << "\n\n" << app.help();
            return exit_invalid_config;
        }

        try
        {
            if (gen->parsed())
                return gen_data(o, out);
            if (tt->parsed())
                return train(o, true, out);
            if (ts->parsed())
                return train(o, false, out);
            if (ev->parsed())
                return evaluate(o, out);
            if (rp->parsed())
                return report(o, out);
            return plot(o, out);
        }
        catch (const ConfigError &e)
        {
            err << "invalid config: " << e.what() << '\n';
            return exit_invalid_config;
        }
        catch (const MissingArtifactError &e)
        {
            err << "error: " << e.what() << '\n';
            return exit_missing_artifact;
        }
        catch (const FormatError &e)
        {
            err << "error: unreadable artifact: " << e.what() << '\n';
            return exit_missing_artifact;
        }
        catch (const TrainingAbort &e)
        {
            err << "training aborted: " << e.what() << '\n';
            return exit_training_abort;
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << '\n';
            return exit_failure;
        }
    }

    int run(int argc, char **argv)
    {
        std::vector<std::string> args(argv + 1, argv + argc);
        return run(args, std::cout, std::cerr);
    }
}
