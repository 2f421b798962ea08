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

// Criterion 6: desk-scale ordering of teacher, single-modality ablations and students.

#include "criterion.hpp"

#include "beamtrack/dataset_generator.hpp"
#include "beamtrack/metrics.hpp"
#include "beamtrack/models.hpp"
#include "beamtrack/training.hpp"

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

namespace acceptance
{
    namespace
    {
        using namespace beamtrack;

        constexpr int map_size = 32;
        constexpr double ablation_margin = 0.5; // points
        constexpr double teacher_student_margin = 1.0;

        struct Subsets
        {
            std::vector<data::SequenceSample> all, vision_degraded, radar_degraded;
        };

        struct Scores
        {
            double all = 0.0, vision_degraded = 0.0, radar_degraded = 0.0;
        };

        double atop3(const model::Predictor &p, const std::vector<data::SequenceSample> &samples)
        {
            const auto series = p.predict(samples);
            std::vector<geometry::BeamLabels> labels;
            for (const auto &s : samples)
                labels.push_back(s.labels);
            return 100.0 * eval::compute_metrics(series, labels, p.identity(), "").atop3;
        }

        Scores score(const model::Predictor &p, const Subsets &v)
        {
            return {atop3(p, v.all), atop3(p, v.vision_degraded), atop3(p, v.radar_degraded)};
        }

        void accumulate(Scores &sum, const Scores &s, int n)
        {
            sum.all += s.all / n;
            sum.vision_degraded += s.vision_degraded / n;
            sum.radar_degraded += s.radar_degraded / n;
        }

        std::string fmt(const char *name, const Scores &s)
        {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%-22s ATop-3 all %6.2f  vision-degraded %6.2f  radar-degraded %6.2f", name,
                          s.all, s.vision_degraded, s.radar_degraded);
            return buf;
        }

        double seconds_since(std::chrono::steady_clock::time_point t)
        {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
        }
    }

    void end_to_end_ordering(Criterion &c, const Options &options)
    {
        data::GeneratorConfig gen;
        gen.vision_height = gen.vision_width = map_size;
        gen.radar.map_height = gen.radar.map_width = map_size;
        gen.seed = 2024;
        auto t0 = std::chrono::steady_clock::now();
        const data::GeneratedDataset ds = data::generate_dataset(gen);
        char buf[200];
        std::snprintf(buf, sizeof buf, "dataset: %zu samples, %zu occlusion and %zu clutter episodes (%.1f s)",
                      ds.samples.size(), ds.occlusions.size(), ds.clutter.size(), seconds_since(t0));
        c.note(buf);
        c.check(ds.info.num_beams == 32 && gen.array.num_antennas == 32 && ds.info.window == 8 && ds.info.horizon == 3,
                "C = 32, N_t = 32, W = 8, J = 3");
        c.check(ds.samples.size() >= 1800 && ds.samples.size() <= 2200, "about 2,000 samples");
        c.check(!ds.occlusions.empty() && !ds.clutter.empty(), "occlusion and clutter episodes present");

        data::SplitSpec split_spec;
        const data::SplitResult split = data::split(ds.samples, split_spec);
        Subsets val;
        val.all = split.validation;
        for (const auto &s : split.validation)
        {
            if (data::sample_degraded(s, ds.slots, data::Degradation::vision))
                val.vision_degraded.push_back(s);
            if (data::sample_degraded(s, ds.slots, data::Degradation::radar))
                val.radar_degraded.push_back(s);
        }
        std::snprintf(buf, sizeof buf, "validation: %zu samples, %zu vision-degraded, %zu radar-degraded",
                      val.all.size(), val.vision_degraded.size(), val.radar_degraded.size());
        c.note(buf);
        c.check(!val.vision_degraded.empty() && !val.radar_degraded.empty(), "degraded validation subsets non-empty");

        model::ModelSpec teacher_spec = model::default_teacher_spec();
        teacher_spec.input_height = teacher_spec.input_width = map_size;
        model::ModelSpec vision_spec = teacher_spec, radar_spec = teacher_spec;
        vision_spec.modality.radar = false;
        radar_spec.modality.vision = false;
        model::ModelSpec student_spec = model::default_student_spec();
        student_spec.input_height = student_spec.input_width = map_size;

        Scores teacher, vision_only, radar_only, student_plain, student_kd;
        for (int k = 0; k < options.seeds; ++k)
        {
            training::TrainConfig tc;
            tc.lr_init = options.teacher_lr;
            tc.max_epochs = tc.cycle_length = tc.patience = options.teacher_epochs;
            tc.seed = 100 + static_cast<std::uint64_t>(k);
            training::TrainConfig sc = tc;
            sc.lr_init = options.student_lr;
            sc.max_epochs = sc.cycle_length = sc.patience = options.student_epochs;

            t0 = std::chrono::steady_clock::now();
            const auto t = training::train_teacher(teacher_spec, split.train, split.validation, tc);
            const Scores st = score(t.model, val);
            c.note(fmt("teacher", st) + "  (" + std::to_string(static_cast<int>(seconds_since(t0))) + " s)");

            t0 = std::chrono::steady_clock::now();
            const auto tv = training::train_teacher(vision_spec, split.train, split.validation, tc);
            const Scores sv = score(tv.model, val);
            c.note(fmt("vision-only", sv) + "  (" + std::to_string(static_cast<int>(seconds_since(t0))) + " s)");

            t0 = std::chrono::steady_clock::now();
            const auto tr = training::train_teacher(radar_spec, split.train, split.validation, tc);
            const Scores sr = score(tr.model, val);
            c.note(fmt("radar-only", sr) + "  (" + std::to_string(static_cast<int>(seconds_since(t0))) + " s)");

            t0 = std::chrono::steady_clock::now();
            const auto sp = training::train_teacher(student_spec, split.train, split.validation, sc);
            const Scores ssp = score(sp.model, val);
            c.note(fmt("student without KD", ssp) + "  (" + std::to_string(static_cast<int>(seconds_since(t0))) + " s)");

            t0 = std::chrono::steady_clock::now();
            const auto sk = training::train_student_kd(student_spec, split.train, split.validation, t.model, sc);
            const Scores ssk = score(sk.model, val);
            c.note(fmt("student with KD", ssk) + "  (" + std::to_string(static_cast<int>(seconds_since(t0))) + " s)");

            accumulate(teacher, st, options.seeds);
            accumulate(vision_only, sv, options.seeds);
            accumulate(radar_only, sr, options.seeds);
            accumulate(student_plain, ssp, options.seeds);
            accumulate(student_kd, ssk, options.seeds);
        }

        c.note("mean over " + std::to_string(options.seeds) + " seeds:");
        c.note(fmt("teacher", teacher));
        c.note(fmt("vision-only", vision_only));
        c.note(fmt("radar-only", radar_only));
        c.note(fmt("student without KD", student_plain));
        c.note(fmt("student with KD", student_kd));

        c.check(teacher.all >= vision_only.all - ablation_margin, "(a) teacher >= vision-only - 0.5 points");
        c.check(teacher.all >= radar_only.all - ablation_margin, "(a) teacher >= radar-only - 0.5 points");
        c.check(teacher.vision_degraded > vision_only.vision_degraded,
                "(a) teacher > vision-only on the vision-degraded subset");
        c.check(teacher.radar_degraded > radar_only.radar_degraded,
                "(a) teacher > radar-only on the radar-degraded subset");
        c.check(student_kd.all >= student_plain.all, "(b) student with KD >= student without KD");
        c.check(teacher.all >= student_kd.all - teacher_student_margin, "(c) teacher >= student with KD - 1.0 point");
    }
}
