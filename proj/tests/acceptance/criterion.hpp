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

#ifndef BEAMTRACK_ACCEPTANCE_CRITERION_HPP
#define BEAMTRACK_ACCEPTANCE_CRITERION_HPP

#include <cmath>
#include <cstdio>
#include <string>

namespace acceptance
{
    // Collects the individual checks of one criterion and prints each of them.
    class Criterion
    {
    public:
        bool check(bool ok, const std::string &what)
        {
            std::printf("    [%s] %s\n", ok ? " ok " : "FAIL", what.c_str());
            std::fflush(stdout);
            failures_ += ok ? 0 : 1;
            ++checks_;
            return ok;
        }

        bool near(double got, double want, double tolerance, const std::string &what)
        {
            char buf[160];
            std::snprintf(buf, sizeof buf, " (got %.12g, want %.12g, tol %.1e)", got, want, tolerance);
            return check(std::abs(got - want) <= tolerance, what + buf);
        }

        void note(const std::string &text)
        {
            std::printf("    %s\n", text.c_str());
            std::fflush(stdout);
        }

        bool passed() const noexcept { return failures_ == 0 && checks_ > 0; }
        int checks() const noexcept { return checks_; }
        int failures() const noexcept { return failures_; }

    private:
        int checks_ = 0;
        int failures_ = 0;
    };

    struct Options
    {
        // Criterion 6 schedule.
        int seeds = 3;
        int teacher_epochs = 30;
        int student_epochs = 30;
        double teacher_lr = 1e-3;
        double student_lr = 1e-3;
    };

    void unit_oracles(Criterion &c);
    void separability(Criterion &c);
    void radar_fft(Criterion &c);
    void gradient_checks(Criterion &c);
    void complexity_targets(Criterion &c);
    void end_to_end_ordering(Criterion &c, const Options &options);
    void pipeline_invariants(Criterion &c);
    void random_baseline(Criterion &c);
}

#endif
