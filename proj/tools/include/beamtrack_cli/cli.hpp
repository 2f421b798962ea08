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

#ifndef BEAMTRACK_CLI_HPP
#define BEAMTRACK_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace beamtrack::cli
{
    enum ExitCode : int
    {
        exit_success = 0,
        exit_failure = 1,
        exit_invalid_config = 2,
        exit_missing_artifact = 3,
        exit_training_abort = 4
    };

    // Runs one subcommand: gen-data, train-teacher, train-student, evaluate, report, plot.
    int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);
    int run(int argc, char **argv);
}

#endif
