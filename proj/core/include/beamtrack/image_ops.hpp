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

#ifndef BEAMTRACK_IMAGE_OPS_HPP
#define BEAMTRACK_IMAGE_OPS_HPP

#include <Eigen/Core>

namespace beamtrack
{
    // Bilinear resampling with half-pixel centers; identity when the sizes already match.
    // Output values stay within [min(input), max(input)].
    Eigen::MatrixXd resize_bilinear(const Eigen::MatrixXd &image, int out_rows, int out_cols);

    // Min-max rescale to [0, 1]; a constant image maps to all zeros.
    Eigen::MatrixXd normalize_min_max(const Eigen::MatrixXd &image);

    // Row-major (row, col) of the first maximum.
    Eigen::Index argmax_flat(const Eigen::MatrixXd &image, Eigen::Index *row = nullptr, Eigen::Index *col = nullptr);
}

#endif
