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

#include "beamtrack/image_ops.hpp"

#include "beamtrack/errors.hpp"

#include <algorithm>
#include <cmath>

namespace beamtrack
{
    Eigen::MatrixXd resize_bilinear(const Eigen::MatrixXd &image, int out_rows, int out_cols)
    {
        if (out_rows <= 0 || out_cols <= 0 || image.rows() == 0 || image.cols() == 0)
            throw ShapeError("resize_bilinear: empty input or output size");
        if (image.rows() == out_rows && image.cols() == out_cols)
            return image;

        const double sy = static_cast<double>(image.rows()) / out_rows;
        const double sx = static_cast<double>(image.cols()) / out_cols;
        const double max_y = static_cast<double>(image.rows() - 1);
        const double max_x = static_cast<double>(image.cols() - 1);

        Eigen::MatrixXd out(out_rows, out_cols);
        for (int c = 0; c < out_cols; ++c)
        {
            const double x = std::clamp((c + 0.5) * sx - 0.5, 0.0, max_x);
            const auto x0 = static_cast<Eigen::Index>(std::floor(x));
            const Eigen::Index x1 = std::min<Eigen::Index>(x0 + 1, image.cols() - 1);
            const double wx = x - static_cast<double>(x0);
            for (int r = 0; r < out_rows; ++r)
            {
                const double y = std::clamp((r + 0.5) * sy - 0.5, 0.0, max_y);
                const auto y0 = static_cast<Eigen::Index>(std::floor(y));
                const Eigen::Index y1 = std::min<Eigen::Index>(y0 + 1, image.rows() - 1);
                const double wy = y - static_cast<double>(y0);
                const double top = (1.0 - wx) * image(y0, x0) + wx * image(y0, x1);
                const double bottom = (1.0 - wx) * image(y1, x0) + wx * image(y1, x1);
                out(r, c) = (1.0 - wy) * top + wy * bottom;
            }
        }
        return out;
    }

    Eigen::MatrixXd normalize_min_max(const Eigen::MatrixXd &image)
    {
        const double lo = image.minCoeff();
        const double hi = image.maxCoeff();
        if (!(hi > lo))
            return Eigen::MatrixXd::Zero(image.rows(), image.cols());
        return ((image.array() - lo) / (hi - lo)).matrix();
    }

    Eigen::Index argmax_flat(const Eigen::MatrixXd &image, Eigen::Index *row, Eigen::Index *col)
    {
        Eigen::Index best_r = 0, best_c = 0;
        double best = image(0, 0);
        for (Eigen::Index r = 0; r < image.rows(); ++r)
            for (Eigen::Index c = 0; c < image.cols(); ++c)
                if (image(r, c) > best)
                {
                    best = image(r, c);
                    best_r = r;
                    best_c = c;
                }
        if (row)
            *row = best_r;
        if (col)
            *col = best_c;
        return best_r * image.cols() + best_c;
    }
}
