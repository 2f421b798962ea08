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

namespace beamtrack::model
{
    namespace
    {
        using ll = long long;

        void add_branch(ComplexityReport &r, const std::string &name, const ModelSpec &s, int in_channels,
                        const std::vector<int> &widths, int out_dim)
        {
            const ll k2 = static_cast<ll>(s.kernel) * s.kernel;
            const ll window = s.window;
            int h = s.input_height, w = s.input_width;
            ll c_in = in_channels;
            for (std::size_t i = 0; i < widths.size(); ++i)
            {
                h = (h + 2 * (s.kernel / 2) - s.kernel) / 2 + 1;
                w = (w + 2 * (s.kernel / 2) - s.kernel) / 2 + 1;
                const ll c_out = widths[i];
                const ll pixels = static_cast<ll>(h) * w;
                BlockCount b{name + ".conv" + std::to_string(i), 0, 0};
                if (s.conv_kind == ConvKind::standard)
                {
                    b.params = c_out * c_in * k2 + c_out;
                    b.flops = 2 * pixels * c_out * c_in * k2 * window;
                }
                else
                {
                    b.params = c_in * k2 + c_in + c_out * c_in + c_out;
                    b.flops = 2 * pixels * (c_in * k2 + c_in * c_out) * window;
                }
                r.breakdown.push_back(b);
                c_in = c_out;
            }
            const ll features = c_in * s.pool_grid * s.pool_grid;
            r.breakdown.push_back({name + ".projection", features * out_dim + out_dim, 2 * features * out_dim * window});
        }
    }

    ComplexityReport complexity(const ModelSpec &s)
    {
        s.validate();
        ComplexityReport r;
        const ll window = s.window;
        const ll slots = s.horizon + 1;
        if (s.modality.vision)
            add_branch(r, "vision", s, 1, s.vision_channels, s.d0);
        if (s.modality.radar)
            add_branch(r, "radar", s, 2, s.radar_channels, s.d1);

        const ll fin = s.d0 + s.d1;
        r.breakdown.push_back({"fusion", fin * s.d + s.d, 2 * fin * s.d * window});

        ll in = s.d;
        const ll h = s.gru_hidden;
        for (int l = 0; l < s.gru_layers; ++l)
        {
            r.breakdown.push_back({"gru" + std::to_string(l), 3 * h * (in + h) + 6 * h, 2 * 3 * h * (in + h) * window});
            in = h;
        }

        // Query, key, value and output projections plus score and value products.
        const ll attn_params = slots * h + 4 * (h * h + h);
        const ll attn_flops = 2 * h * h * slots      // queries
                              + 2 * 2 * h * h * window // keys, values
                              + 2 * slots * window * h // scores
                              + 2 * slots * window * h // weighted values
                              + 2 * h * h * slots;     // output
        r.breakdown.push_back({"attention", attn_params, attn_flops});

        const ll ch = s.classifier_hidden;
        r.breakdown.push_back({"classifier", h * ch + ch + ch * s.num_beams + s.num_beams,
                               2 * (h * ch + ch * s.num_beams) * slots});

        for (const auto &b : r.breakdown)
        {
            r.param_count += b.params;
            r.flop_count += b.flops;
        }
        return r;
    }

    long long count_params(const ModelSpec &spec) { return complexity(spec).param_count; }
    long long count_flops(const ModelSpec &spec) { return complexity(spec).flop_count; }
}
