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

#include "beamtrack/reports.hpp"

#include "beamtrack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace beamtrack::eval
{
    namespace
    {
        std::string fmt(const char *format, double v)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, format, v);
            return buf;
        }

        std::string pct(double v) { return fmt("%.2f", 100.0 * v); }

        std::string pad(const std::string &s, std::size_t width, bool right = true)
        {
            if (s.size() >= width)
                return s;
            const std::string fill(width - s.size(), ' ');
            return right ? fill + s : s + fill;
        }

        const char *palette(std::size_t i)
        {
            static const char *colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"};
            return colors[i % 7];
        }

        void check_reports(std::span<const MetricsReport> reports)
        {
            if (reports.empty())
                throw ShapeError("no metrics reports");
            for (const auto &r : reports)
                if (r.top3.size() != reports.front().top3.size())
                    throw ShapeError("metrics reports cover different horizons");
        }

        std::string escape(const std::string &s)
        {
            std::string out;
            for (char c : s)
            {
                if (c == '<')
                    out += "&lt;";
                else if (c == '>')
                    out += "&gt;";
                else if (c == '&')
                    out += "&amp;";
                else
                    out += c;
            }
            return out;
        }

        struct Frame
        {
            double width = 640, height = 400, left = 60, right = 150, top = 40, bottom = 50;
            double plot_w() const { return width - left - right; }
            double plot_h() const { return height - top - bottom; }
            double y(double v, double lo, double hi) const { return top + plot_h() * (1.0 - (v - lo) / (hi - lo)); }
        };

        void axes(std::ostringstream &os, const Frame &f, const std::string &title, const std::string &ylabel, double lo,
                  double hi)
        {
            os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\"" << f.height
               << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
            os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
            os << "<text x=\"" << f.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
               << "</text>\n";
            for (int i = 0; i <= 5; ++i)
            {
                const double v = lo + (hi - lo) * i / 5.0;
                const double y = f.y(v, lo, hi);
                os << "<line x1=\"" << f.left << "\" x2=\"" << f.left + f.plot_w() << "\" y1=\"" << y << "\" y2=\"" << y
                   << "\" stroke=\"#ddd\"/>\n";
                os << "<text x=\"" << f.left - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << fmt("%.0f", 100 * v)
                   << "</text>\n";
            }
            os << "<rect x=\"" << f.left << "\" y=\"" << f.top << "\" width=\"" << f.plot_w() << "\" height=\""
               << f.plot_h() << "\" fill=\"none\" stroke=\"black\"/>\n";
            os << "<text transform=\"translate(16," << f.top + f.plot_h() / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
               << ylabel << "</text>\n";
        }

        void legend(std::ostringstream &os, const Frame &f, std::span<const MetricsReport> reports)
        {
            for (std::size_t m = 0; m < reports.size(); ++m)
            {
                const double y = f.top + 10 + 18.0 * static_cast<double>(m);
                os << "<rect x=\"" << f.width - f.right + 12 << "\" y=\"" << y - 9 << "\" width=\"12\" height=\"12\" fill=\""
                   << palette(m) << "\"/>\n";
                os << "<text x=\"" << f.width - f.right + 30 << "\" y=\"" << y + 1 << "\">" << escape(reports[m].model)
                   << "</text>\n";
            }
        }
    }

    ComplexityComparison compare_complexity(const model::ModelSpec &teacher, const model::ModelSpec &student)
    {
        ComplexityComparison c;
        c.teacher = model::complexity(teacher);
        c.student = model::complexity(student);
        c.param_ratio = static_cast<double>(c.teacher.param_count) / static_cast<double>(c.student.param_count);
        c.flop_ratio = static_cast<double>(c.teacher.flop_count) / static_cast<double>(c.student.flop_count);
        c.params_pass = c.param_ratio >= param_ratio_threshold;
        c.flops_pass = c.flop_ratio >= flop_ratio_threshold;
        return c;
    }

    std::string complexity_report(const model::ModelSpec &teacher, const model::ModelSpec &student)
    {
        const ComplexityComparison c = compare_complexity(teacher, student);
        std::ostringstream os;
        os << pad("Model", 10, false) << " | " << pad("Params (M)", 12) << " | " << pad("FLOPs (M)", 12) << '\n';
        os << std::string(40, '-') << '\n';
        os << pad("Teacher", 10, false) << " | " << pad(fmt("%.3f", c.teacher.param_count / 1e6), 12) << " | "
           << pad(fmt("%.3f", c.teacher.flop_count / 1e6), 12) << '\n';
        os << pad("Student", 10, false) << " | " << pad(fmt("%.3f", c.student.param_count / 1e6), 12) << " | "
           << pad(fmt("%.3f", c.student.flop_count / 1e6), 12) << '\n';
        os << '\n';
        os << "param ratio: " << fmt("%.2f", c.param_ratio) << "x (threshold >= " << fmt("%.1f", param_ratio_threshold)
           << "x: " << (c.params_pass ? "PASS" : "FAIL") << "; reference " << fmt("%.0f", reference_param_ratio)
           << "x)\n";
        os << "FLOP ratio:  " << fmt("%.2f", c.flop_ratio) << "x (threshold >= " << fmt("%.1f", flop_ratio_threshold)
           << "x: " << (c.flops_pass ? "PASS" : "FAIL") << "; reference " << fmt("%.0f", reference_flop_ratio) << "x)\n";
        os << "FLOPs are per sample (window of " << teacher.window << " slots), one multiply-accumulate = 2 FLOPs.\n";
        return os.str();
    }

    std::string results_table(std::span<const MetricsReport> reports)
    {
        check_reports(reports);
        std::size_t width = 10;
        for (const auto &r : reports)
            width = std::max(width, r.model.size());
        std::ostringstream os;
        os << pad("Metric", 8, false);
        for (const auto &r : reports)
            os << " | " << pad(r.model, width);
        os << '\n' << std::string(8 + reports.size() * (width + 3), '-') << '\n';
        const auto row = [&](const char *name, double MetricsReport::*field) {
            os << pad(name, 8, false);
            for (const auto &r : reports)
                os << " | " << pad(pct(r.*field), width);
            os << '\n';
        };
        row("ATop-1", &MetricsReport::atop1);
        row("ATop-3", &MetricsReport::atop3);
        row("ATop-5", &MetricsReport::atop5);
        row("ADBA", &MetricsReport::adba);
        os << pad("Samples", 8, false);
        for (const auto &r : reports)
            os << " | " << pad(std::to_string(r.sample_count), width);
        os << '\n';
        return os.str();
    }

    std::string per_slot_table(std::span<const MetricsReport> reports)
    {
        check_reports(reports);
        std::ostringstream os;
        const std::size_t slots = reports.front().top3.size();
        os << pad("Model", 18, false) << " | " << pad("Metric", 6, false);
        for (std::size_t j = 0; j < slots; ++j)
            os << " | " << pad("t+" + std::to_string(j), 7);
        os << '\n';
        for (const auto &r : reports)
        {
            const auto row = [&](const char *name, const std::vector<double> &v) {
                os << pad(r.model, 18, false) << " | " << pad(name, 6, false);
                for (double x : v)
                    os << " | " << pad(pct(x), 7);
                os << '\n';
            };
            row("Top-3", r.top3);
            row("Top-5", r.top5);
            row("DBA", r.dba);
        }
        return os.str();
    }

    std::string topk_bars_svg(std::span<const MetricsReport> reports)
    {
        check_reports(reports);
        Frame f;
        std::ostringstream os;
        axes(os, f, "Top-3 (solid) and Top-5 gain (light) per slot", "accuracy (%)", 0.0, 1.0);
        const std::size_t slots = reports.front().top3.size();
        const double group = f.plot_w() / static_cast<double>(slots);
        const double bar = group * 0.8 / static_cast<double>(reports.size());
        for (std::size_t j = 0; j < slots; ++j)
        {
            const double gx = f.left + group * static_cast<double>(j) + group * 0.1;
            for (std::size_t m = 0; m < reports.size(); ++m)
            {
                const double x = gx + bar * static_cast<double>(m);
                const double t3 = reports[m].top3[j], t5 = std::max(reports[m].top5[j], t3);
                const double y3 = f.y(t3, 0, 1), y5 = f.y(t5, 0, 1), y0 = f.y(0, 0, 1);
                os << "<rect x=\"" << x << "\" y=\"" << y3 << "\" width=\"" << bar * 0.9 << "\" height=\"" << y0 - y3
                   << "\" fill=\"" << palette(m) << "\"/>\n";
                os << "<rect x=\"" << x << "\" y=\"" << y5 << "\" width=\"" << bar * 0.9 << "\" height=\"" << y3 - y5
                   << "\" fill=\"" << palette(m) << "\" fill-opacity=\"0.35\"/>\n";
            }
            os << "<text x=\"" << gx + group * 0.4 << "\" y=\"" << f.top + f.plot_h() + 18
               << "\" text-anchor=\"middle\">t+" << j << "</text>\n";
        }
        legend(os, f, reports);
        os << "</svg>\n";
        return os.str();
    }

    std::string dba_lines_svg(std::span<const MetricsReport> reports)
    {
        check_reports(reports);
        Frame f;
        double lo = 1.0;
        for (const auto &r : reports)
            for (double v : r.dba)
                lo = std::min(lo, v);
        lo = std::max(0.0, std::floor(lo * 10.0 - 0.5) / 10.0);
        const double hi = 1.0;
        std::ostringstream os;
        axes(os, f, "DBA score per slot", "DBA (%)", lo, hi);
        const std::size_t slots = reports.front().dba.size();
        const double step = slots > 1 ? f.plot_w() / static_cast<double>(slots - 1) : 0.0;
        const auto x_of = [&](std::size_t j) { return slots > 1 ? f.left + step * static_cast<double>(j) : f.left + f.plot_w() / 2; };
        for (std::size_t j = 0; j < slots; ++j)
            os << "<text x=\"" << x_of(j) << "\" y=\"" << f.top + f.plot_h() + 18 << "\" text-anchor=\"middle\">t+" << j
               << "</text>\n";
        for (std::size_t m = 0; m < reports.size(); ++m)
        {
            os << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << palette(m) << "\" points=\"";
            for (std::size_t j = 0; j < slots; ++j)
                os << x_of(j) << ',' << f.y(reports[m].dba[j], lo, hi) << ' ';
            os << "\"/>\n";
            for (std::size_t j = 0; j < slots; ++j)
                os << "<circle cx=\"" << x_of(j) << "\" cy=\"" << f.y(reports[m].dba[j], lo, hi) << "\" r=\"3\" fill=\""
                   << palette(m) << "\"/>\n";
        }
        legend(os, f, reports);
        os << "</svg>\n";
        return os.str();
    }
}
