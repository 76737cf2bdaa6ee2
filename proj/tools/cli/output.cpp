// Copyright 2026 The fieldport Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "output.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace fieldport::cli {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_atomic(const std::filesystem::path &path, const std::string &content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

namespace {

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') {
            q += '"';
        }
        q += c;
    }
    return q + '"';
}

void append_row(std::string &out, const std::vector<std::string> &row) {
    for (size_t i = 0; i < row.size(); ++i) {
        if (i) {
            out += ',';
        }
        out += csv_field(row[i]);
    }
    out += "\r\n";
}

std::string xml_escape(const std::string &s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '&': o += "&amp;"; break;
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '"': o += "&quot;"; break;
            default: o += c;
        }
    }
    return o;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

struct Range {
    double lo = 0, hi = 1;
};

Range padded(double lo, double hi) {
    if (!(hi > lo)) {
        double d = std::max(std::abs(lo) * 0.1, 1.0);
        return {lo - d, hi + d};
    }
    return {lo, hi};
}

std::string frame(const std::string &title, const std::string &x_label, const std::string &y_label, Range xr,
                  Range yr, double plot_right) {
    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title)
      << "</text>\n";
    double x0 = kLeft, x1 = plot_right, y0 = kHeight - kBottom, y1 = kTop;
    s << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0) << "\" height=\""
      << num(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
        double px = x0 + (x1 - x0) * i / 4.0;
        s << "<line x1=\"" << num(px) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(px) << "\" y2=\"" << num(y0 + 5)
          << "\" stroke=\"black\"/>\n"
          << "<text x=\"" << num(px) << "\" y=\"" << num(y0 + 18) << "\" text-anchor=\"middle\">" << tick(fx)
          << "</text>\n";
        double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
        double py = y0 - (y0 - y1) * i / 4.0;
        s << "<line x1=\"" << num(x0 - 5) << "\" y1=\"" << num(py) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(py)
          << "\" stroke=\"black\"/>\n"
          << "<text x=\"" << num(x0 - 8) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">" << tick(fy)
          << "</text>\n";
    }
    s << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 12) << "\" text-anchor=\"middle\">"
      << xml_escape(x_label) << "</text>\n"
      << "<text x=\"16\" y=\"" << num((y0 + y1) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << num((y0 + y1) / 2) << ")\">" << xml_escape(y_label) << "</text>\n";
    return s.str();
}

constexpr std::array<const char *, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

// viridis samples at 0, 0.25, 0.5, 0.75, 1
constexpr std::array<std::array<double, 3>, 5> kMap{{{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98},
                                                     {253, 231, 37}}};

std::string color(double u) {
    u = std::clamp(std::isfinite(u) ? u : 0.0, 0.0, 1.0);
    double pos = u * 4.0;
    int i = std::min(static_cast<int>(pos), 3);
    double f = pos - i;
    char buf[8];
    int c[3];
    for (int k = 0; k < 3; ++k) {
        c[k] = static_cast<int>(std::lround(kMap[i][k] + f * (kMap[i + 1][k] - kMap[i][k])));
    }
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
    return buf;
}

}  // namespace

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header_.size()) {
        throw std::logic_error("csv row width differs from header");
    }
    rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::string out;
    append_row(out, header_);
    for (const auto &r : rows_) {
        append_row(out, r);
    }
    return out;
}

std::string svg_line_plot(const std::string &title, const std::string &x_label, const std::string &y_label,
                          const std::vector<Series> &series) {
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
    for (const auto &s : series) {
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                xlo = std::min(xlo, s.x[i]);
                xhi = std::max(xhi, s.x[i]);
                ylo = std::min(ylo, s.y[i]);
                yhi = std::max(yhi, s.y[i]);
            }
        }
    }
    if (!std::isfinite(xlo)) {
        xlo = ylo = 0;
        xhi = yhi = 1;
    }
    Range xr = padded(xlo, xhi), yr = padded(ylo, yhi);
    double x0 = kLeft, x1 = kWidth - kRight - 110, y0 = kHeight - kBottom, y1 = kTop;
    std::string out = frame(title, x_label, y_label, xr, yr, x1);
    std::ostringstream s;
    for (size_t k = 0; k < series.size(); ++k) {
        const auto &sr = series[k];
        const char *c = kPalette[k % kPalette.size()];
        s << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (size_t i = 0; i < sr.x.size(); ++i) {
            if (!std::isfinite(sr.x[i]) || !std::isfinite(sr.y[i])) {
                continue;
            }
            double px = x0 + (sr.x[i] - xr.lo) / (xr.hi - xr.lo) * (x1 - x0);
            double py = y0 - (sr.y[i] - yr.lo) / (yr.hi - yr.lo) * (y0 - y1);
            s << (first ? "" : " ") << num(px) << ',' << num(py);
            first = false;
        }
        s << "\"/>\n";
        double ly = kTop + 12 + 16 * static_cast<double>(k);
        s << "<line x1=\"" << num(x1 + 10) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(x1 + 30) << "\" y2=\""
          << num(ly - 4) << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n"
          << "<text x=\"" << num(x1 + 34) << "\" y=\"" << num(ly) << "\">" << xml_escape(sr.name) << "</text>\n";
    }
    return out + s.str() + "</svg>\n";
}

std::string svg_heatmap(const std::string &title, const std::string &x_label, const std::string &y_label,
                        const std::vector<double> &xs, const std::vector<double> &ys,
                        const std::vector<std::vector<double>> &values) {
    double vlo = std::numeric_limits<double>::infinity(), vhi = -vlo;
    for (const auto &row : values) {
        for (double v : row) {
            if (std::isfinite(v)) {
                vlo = std::min(vlo, v);
                vhi = std::max(vhi, v);
            }
        }
    }
    if (!std::isfinite(vlo)) {
        vlo = 0;
        vhi = 1;
    }
    double span = vhi > vlo ? vhi - vlo : 1.0;
    // Cell edges sit halfway between samples.
    auto edges = [](const std::vector<double> &c) {
        std::vector<double> e(c.size() + 1);
        if (c.size() == 1) {
            e[0] = c[0] - 0.5;
            e[1] = c[0] + 0.5;
            return e;
        }
        for (size_t i = 1; i < c.size(); ++i) {
            e[i] = 0.5 * (c[i - 1] + c[i]);
        }
        e[0] = c[0] - (e[1] - c[0]);
        e[c.size()] = c.back() + (c.back() - e[c.size() - 1]);
        return e;
    };
    auto ex = edges(xs), ey = edges(ys);
    Range xr{ex.front(), ex.back()}, yr{ey.front(), ey.back()};
    double x0 = kLeft, x1 = kWidth - kRight - 80, y0 = kHeight - kBottom, y1 = kTop;
    std::string out = frame(title, x_label, y_label, xr, yr, x1);
    std::ostringstream s;
    auto px = [&](double v) { return x0 + (v - xr.lo) / (xr.hi - xr.lo) * (x1 - x0); };
    auto py = [&](double v) { return y0 - (v - yr.lo) / (yr.hi - yr.lo) * (y0 - y1); };
    for (size_t r = 0; r < ys.size(); ++r) {
        for (size_t c = 0; c < xs.size(); ++c) {
            double a = px(ex[c]), b = px(ex[c + 1]), top = py(ey[r + 1]), bot = py(ey[r]);
            s << "<rect x=\"" << num(a) << "\" y=\"" << num(top) << "\" width=\"" << num(b - a) << "\" height=\""
              << num(bot - top) << "\" fill=\"" << color((values[r][c] - vlo) / span) << "\"/>\n";
        }
    }
    double bx = x1 + 20, bw = 16;
    for (int i = 0; i < 64; ++i) {
        double u = (i + 0.5) / 64.0;
        double top = y0 - (y0 - y1) * (i + 1) / 64.0;
        s << "<rect x=\"" << num(bx) << "\" y=\"" << num(top) << "\" width=\"" << num(bw) << "\" height=\""
          << num((y0 - y1) / 64.0 + 0.5) << "\" fill=\"" << color(u) << "\"/>\n";
    }
    s << "<text x=\"" << num(bx + bw + 4) << "\" y=\"" << num(y1 + 4) << "\">" << tick(vhi) << "</text>\n"
      << "<text x=\"" << num(bx + bw + 4) << "\" y=\"" << num(y0 + 4) << "\">" << tick(vlo) << "</text>\n";
    return out + s.str() + "</svg>\n";
}

}  // namespace fieldport::cli
