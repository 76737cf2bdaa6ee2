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

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace fieldport::cli {

/// printf("%.17g"); round-trips every double.
std::string format_double(double v);

/// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_atomic(const std::filesystem::path &path, const std::string &content);

/// RFC 4180 table with CRLF line ends. Fields are quoted only when needed.
class CsvTable {
   public:
    explicit CsvTable(std::vector<std::string> header);
    void add_row(std::vector<std::string> row);
    size_t rows() const {
        return rows_.size();
    }
    std::string str() const;

   private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Callers store
/// results by index, so the output does not depend on the worker count.
/// The exception of the lowest failing index is rethrown.
template <class F>
void parallel_for(size_t n, int threads, F &&fn) {
    size_t workers = std::min<size_t>(n, static_cast<size_t>(std::max(threads, 1)));
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto work = [&] {
        for (size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back(work);
    }
    for (auto &t : pool) {
        t.join();
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// SVG 1.1 line plot, one polyline per series, fixed palette.
std::string svg_line_plot(const std::string &title, const std::string &x_label, const std::string &y_label,
                          const std::vector<Series> &series);

/// SVG 1.1 heatmap of values[row][col] with rows along y and columns along
/// x, on a fixed viridis-like color map scaled to [min, max].
std::string svg_heatmap(const std::string &title, const std::string &x_label, const std::string &y_label,
                        const std::vector<double> &xs, const std::vector<double> &ys,
                        const std::vector<std::vector<double>> &values);

}  // namespace fieldport::cli
