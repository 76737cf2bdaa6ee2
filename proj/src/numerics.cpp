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

#include "fieldport/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>

#include "fieldport/error.hpp"

namespace fieldport::numerics {

namespace {

constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452, 0.930157491355708226001207180059508,
    0.865063366688984510732096688423493, 0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784, 0.294392862701460198131126603103866,
    0.148874338981631210884826001129720, 0.000000000000000000000000000000000};

constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390, 0.054755896574351996031381300244580,
    0.075039674810919952767043140916190, 0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980184854, 0.134709217311473325928054001771707, 0.142775938577060080797094273138717,
    0.147739104901338491374841515972068, 0.149445554002916905664936468389821};

// Gauss weights for the odd-indexed Kronrod nodes.
constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697, 0.219086362515982043995534934228163,
    0.269266719309996355091226921569469, 0.295524224714752870173892994651338};

struct Panel {
    double a, b;
    QuadratureResult r;
};

struct ByError {
    bool operator()(const Panel &x, const Panel &y) const {
        if (x.r.est_error != y.r.est_error) {
            return x.r.est_error < y.r.est_error;
        }
        return x.a > y.a;
    }
};

double tolerance(const QuadratureOptions &opts, const cdouble &value) {
    return std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
}

}  // namespace

QuadratureResult gauss_kronrod_panel(const RealIntegrand &f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<cdouble, 21> fv;
    fv[0] = f(center);
    for (int j = 0; j < 10; ++j) {
        double dx = half * kKronrodNodes[j];
        fv[1 + 2 * j] = f(center - dx);
        fv[2 + 2 * j] = f(center + dx);
    }
    cdouble kron = kKronrodWeights[10] * fv[0];
    cdouble gauss = 0.0;
    double abs_sum = kKronrodWeights[10] * std::abs(fv[0]);
    for (int j = 0; j < 10; ++j) {
        cdouble pair = fv[1 + 2 * j] + fv[2 + 2 * j];
        kron += kKronrodWeights[j] * pair;
        abs_sum += kKronrodWeights[j] * (std::abs(fv[1 + 2 * j]) + std::abs(fv[2 + 2 * j]));
        if (j % 2 == 1) {
            gauss += kGaussWeights[j / 2] * pair;
        }
    }
    cdouble mean = 0.5 * kron;
    double asc = kKronrodWeights[10] * std::abs(fv[0] - mean);
    for (int j = 0; j < 10; ++j) {
        asc += kKronrodWeights[j] * (std::abs(fv[1 + 2 * j] - mean) + std::abs(fv[2 + 2 * j] - mean));
    }
    const double ah = std::abs(half);
    double err = std::abs((kron - gauss) * half);
    asc *= ah;
    abs_sum *= ah;
    if (asc != 0.0 && err != 0.0) {
        err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps)) {
        err = std::max(50.0 * eps * abs_sum, err);
    }
    for (const auto &v : fv) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            return {kron * half, std::numeric_limits<double>::infinity(), 1};
        }
    }
    return {kron * half, err, 1};
}

QuadratureResult integrate_adaptive(const RealIntegrand &f, double a, double b, const QuadratureOptions &opts,
                                    std::span<const double> breakpoints) {
    if (a == b) {
        return {};
    }
    if (a > b) {
        auto r = integrate_adaptive(f, b, a, opts, breakpoints);
        r.value = -r.value;
        return r;
    }
    std::vector<double> cuts{a};
    for (double p : breakpoints) {
        if (p > a && p < b) {
            cuts.push_back(p);
        }
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<Panel, std::vector<Panel>, ByError> queue;
    cdouble total = 0.0;
    double total_err = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        Panel p{cuts[i], cuts[i + 1], gauss_kronrod_panel(f, cuts[i], cuts[i + 1])};
        total += p.r.value;
        total_err += p.r.est_error;
        queue.push(p);
    }
    int panels = static_cast<int>(queue.size());
    while (total_err > tolerance(opts, total)) {
        if (panels >= opts.max_panels) {
            throw ConvergenceFailure("adaptive quadrature: panel budget exhausted on [" + std::to_string(a) + ", " +
                                         std::to_string(b) + "]",
                                     std::abs(total), total_err);
        }
        Panel worst = queue.top();
        double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Panel cannot be split further; accept what we have.
            break;
        }
        queue.pop();
        Panel left{worst.a, mid, gauss_kronrod_panel(f, worst.a, mid)};
        Panel right{mid, worst.b, gauss_kronrod_panel(f, mid, worst.b)};
        total += left.r.value + right.r.value - worst.r.value;
        total_err += left.r.est_error + right.r.est_error - worst.r.est_error;
        queue.push(left);
        queue.push(right);
        ++panels;
        if (panels % 64 == 0) {
            // Re-sum to stop drift in the running totals.
            auto copy = queue;
            total = 0.0;
            total_err = 0.0;
            while (!copy.empty()) {
                total += copy.top().r.value;
                total_err += copy.top().r.est_error;
                copy.pop();
            }
        }
    }
    std::vector<Panel> all;
    all.reserve(queue.size());
    while (!queue.empty()) {
        all.push_back(queue.top());
        queue.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel &x, const Panel &y) { return x.a < y.a; });
    CompensatedSum<cdouble> sum;
    double err = 0.0;
    for (const auto &p : all) {
        sum.add(p.r.value);
        err += p.r.est_error;
    }
    if (!std::isfinite(err)) {
        throw ConvergenceFailure("adaptive quadrature: non-finite integrand", std::abs(sum.value()), err);
    }
    return {sum.value(), err, panels};
}

cdouble wynn_epsilon(std::span<const cdouble> s, double *error) {
    const size_t n = s.size();
    if (n == 0) {
        if (error) {
            *error = std::numeric_limits<double>::infinity();
        }
        return 0.0;
    }
    // prev = column k-1, cur = column k; entries indexed by n.
    std::vector<cdouble> prev(n + 1, 0.0);
    std::vector<cdouble> cur(s.begin(), s.end());
    cdouble best = s[n - 1];
    cdouble before = n > 1 ? s[n - 2] : s[n - 1];
    bool ok = true;
    for (size_t k = 1; k < n && ok; ++k) {
        std::vector<cdouble> next(n - k);
        for (size_t i = 0; i + k < n; ++i) {
            cdouble diff = cur[i + 1] - cur[i];
            double scale = std::max(std::abs(cur[i + 1]), std::abs(cur[i]));
            if (std::abs(diff) <= 1e-15 * scale || std::abs(diff) == 0.0) {
                ok = false;
                break;
            }
            next[i] = prev[i + 1] + 1.0 / diff;
            if (!std::isfinite(next[i].real()) || !std::isfinite(next[i].imag())) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            break;
        }
        prev = std::move(cur);
        cur = std::move(next);
        if (k % 2 == 0) {
            if (cur.size() >= 2) {
                before = cur[cur.size() - 2];
            } else {
                before = best;
            }
            best = cur.back();
        }
    }
    if (error) {
        *error = std::abs(best - before);
    }
    return best;
}

QuadratureResult integrate_oscillatory(const RealIntegrand &f, double a, double phase_rate,
                                       const QuadratureOptions &opts) {
    constexpr int kMaxHalfPeriods = 4000;
    QuadratureOptions panel_opts = opts;
    panel_opts.abs_tol = opts.abs_tol * 0.05;
    panel_opts.rel_tol = opts.rel_tol * 0.05;
    panel_opts.max_panels = 2000;
    int panels = 0;
    CompensatedSum<cdouble> sum;
    double panel_err = 0.0;

    if (!(phase_rate > 0.0)) {
        double left = a;
        double width = 1.0;
        int quiet = 0;
        for (int i = 0; i < kMaxHalfPeriods; ++i) {
            auto r = integrate_adaptive(f, left, left + width, panel_opts);
            panels += r.panels_used;
            sum.add(r.value);
            panel_err += r.est_error;
            left += width;
            width *= 1.25;
            if (std::abs(r.value) < 0.1 * tolerance(opts, sum.value())) {
                if (++quiet >= 4) {
                    return {sum.value(), panel_err + std::abs(r.value), panels};
                }
            } else {
                quiet = 0;
            }
        }
        throw ConvergenceFailure("oscillatory quadrature: tail did not decay", std::abs(sum.value()), panel_err);
    }

    const double h = 0.25 * std::numbers::pi / phase_rate;
    std::vector<cdouble> partial;
    double left = a;
    cdouble last_estimate = 0.0;
    double last_diff = std::numeric_limits<double>::infinity();
    constexpr size_t kWindow = 24;
    for (int hp = 0; hp < kMaxHalfPeriods; ++hp) {
        for (int q = 0; q < 4; ++q) {
            auto r = integrate_adaptive(f, left, left + h, panel_opts);
            panels += r.panels_used;
            sum.add(r.value);
            panel_err += r.est_error;
            left += h;
        }
        partial.push_back(sum.value());
        if (partial.size() < 8) {
            continue;
        }
        size_t start = partial.size() > kWindow ? partial.size() - kWindow : 0;
        double wynn_err = 0.0;
        cdouble estimate = wynn_epsilon(std::span<const cdouble>(partial).subspan(start), &wynn_err);
        double diff = std::abs(estimate - last_estimate);
        double tol = tolerance(opts, estimate);
        if (diff < tol && last_diff < tol && std::isfinite(std::abs(estimate))) {
            return {estimate, panel_err + std::max({diff, last_diff, wynn_err}), panels};
        }
        last_diff = diff;
        last_estimate = estimate;
    }
    throw ConvergenceFailure("oscillatory quadrature: extrapolation did not converge (divergent integrand?)",
                             std::abs(last_estimate), last_diff);
}

QuadratureResult integrate_ray(const ComplexIntegrand &f, cdouble z0, double angle, double decay_rate,
                               double phase_rate, const QuadratureOptions &opts) {
    if (!(decay_rate > 0.0)) {
        throw ConvergenceFailure("ray quadrature: integrand does not decay along the ray", 0.0,
                                 std::numeric_limits<double>::infinity());
    }
    const cdouble dir = std::polar(1.0, angle);
    RealIntegrand g = [&](double s) { return f(z0 + s * dir) * dir; };
    double h = 1.0 / decay_rate;
    if (phase_rate > 0.0) {
        h = std::min(h, 0.25 * std::numbers::pi / phase_rate);
    }
    QuadratureOptions panel_opts = opts;
    panel_opts.abs_tol = opts.abs_tol * 0.05;
    panel_opts.rel_tol = opts.rel_tol * 0.05;
    panel_opts.max_panels = 2000;
    CompensatedSum<cdouble> sum;
    double err = 0.0;
    int panels = 0;
    int quiet = 0;
    const int max_panels = 20000;
    double left = 0.0;
    for (int i = 0; i < max_panels; ++i) {
        auto r = integrate_adaptive(g, left, left + h, panel_opts);
        panels += r.panels_used;
        sum.add(r.value);
        err += r.est_error;
        left += h;
        if (left * decay_rate > 40.0 && std::abs(r.value) < 1e-3 * tolerance(opts, sum.value())) {
            if (++quiet >= 3) {
                return {sum.value(), err + std::abs(r.value), panels};
            }
        } else {
            quiet = 0;
        }
    }
    throw ConvergenceFailure("ray quadrature: panel budget exhausted", std::abs(sum.value()), err);
}

GaussRule gauss_legendre(int n) {
    if (n < 1) {
        throw InvalidArgument("gauss_legendre: n must be positive");
    }
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p0 = 1.0;
                p1 = x;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw InvalidArgument("fit_line: xs and ys differ in length");
    }
    const size_t n = xs.size();
    if (n < 3) {
        throw InvalidArgument("fit_line: need at least 3 points, got " + std::to_string(n));
    }
    CompensatedSum<double> sx, sy;
    for (size_t i = 0; i < n; ++i) {
        sx.add(xs[i]);
        sy.add(ys[i]);
    }
    const double mx = sx.value() / static_cast<double>(n);
    const double my = sy.value() / static_cast<double>(n);
    CompensatedSum<double> sxx, sxy;
    for (size_t i = 0; i < n; ++i) {
        sxx.add((xs[i] - mx) * (xs[i] - mx));
        sxy.add((xs[i] - mx) * (ys[i] - my));
    }
    if (!(sxx.value() > 0.0)) {
        throw InvalidArgument("fit_line: xs are all equal");
    }
    LineFit fit;
    fit.slope = sxy.value() / sxx.value();
    fit.intercept = my - fit.slope * mx;
    CompensatedSum<double> rss;
    for (size_t i = 0; i < n; ++i) {
        double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
        rss.add(r * r);
    }
    fit.rms_residual = std::sqrt(rss.value() / static_cast<double>(n));
    return fit;
}

}  // namespace fieldport::numerics
