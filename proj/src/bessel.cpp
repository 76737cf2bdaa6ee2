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

#include "fieldport/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fieldport/error.hpp"

namespace fieldport::numerics {

namespace {

constexpr long double kEulerGamma = 0.577215664901532860606512090082402431L;
constexpr long double kPiL = 3.141592653589793238462643383279502884L;

// Crossover between series and asymptotic expansion for J and Y.
constexpr double kHankelThreshold = 17.0;
// Crossover between series and trapezoidal integral for K.
constexpr double kSeriesThresholdK = 2.0;

// Sum_{k>=0} (-sign)^k (x/2)^(2k+n) / (k! (k+n)!) and the matching
// digamma-weighted sum used by Y_n and K_n. sign = +1 gives J, -1 gives I.
struct SeriesPair {
    long double plain;
    long double digamma;  // sum of c_k * (psi(k+1) + psi(k+1+n))
};

SeriesPair power_series(int order, long double x, int sign) {
    const long double q = x * x / 4.0L;
    long double term = order == 0 ? 1.0L : x / 2.0L;
    long double psi_a = -kEulerGamma;                             // psi(k+1)
    long double psi_b = -kEulerGamma + (order == 1 ? 1.0L : 0.0L);  // psi(k+1+n)
    SeriesPair out{0.0L, 0.0L};
    for (int k = 0; k < 400; ++k) {
        out.plain += term;
        out.digamma += term * (psi_a + psi_b);
        psi_a += 1.0L / (k + 1);
        psi_b += 1.0L / (k + 1 + order);
        term *= (sign > 0 ? -q : q) / (static_cast<long double>(k + 1) * (k + 1 + order));
        if (std::abs(term) < 1e-22L * std::abs(out.plain) && k > 2) {
            break;
        }
    }
    return out;
}

double j_series(int order, double x) {
    return static_cast<double>(power_series(order, x, +1).plain);
}

double y_series(int order, double x) {
    const long double xl = x;
    SeriesPair s = power_series(order, xl, +1);
    const long double log_term = (2.0L / kPiL) * std::log(xl / 2.0L) * s.plain;
    if (order == 0) {
        // Y0 = (2/pi)(ln(x/2) + gamma) J0 - (2/pi) sum (-1)^k (q^k/k!^2) psi(k+1) ... rewritten
        // through the digamma sum: psi(k+1) + psi(k+1) = 2 psi(k+1).
        return static_cast<double>(log_term - (1.0L / kPiL) * s.digamma);
    }
    return static_cast<double>(-2.0L / (kPiL * xl) + log_term - (1.0L / kPiL) * s.digamma);
}

double k_series(int order, double x) {
    const long double xl = x;
    SeriesPair s = power_series(order, xl, -1);
    const long double log_term = std::log(xl / 2.0L) * s.plain;
    if (order == 0) {
        return static_cast<double>(-log_term + 0.5L * s.digamma);
    }
    return static_cast<double>(1.0L / xl + log_term - 0.5L * s.digamma);
}

// Hankel expansion: returns {P, Q}.
std::pair<double, double> hankel_pq(int order, double x) {
    const double mu = 4.0 * order * order;
    double p = 0.0, q = 0.0;
    double term = 1.0;  // a_k / x^k with sign folded in below
    double last = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 200; ++k) {
        double mag = std::abs(term);
        if (mag > last || mag < 1e-18) {
            break;
        }
        last = mag;
        // k even -> P gets (-1)^(k/2) term, k odd -> Q gets (-1)^((k-1)/2) term.
        switch (k % 4) {
            case 0: p += term; break;
            case 1: q += term; break;
            case 2: p -= term; break;
            case 3: q -= term; break;
        }
        const double odd = 2.0 * k + 1.0;
        term *= (mu - odd * odd) / (8.0 * (k + 1) * x);
    }
    return {p, q};
}

double hankel_j_or_y(int order, double x, bool want_y) {
    auto [p, q] = hankel_pq(order, x);
    const double phase = (0.5 * order + 0.25) * std::numbers::pi;
    const double c = std::cos(x) * std::cos(phase) + std::sin(x) * std::sin(phase);
    const double s = std::sin(x) * std::cos(phase) - std::cos(x) * std::sin(phase);
    const double amp = std::sqrt(2.0 / (std::numbers::pi * x));
    return want_y ? amp * (p * s + q * c) : amp * (p * c - q * s);
}

double k_trapezoid(int order, double x) {
    // exp(x) K_n(x) = int_0^inf exp(-2 x sinh^2(t/2)) cosh(n t) dt
    const double h = std::min(0.125, 0.35 / std::sqrt(x));
    double sum = 0.5 * 1.0;
    for (int i = 1; i < 4000; ++i) {
        const double t = i * h;
        const double sh = std::sinh(0.5 * t);
        const double e = -2.0 * x * sh * sh;
        const double term = std::exp(e) * (order == 0 ? 1.0 : std::cosh(t));
        sum += term;
        if (e < -45.0) {
            break;
        }
    }
    return h * sum * std::exp(-x);
}

}  // namespace

BesselKind parse_bessel_kind(std::string_view name) {
    if (name == "J0") return BesselKind::J0;
    if (name == "J1") return BesselKind::J1;
    if (name == "Y0" || name == "N0") return BesselKind::Y0;
    if (name == "Y1" || name == "N1") return BesselKind::Y1;
    if (name == "K0") return BesselKind::K0;
    if (name == "K1") return BesselKind::K1;
    throw InvalidArgument("unknown Bessel kind '" + std::string(name) + "'");
}

std::string_view to_string(BesselKind kind) {
    switch (kind) {
        case BesselKind::J0: return "J0";
        case BesselKind::J1: return "J1";
        case BesselKind::Y0: return "Y0";
        case BesselKind::Y1: return "Y1";
        case BesselKind::K0: return "K0";
        case BesselKind::K1: return "K1";
    }
    return "?";
}

double bessel(BesselKind kind, double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw InvalidArgument("bessel: argument must be positive and finite, got " + std::to_string(x));
    }
    switch (kind) {
        case BesselKind::J0:
        case BesselKind::J1: {
            int n = kind == BesselKind::J0 ? 0 : 1;
            return x < kHankelThreshold ? j_series(n, x) : hankel_j_or_y(n, x, false);
        }
        case BesselKind::Y0:
        case BesselKind::Y1: {
            int n = kind == BesselKind::Y0 ? 0 : 1;
            return x < kHankelThreshold ? y_series(n, x) : hankel_j_or_y(n, x, true);
        }
        case BesselKind::K0:
        case BesselKind::K1: {
            int n = kind == BesselKind::K0 ? 0 : 1;
            return x <= kSeriesThresholdK ? k_series(n, x) : k_trapezoid(n, x);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace fieldport::numerics
