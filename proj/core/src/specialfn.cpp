/*
 * Copyright 2026 fbschur developers
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fbschur/specialfn.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace fbschur {

namespace {

constexpr double kTinyFactor = 1e-300;

// 16-point Gauss-Legendre nodes/weights on [-1,1] (positive half; symmetric).
constexpr double kGlNodes16[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
constexpr double kGlWeights16[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};

cplx integrate_gl16(const std::function<cplx(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    cplx acc = 0.0;
    for (int i = 0; i < 8; ++i) {
        acc += kGlWeights16[i] *
               (f(mid + half * kGlNodes16[i]) + f(mid - half * kGlNodes16[i]));
    }
    return half * acc;
}

// -log(1-u)/u with the removable singularity at 0 filled by series.
cplx dilog_integrand(cplx u) {
    if (std::abs(u) < 1e-4) {
        // 1 + u/2 + u^2/3 + u^3/4 + ...
        return 1.0 + u * (0.5 + u * (1.0 / 3.0 + u * 0.25));
    }
    return -std::log(1.0 - u) / u;
}

cplx dilog_path_integral(cplx z, int panels) {
    // straight path 0 -> z, composite 16-point Gauss per panel
    cplx acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        double a = double(p) / panels, b = double(p + 1) / panels;
        acc += integrate_gl16([&](double t) { return dilog_integrand(t * z) * z; },
                              a, b);
    }
    return acc;
}

} // namespace

cplx qpoch(cplx x, const QParams& qp, std::optional<long> n) {
    const double q = qp.q;
    if (n.has_value() && *n == 0) return 1.0;
    if (n.has_value() && *n < 0) {
        // (x;q)_{-m} = 1 / prod_{j=1..m} (1 - x q^{-j})
        if (q == 0.0) throw domain_error("qpoch: negative length needs q > 0");
        cplx denom = 1.0;
        double qj = 1.0;
        for (long j = 1; j <= -*n; ++j) {
            qj /= q;
            cplx f = 1.0 - x * qj;
            if (std::abs(f) < kTinyFactor)
                throw domain_error("qpoch: vanishing factor at negative length");
            denom *= f;
        }
        return 1.0 / denom;
    }
    cplx prod = 1.0;
    double qk = 1.0;
    long kmax = n.has_value() ? *n : std::numeric_limits<long>::max();
    for (long k = 0; k < kmax; ++k) {
        cplx f = 1.0 - x * qk;
        prod *= f;
        if (!n.has_value()) {
            // |log(1 - x q^{k+1})| <= tail of a geometric series; stop once small
            if (std::abs(x) * qk * q < qp.tol * (1.0 - q)) break;
            if (k > 100000)
                throw numeric_error("qpoch: infinite product did not truncate");
        }
        qk *= q;
    }
    return prod;
}

cplx theta_q(cplx x, const QParams& qp) {
    if (x == cplx(0.0)) throw domain_error("theta_q: x = 0");
    return qpoch(x, qp) * qpoch(qp.q / x, qp);
}

cplx theta3(cplx z, const QParams& qp) {
    if (z == cplx(0.0)) throw domain_error("theta3: z = 0");
    const double q = qp.q;
    cplx acc = 1.0;  // n = 0
    if (q == 0.0) return acc;
    const double sq = std::sqrt(q);
    cplx zp = 1.0, zm = 1.0;
    double qn = 1.0;  // q^{n^2/2} built from odd increments: q^{(n^2)/2}
    for (long n = 1; n < 100000; ++n) {
        // q^{n^2/2} = q^{(n-1)^2/2} * q^{(2n-1)/2}
        qn *= std::pow(sq, 2 * n - 1);
        zp *= z;
        zm /= z;
        cplx term = qn * (zp + zm);
        acc += term;
        if (qn * (std::abs(zp) + std::abs(zm)) < qp.tol) return acc;
    }
    throw numeric_error("theta3: series did not converge");
}

cplx dilog(cplx z) {
    if (z.imag() == 0.0 && z.real() >= 1.0)
        throw domain_error("dilog: z on the cut [1,inf)");
    if (std::abs(z) <= 0.5) {
        cplx acc = 0.0, zn = 1.0;
        for (int n = 1; n <= 60; ++n) {
            zn *= z;
            acc += zn / double(n * n);
        }
        return acc;
    }
    // adaptive straight-path quadrature (doubling panels)
    cplx prev = dilog_path_integral(z, 8);
    for (int panels = 16; panels <= 512; panels *= 2) {
        cplx cur = dilog_path_integral(z, panels);
        if (std::abs(cur - prev) < 1e-13 * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

cplx dilog_quadrature(cplx z, int panels) {
    if (z.imag() == 0.0 && z.real() >= 1.0)
        throw domain_error("dilog_quadrature: z on the cut [1,inf)");
    // two-segment path 0 -> z/2 -> z; a different composite rule than the
    // primary path so the two routes share no panel layout
    cplx mid = 0.5 * z, acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        double a = double(p) / panels, b = double(p + 1) / panels;
        acc += integrate_gl16(
            [&](double t) { return dilog_integrand(t * mid) * mid; }, a, b);
        acc += integrate_gl16(
            [&](double t) { return dilog_integrand(mid + t * (z - mid)) * (z - mid); },
            a, b);
    }
    return acc;
}

Specialization Specialization::single(double x) {
    Specialization s;
    s.leaves_.push_back({x, false});
    return s;
}

Specialization Specialization::dual(double x) {
    Specialization s;
    s.leaves_.push_back({x, true});
    return s;
}

Specialization Specialization::unite(const std::vector<Specialization>& parts) {
    Specialization s;
    for (const auto& p : parts)
        s.leaves_.insert(s.leaves_.end(), p.leaves_.begin(), p.leaves_.end());
    return s;
}

Specialization Specialization::scaled(double sc, const Specialization& inner) {
    // p_n(s rho) = s^n p_n(rho): a single variable x becomes s*x, dual likewise
    Specialization s;
    for (const auto& l : inner.leaves_) s.leaves_.push_back({sc * l.x, l.dual});
    return s;
}

bool Specialization::nonnegative() const {
    return std::all_of(leaves_.begin(), leaves_.end(),
                       [](const Leaf& l) { return l.x >= 0.0; });
}

double Specialization::max_leaf() const {
    double m = 0.0;
    for (const auto& l : leaves_) m = std::max(m, std::abs(l.x));
    return m;
}

double Specialization::radius() const {
    double m = max_leaf();
    return m == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / m;
}

double Specialization::power_sum(long n) const {
    double acc = 0.0;
    for (const auto& l : leaves_) {
        double xn = std::pow(l.x, double(n));
        acc += l.dual ? ((n % 2 == 1) ? xn : -xn) : xn;
    }
    return acc;
}

cplx Specialization::H(cplx t) const {
    cplx prod = 1.0;
    for (const auto& l : leaves_) {
        if (l.dual) {
            prod *= 1.0 + l.x * t;
        } else {
            cplx denom = 1.0 - l.x * t;
            if (std::abs(denom) < kTinyFactor)
                throw domain_error("Specialization::H: t at a pole");
            prod /= denom;
        }
    }
    return prod;
}

std::vector<double> Specialization::h_coeffs(int deg) const {
    std::vector<double> h(deg + 1, 0.0);
    h[0] = 1.0;
    for (const auto& l : leaves_) {
        if (l.dual) {
            for (int n = deg; n >= 1; --n) h[n] += l.x * h[n - 1];
        } else {
            // multiply by 1/(1-xt): h[n] += x*h[n-1] cumulatively
            for (int n = 1; n <= deg; ++n) h[n] += l.x * h[n - 1];
        }
    }
    return h;
}

double Hpair(const Specialization& rho, const Specialization& rhop, double tol) {
    if (rho.is_zero() || rhop.is_zero()) return 1.0;
    if (rho.max_leaf() * rhop.max_leaf() >= 1.0)
        throw domain_error("Hpair: power-sum series diverges");
    double acc = 0.0;
    for (long n = 1; n < 100000; ++n) {
        double term = rho.power_sum(n) * rhop.power_sum(n) / double(n);
        acc += term;
        double bound = std::pow(rho.max_leaf() * rhop.max_leaf(), double(n)) *
                       double(rho.leaves().size() * rhop.leaves().size());
        if (bound < tol && n > 2) break;
    }
    return std::exp(acc);
}

double Htilde(const Specialization& rho, double tol) {
    if (rho.is_zero()) return 1.0;
    if (rho.max_leaf() >= 1.0)
        throw domain_error("Htilde: power-sum series diverges");
    double acc = 0.0;
    const double m = rho.max_leaf();
    const double cnt = double(rho.leaves().size());
    for (long n = 1; n < 200000; ++n) {
        double pn = rho.power_sum(n);
        if (n % 2 == 1) acc += pn / double(n);
        acc += pn * pn / double(2 * n);
        double bound = std::pow(m, double(n)) * cnt;
        if (bound + bound * bound < tol && n > 2) break;
    }
    return std::exp(acc);
}

} // namespace fbschur
