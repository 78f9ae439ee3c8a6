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

#include "fbschur/pfaffian.hpp"

#include <algorithm>
#include <cmath>

namespace fbschur {

SkewMatrix::SkewMatrix(int n, std::vector<cplx> entries) : n_(n), a_(std::move(entries)) {
    if (n < 0 || a_.size() != size_t(n) * size_t(n))
        throw config_error("SkewMatrix: entry count does not match dimension");
    double scale = 0.0, dev = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            scale = std::max(scale, std::abs(at(i, j)));
            dev = std::max(dev, std::abs(at(i, j) + at(j, i)));
        }
    if (dev > 1e-12 * std::max(scale, 1.0))
        throw domain_error("SkewMatrix: input is not skew-symmetric");
    for (int i = 0; i < n_; ++i) {
        at(i, i) = 0.0;
        for (int j = i + 1; j < n_; ++j) {
            cplx v = 0.5 * (at(i, j) - at(j, i));
            at(i, j) = v;
            at(j, i) = -v;
        }
    }
}

cplx pfaffian(SkewMatrix a) {
    const int n = a.dim();
    if (n % 2 != 0) throw domain_error("pfaffian: odd dimension");
    if (n == 0) return 1.0;

    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(a.at(i, j)));
    if (scale == 0.0) return 0.0;
    const double zero_thresh = 1e-13 * scale;

    cplx result = 1.0;
    for (int k = 0; k + 1 < n; k += 2) {
        // pivot: largest |a(k, i)| among i >= k+1
        int kp = k + 1;
        for (int i = k + 2; i < n; ++i)
            if (std::abs(a.at(k, i)) > std::abs(a.at(k, kp))) kp = i;
        if (kp != k + 1) {
            for (int j = 0; j < n; ++j) std::swap(a.at(k + 1, j), a.at(kp, j));
            for (int i = 0; i < n; ++i) std::swap(a.at(i, k + 1), a.at(i, kp));
            result = -result;
        }
        cplx pivot = a.at(k, k + 1);
        if (std::abs(pivot) < zero_thresh) return 0.0;  // structurally singular
        result *= pivot;
        if (k + 2 >= n) break;
        std::vector<cplx> tau(size_t(n - k - 2));
        for (int i = k + 2; i < n; ++i) tau[size_t(i - k - 2)] = a.at(k, i) / pivot;
        for (int i = k + 2; i < n; ++i)
            for (int j = k + 2; j < n; ++j)
                a.at(i, j) += tau[size_t(i - k - 2)] * a.at(j, k + 1) -
                              tau[size_t(j - k - 2)] * a.at(i, k + 1);
    }
    return result;
}

cplx pfaffian(int n, std::vector<cplx> entries) {
    return pfaffian(SkewMatrix(n, std::move(entries)));
}

namespace {

// Hadamard tail sum_{m > n0} m^{m/2} (D M)^m / m!
double hadamard_tail(double dm, int n0) {
    double tail = 0.0;
    double logdm = std::log(std::max(dm, 1e-300));
    for (int m = n0 + 1; m < n0 + 400; ++m) {
        double lt = 0.5 * m * std::log(double(m)) + m * logdm - std::lgamma(double(m) + 1.0);
        double t = std::exp(lt);
        tail += t;
        if (t < 1e-18 * std::max(tail, 1.0)) break;
    }
    return tail;
}

std::vector<cplx> assemble(const FredholmSpec& fs, double sign) {
    const int m = int(fs.points.size());
    const int n = 2 * m;
    std::vector<cplx> a(size_t(n) * n, 0.0);
    for (int p = 0; p < m; ++p) {
        a[size_t(2 * p) * n + (2 * p + 1)] += 1.0;
        a[size_t(2 * p + 1) * n + (2 * p)] -= 1.0;
    }
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) {
            Mat2 k = fs.kernel(fs.points[p], fs.points[q]);
            double w = std::sqrt(fs.points[p].weight * fs.points[q].weight);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    a[size_t(2 * p + i) * n + (2 * q + j)] += sign * w * k[size_t(i)][size_t(j)];
        }
    return a;
}

} // namespace

FredholmResult fredholm_pfaffian(const FredholmSpec& fs, double tol) {
    const int m = int(fs.points.size());
    // Hadamard certificate on the orders dropped by the series cap.  Orders
    // beyond the point count vanish structurally (repeated rows), so the cap
    // only matters when it is smaller than the discretization.
    double tail = 0.0;
    if (fs.series_cap < m) {
        double dmax = 0.0, mtot = 0.0;
        for (const auto& p : fs.points) mtot += p.weight;
        const int probe = std::min(m, 24);
        for (int p = 0; p < probe; ++p)
            for (int q = 0; q < probe; ++q) {
                Mat2 k = fs.kernel(fs.points[size_t(p)], fs.points[size_t(q)]);
                for (auto& row : k)
                    for (auto& e : row) dmax = std::max(dmax, std::abs(e));
            }
        tail = hadamard_tail(dmax * mtot, fs.series_cap);
        if (!(tail < tol))
            throw numeric_error(
                "fredholm_pfaffian: Hadamard tail above tolerance; raise series_cap");
    }

    std::vector<cplx> a = assemble(fs, -1.0);
    cplx v = pfaffian(2 * m, std::move(a));
    if (std::abs(v.imag()) > 1e-8 * std::max(1.0, std::abs(v)))
        throw numeric_error("fredholm_pfaffian: value has a large imaginary part");
    return {v.real(), tail};
}

double fredholm_pfaffian_inclusion_exclusion(const FredholmSpec& fs) {
    const int m = int(fs.points.size());
    if (m > 16) throw config_error("inclusion-exclusion oracle: too many points");
    double acc = 0.0;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        std::vector<int> idx;
        for (int p = 0; p < m; ++p)
            if (mask & (1u << p)) idx.push_back(p);
        const int k = int(idx.size());
        std::vector<cplx> a(size_t(2 * k) * size_t(2 * k), 0.0);
        double wprod = 1.0;
        for (int p = 0; p < k; ++p) wprod *= fs.points[size_t(idx[size_t(p)])].weight;
        for (int p = 0; p < k; ++p)
            for (int q = 0; q < k; ++q) {
                Mat2 blk = fs.kernel(fs.points[size_t(idx[size_t(p)])],
                                     fs.points[size_t(idx[size_t(q)])]);
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j)
                        a[size_t(2 * p + i) * size_t(2 * k) + size_t(2 * q + j)] =
                            blk[size_t(i)][size_t(j)];
            }
        cplx pf = pfaffian(2 * k, std::move(a));
        acc += ((k % 2 == 0) ? 1.0 : -1.0) * wprod * pf.real();
    }
    return acc;
}

std::vector<FredholmPoint> halfline_points(const BlockKernel& kernel, int comp,
                                           double s, double tol, int max_len) {
    auto probe = [&](double x) {
        FredholmPoint p{comp, x, 1.0};
        return kernel(p, p);
    };
    // fit decay of the 1,2 block (n=1 series term) and the envelopes of the
    // 1,1 / 2,2 blocks along the diagonal
    const double x1 = s + 4.5, x2 = s + 12.5;
    Mat2 k1 = probe(x1), k2 = probe(x2);
    auto mag = [](const Mat2& k, int i, int j) {
        return std::max(std::abs(k[size_t(i)][size_t(j)]), 1e-300);
    };
    double c_fit = -std::log(mag(k2, 0, 0) / mag(k1, 0, 0)) / (2.0 * (x2 - x1));
    double d_fit = std::log(mag(k2, 1, 1) / mag(k1, 1, 1)) / (2.0 * (x2 - x1));
    d_fit = std::max(d_fit, 0.0);
    // decay rate of the 1,2 diagonal drives the dropped n=1 term
    double b12 = -std::log(mag(k2, 0, 1) / mag(k1, 0, 1)) / (x2 - x1);
    double b = std::min(b12, c_fit - d_fit);
    if (!(b > 1e-9))
        throw numeric_error(
            "halfline_points: decay fit failed (2,2 growth not dominated); "
            "tail bound not certifiable");
    double c12 = mag(k1, 0, 1) * std::exp(b * (x1 - s));
    int len = 8;
    double bound = 0.0;
    for (; len <= max_len; ++len) {
        bound = 3.0 * c12 * std::exp(-b * len) / (1.0 - std::exp(-b));
        if (bound < tol) break;
    }
    if (len > max_len)
        throw numeric_error("halfline_points: truncation bound above tolerance");
    std::vector<FredholmPoint> pts;
    for (int j = 0; j < len; ++j) pts.push_back({comp, s + 0.5 + j, 1.0});
    return pts;
}

std::vector<FredholmPoint> continuum_points(int comp, double s, double len,
                                            int points_per_unit) {
    static const double nodes[8] = {
        0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
        0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
        0.9445750230732326, 0.9894009349916499};
    static const double weights[8] = {
        0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
        0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
        0.0622535239386479, 0.0271524594117541};
    const double panel_w = 16.0 / double(points_per_unit);
    const int npanels = std::max(1, int(std::ceil(len / panel_w)));
    std::vector<FredholmPoint> pts;
    for (int p = 0; p < npanels; ++p) {
        double a = s + len * double(p) / npanels;
        double bnd = s + len * double(p + 1) / npanels;
        double mid = 0.5 * (a + bnd), half = 0.5 * (bnd - a);
        for (int i = 0; i < 8; ++i) {
            pts.push_back({comp, mid - half * nodes[i], half * weights[i]});
            pts.push_back({comp, mid + half * nodes[i], half * weights[i]});
        }
    }
    std::sort(pts.begin(), pts.end(),
              [](const FredholmPoint& a, const FredholmPoint& b) { return a.x < b.x; });
    return pts;
}

BlockKernel conjugate_kernel(const BlockKernel& kernel,
                             const std::function<double(const FredholmPoint&)>& f) {
    return [kernel, f](const FredholmPoint& x, const FredholmPoint& y) {
        Mat2 k = kernel(x, y);
        const double fx = f(x), fy = f(y);
        Mat2 out;
        out[0][0] = std::exp(fx + fy) * k[0][0];
        out[0][1] = std::exp(fx - fy) * k[0][1];
        out[1][0] = std::exp(-fx + fy) * k[1][0];
        out[1][1] = std::exp(-fx - fy) * k[1][1];
        return out;
    };
}

} // namespace fbschur
