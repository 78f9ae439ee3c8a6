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

#include "fbschur/lpp.hpp"

#include <algorithm>
#include <cmath>

#include "fbschur/kernels.hpp"

namespace fbschur {

namespace {

constexpr double kPi = 3.14159265358979323846;

double gmid(double lo, double hi, double frac) {
    return std::exp((1.0 - frac) * std::log(lo) + frac * std::log(hi));
}

} // namespace

void LppRequest::validate() const {
    if (endpoints.empty() || endpoints.size() != thresholds.size())
        throw config_error("LppRequest: endpoints/thresholds mismatch");
    int t1 = endpoints.front().second;
    if (int(a.size()) < t1) throw config_error("LppRequest: need a_1..a_{t_1}");
    for (double ai : a)
        if (!(ai > 0.0 && ai < 1.0 && alpha * ai < 1.0))
            throw config_error("LppRequest: need a_i, alpha a_i in (0,1)");
    for (size_t l = 0; l < endpoints.size(); ++l) {
        auto [r, t] = endpoints[l];
        if (r < 1 || t < r) throw config_error("LppRequest: need 1 <= r_l <= t_l");
        if (l > 0) {
            if (endpoints[l - 1].first > r || endpoints[l - 1].second < t)
                throw config_error("LppRequest: endpoints must follow a down-right path");
        }
    }
}

namespace {

// per-node prefactors of the Thm-4.2 integrands
cplx lpp_plus_part(const LppRequest& req, int idx, cplx z) {
    // prod_{i<=r} (1 - a_i z)^{-1} prod_{i<=t} (1 - a_i/z)
    auto [r, t] = req.endpoints[size_t(idx)];
    cplx f = 1.0;
    for (int i = 1; i <= r; ++i) f /= 1.0 - req.a[size_t(i - 1)] * z;
    for (int i = 1; i <= t; ++i) f *= 1.0 - req.a[size_t(i - 1)] / z;
    return f;
}

struct LppRadii {
    double rz, rw;
};

LppRadii lpp_radii(const LppRequest& req, int block, bool a_le_b) {
    double amax = 0.0;
    int t1 = req.endpoints.front().second;
    for (int i = 1; i <= t1; ++i) amax = std::max(amax, req.a[size_t(i - 1)]);
    const double hi = 1.0 / amax;
    const double base = std::max(req.alpha, amax);
    if (!(std::max(base, 1.0) < hi))
        throw domain_error("lpp_radii: no admissible radius window");
    switch (block) {
        case 0: {  // K11: alpha,1 < |z|,|w| < 1/amax
            double lo = std::max(req.alpha, 1.0);
            return {gmid(lo, hi, 0.68), gmid(lo, hi, 0.62)};
        }
        case 1: {  // K12: base < |z|,|w| < 1/amax; z side also > 1, nested
            double lo1 = std::max(base, 1.0);
            if (a_le_b) {
                double rz = gmid(lo1, hi, 0.7);
                double rw = gmid(base, rz, 0.55);
                return {rz, rw};
            }
            double rw = gmid(lo1, hi, 0.7);
            double rz = gmid(std::max(base, 1.0), rw, 0.55);
            return {rz, rw};
        }
        case 2: {  // K22: base < |z|,|w| < 1/amax and |zw| > 1
            double r = gmid(base, hi, 0.35);
            double rz = r * 1.017, rw = r / 1.017;
            if (rz * rw <= 1.0) {
                double fix = std::sqrt(1.05 / (rz * rw));
                rz *= fix;
                rw *= fix;
            }
            if (!(rz < hi && rw < hi))
                throw domain_error("lpp_radii: K22 window empty");
            return {rz, rw};
        }
    }
    throw config_error("lpp_radii: bad block");
}

} // namespace

cplx lpp_kernel_block(const LppRequest& req, int a_idx, HalfInt x, int b_idx,
                      HalfInt y, int block, double tol) {
    const double alpha = req.alpha;
    const double xv = 0.5 * double(x.twice), yv = 0.5 * double(y.twice);
    LppRadii radii = lpp_radii(req, block, a_idx <= b_idx);
    std::function<cplx(const LogPoint&)> fz, fw;
    std::function<cplx(const LogPoint&, const LogPoint&)> coupled;
    switch (block) {
        case 0:
            fz = [&](const LogPoint& z) {
                return z.pow(-xv + 0.5) * (1.0 - alpha / z.value()) *
                       lpp_plus_part(req, a_idx, z.value());
            };
            fw = [&](const LogPoint& w) {
                return w.pow(-yv + 0.5) * (1.0 - alpha / w.value()) *
                       lpp_plus_part(req, b_idx, w.value());
            };
            coupled = [](const LogPoint& zp, const LogPoint& wp) {
                cplx z = zp.value(), w = wp.value();
                return (z - w) / ((z * z - 1.0) * (w * w - 1.0) * (z * w - 1.0));
            };
            break;
        case 1:
            fz = [&](const LogPoint& z) {
                return z.pow(-xv + 0.5) * (1.0 - alpha / z.value()) *
                       lpp_plus_part(req, a_idx, z.value());
            };
            fw = [&](const LogPoint& w) {
                return w.pow(yv - 1.5) / (1.0 - alpha / w.value()) /
                       lpp_plus_part(req, b_idx, w.value());
            };
            coupled = [](const LogPoint& zp, const LogPoint& wp) {
                cplx z = zp.value(), w = wp.value();
                return (z * w - 1.0) / ((z - w) * (z * z - 1.0));
            };
            break;
        case 2:
            fz = [&](const LogPoint& z) {
                return z.pow(xv - 1.5) / (1.0 - alpha / z.value()) /
                       lpp_plus_part(req, a_idx, z.value());
            };
            fw = [&](const LogPoint& w) {
                return w.pow(yv - 1.5) / (1.0 - alpha / w.value()) /
                       lpp_plus_part(req, b_idx, w.value());
            };
            coupled = [](const LogPoint& zp, const LogPoint& wp) {
                cplx z = zp.value(), w = wp.value();
                return (z - w) / (z * w - 1.0);
            };
            break;
        default:
            throw config_error("lpp_kernel_block: bad block");
    }
    return contour_double_integral(radii.rz, radii.rw, fz, fw, coupled, tol, 64,
                                   32768, nullptr);
}

namespace {

// batched tables over the discretized Fredholm points: per component pair,
// T[x_i][y_j] for all ordinates in one pass of the double node sum
struct LppTables {
    int npts = 0;
    // block index 0..2 maps (p, q) point indices to values; 3 holds K12(q,p)
    std::vector<std::vector<cplx>> t;
};

LppTables lpp_tables(const LppRequest& req, const std::vector<FredholmPoint>& pts,
                     int m_nodes) {
    const int n = int(pts.size());
    LppTables tabs;
    tabs.npts = n;
    tabs.t.assign(4, std::vector<cplx>(size_t(n) * size_t(n), 0.0));
    const int k = int(req.endpoints.size());
    for (int blk = 0; blk < 3; ++blk) {
        for (int ca = 0; ca < k; ++ca)
            for (int cb = 0; cb < k; ++cb) {
                LppRadii radii = lpp_radii(req, blk, ca <= cb);
                const int m = m_nodes;
                std::vector<LogPoint> zs, ws;
                for (int j = 0; j < m; ++j) {
                    zs.push_back({std::log(radii.rz), 2.0 * kPi * (j + 0.5) / m});
                    ws.push_back({std::log(radii.rw), 2.0 * kPi * (j + 0.5) / m});
                }
                // per-node constant factors
                std::vector<cplx> gz(static_cast<size_t>(m)), gw(static_cast<size_t>(m));
                for (int j = 0; j < m; ++j) {
                    cplx z = zs[size_t(j)].value(), w = ws[size_t(j)].value();
                    cplx az = (1.0 - req.alpha / z), aw = (1.0 - req.alpha / w);
                    cplx pz = lpp_plus_part(req, ca, z), pw = lpp_plus_part(req, cb, w);
                    switch (blk) {
                        case 0:
                            gz[size_t(j)] = az * pz * zs[size_t(j)].pow(0.5);
                            gw[size_t(j)] = aw * pw * ws[size_t(j)].pow(0.5);
                            break;
                        case 1:
                            gz[size_t(j)] = az * pz * zs[size_t(j)].pow(0.5);
                            gw[size_t(j)] = ws[size_t(j)].pow(-1.5) / (aw * pw);
                            break;
                        case 2:
                            gz[size_t(j)] = zs[size_t(j)].pow(-1.5) / (az * pz);
                            gw[size_t(j)] = ws[size_t(j)].pow(-1.5) / (aw * pw);
                            break;
                    }
                }
                // ordinate lists for these components
                std::vector<int> rows, cols;
                for (int p = 0; p < n; ++p) {
                    if (pts[size_t(p)].comp == ca) rows.push_back(p);
                    if (pts[size_t(p)].comp == cb) cols.push_back(p);
                }
                if (rows.empty() || cols.empty()) continue;
                // E matrices: z^{-x} resp. w^{+-y}
                std::vector<cplx> ez(size_t(m) * rows.size()), ew(size_t(m) * cols.size());
                for (int j = 0; j < m; ++j) {
                    for (size_t ri = 0; ri < rows.size(); ++ri) {
                        double xv = pts[size_t(rows[ri])].x;
                        double e = (blk == 2) ? xv : -xv;
                        ez[size_t(j) * rows.size() + ri] = zs[size_t(j)].pow(e);
                    }
                    for (size_t ci = 0; ci < cols.size(); ++ci) {
                        double yv = pts[size_t(cols[ci])].x;
                        double e = (blk == 0) ? -yv : yv;
                        ew[size_t(j) * cols.size() + ci] = ws[size_t(j)].pow(e);
                    }
                }
                // acc[j][c] = sum_k coupled(z_j, w_k) gw_k ew[k][c]
                std::vector<cplx> acc(size_t(m) * cols.size(), 0.0);
                for (int j = 0; j < m; ++j) {
                    for (int kk = 0; kk < m; ++kk) {
                        cplx z = zs[size_t(j)].value(), w = ws[size_t(kk)].value();
                        cplx cpl;
                        switch (blk) {
                            case 0:
                                cpl = (z - w) /
                                      ((z * z - 1.0) * (w * w - 1.0) * (z * w - 1.0));
                                break;
                            case 1:
                                cpl = (z * w - 1.0) / ((z - w) * (z * z - 1.0));
                                break;
                            default:
                                cpl = (z - w) / (z * w - 1.0);
                                break;
                        }
                        cplx f = cpl * gw[size_t(kk)];
                        for (size_t ci = 0; ci < cols.size(); ++ci)
                            acc[size_t(j) * cols.size() + ci] +=
                                f * ew[size_t(kk) * cols.size() + ci];
                    }
                }
                for (size_t ri = 0; ri < rows.size(); ++ri)
                    for (size_t ci = 0; ci < cols.size(); ++ci) {
                        cplx val = 0.0;
                        for (int j = 0; j < m; ++j)
                            val += gz[size_t(j)] * ez[size_t(j) * rows.size() + ri] *
                                   acc[size_t(j) * cols.size() + ci];
                        val /= double(m) * double(m);
                        tabs.t[size_t(blk)][size_t(rows[ri]) * size_t(n) +
                                            size_t(cols[ci])] = val;
                    }
            }
    }
    // K21 convenience: K12 with swapped arguments
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            tabs.t[3][size_t(p) * size_t(n) + size_t(q)] =
                tabs.t[1][size_t(q) * size_t(n) + size_t(p)];
    return tabs;
}

} // namespace

LppProb lpp_multipoint_prob(const LppRequest& req, double tol) {
    req.validate();
    const int k = int(req.endpoints.size());
    // entrywise evaluator for the envelope probes
    BlockKernel probe_kernel = [&](const FredholmPoint& xp, const FredholmPoint& yp) {
        Mat2 b;
        HalfInt x = HalfInt::from_double(xp.x), y = HalfInt::from_double(yp.x);
        b[0][0] = lpp_kernel_block(req, xp.comp, x, yp.comp, y, 0, 1e-8);
        b[0][1] = lpp_kernel_block(req, xp.comp, x, yp.comp, y, 1, 1e-8);
        b[1][0] = -lpp_kernel_block(req, yp.comp, y, xp.comp, x, 1, 1e-8);
        b[1][1] = lpp_kernel_block(req, xp.comp, x, yp.comp, y, 2, 1e-8);
        return b;
    };
    std::vector<FredholmPoint> pts;
    for (int l = 0; l < k; ++l) {
        auto comp_pts = halfline_points(probe_kernel, l, double(req.thresholds[size_t(l)]),
                                        tol * 0.2);
        pts.insert(pts.end(), comp_pts.begin(), comp_pts.end());
    }
    // batched tables, doubling the node count until the gap value stabilizes
    double prev = 0.0;
    bool have = false;
    double tail = 0.0;
    for (int m = 256; m <= 32768; m *= 2) {
        LppTables tabs = lpp_tables(req, pts, m);
        const int n = int(pts.size());
        BlockKernel lookup = [&tabs, n, &pts](const FredholmPoint& xp,
                                              const FredholmPoint& yp) {
            int p = -1, q = -1;
            for (int i = 0; i < n; ++i) {
                if (p < 0 && pts[size_t(i)].comp == xp.comp && pts[size_t(i)].x == xp.x) p = i;
                if (q < 0 && pts[size_t(i)].comp == yp.comp && pts[size_t(i)].x == yp.x) q = i;
            }
            Mat2 b;
            b[0][0] = tabs.t[0][size_t(p) * size_t(n) + size_t(q)];
            b[0][1] = tabs.t[1][size_t(p) * size_t(n) + size_t(q)];
            b[1][0] = -tabs.t[3][size_t(p) * size_t(n) + size_t(q)];
            b[1][1] = tabs.t[2][size_t(p) * size_t(n) + size_t(q)];
            return b;
        };
        FredholmSpec fs{lookup, pts, int(pts.size()) + 1};
        auto res = fredholm_pfaffian(fs, 1.0);
        tail = res.tail_bound;
        if (have && std::abs(res.value - prev) < tol * 0.5) {
            return {res.value, tail + std::abs(res.value - prev) + tol * 0.2};
        }
        prev = res.value;
        have = true;
    }
    throw numeric_error("lpp_multipoint_prob: no quadrature convergence");
}

double lpp_prob_by_enumeration(const LppRequest& req, double tail_eps) {
    req.validate();
    const int rmax = req.endpoints.back().first;
    const int tmax = req.endpoints.front().second;
    // independent entries (r, t) with r <= t <= tmax, r <= rmax region only
    // (entries outside every rectangle never matter)
    std::vector<std::tuple<int, int, double, int>> cells;  // r, t, q, cap
    long long states = 1;
    for (int r = 1; r <= rmax; ++r)
        for (int t = r; t <= tmax; ++t) {
            bool used = false;
            for (auto [rl, tl] : req.endpoints)
                if (r <= rl && t <= tl) used = true;
            if (!used) continue;
            double q = (r == t) ? req.alpha * req.a[size_t(r - 1)]
                                : req.a[size_t(r - 1)] * req.a[size_t(t - 1)];
            int cap = std::max(2, int(std::ceil(std::log(tail_eps * (1 - q)) / std::log(q))));
            cells.push_back({r, t, q, cap});
            states *= cap + 1;
            if (states > 200000000LL)
                throw config_error("lpp_prob_by_enumeration: state space too large");
        }
    // iterate over all weight matrices
    std::vector<int> vals(cells.size(), 0);
    double prob = 0.0;
    SymMatrix m;
    m.n = tmax;
    m.a.assign(size_t(tmax) * size_t(tmax), 0);
    std::function<void(size_t, double)> rec = [&](size_t idx, double weight) {
        if (idx == cells.size()) {
            // DP over the rectangle
            std::vector<long> row(size_t(tmax) + 1, 0);
            bool ok = true;
            for (int r = 1; r <= rmax && ok; ++r) {
                for (int t = 1; t <= tmax; ++t) {
                    long up = row[size_t(t)];
                    long left = (t == 1) ? 0 : row[size_t(t - 1)];
                    row[size_t(t)] = std::max(up, left) + m.at(std::min(r, t), std::max(r, t));
                }
                for (size_t l = 0; l < req.endpoints.size(); ++l)
                    if (req.endpoints[l].first == r &&
                        row[size_t(req.endpoints[l].second)] > req.thresholds[l])
                        ok = false;
            }
            if (ok) prob += weight;
            return;
        }
        auto [r, t, q, cap] = cells[idx];
        double pw = 1.0 - q;
        for (int vv = 0; vv <= cap; ++vv) {
            m.at(r, t) = vv;
            m.at(t, r) = vv;
            rec(idx + 1, weight * pw);
            pw *= q;
        }
        m.at(r, t) = 0;
        m.at(t, r) = 0;
    };
    rec(0, 1.0);
    return prob;
}

// ---------------------------------------------------------------------------
// crossover kernel
// ---------------------------------------------------------------------------

double CrossoverParams::c_q() const {
    return (1.0 - std::sqrt(q)) / (std::pow(q, 1.0 / 6.0) * std::cbrt(1.0 + std::sqrt(q)));
}

double CrossoverParams::d_q() const {
    return std::pow(q, 1.0 / 6.0) / (2.0 * std::pow(1.0 + std::sqrt(q), 2.0 / 3.0));
}

RayAnchors RayAnchors::defaults(double v) {
    RayAnchors a;
    a.a11 = 1.0;
    a.aw = -2.0 * v + 0.5;
    a.az = std::max(a.aw + 0.5, 0.35);
    a.b1 = 2.0 * std::abs(v) + 0.5;
    a.b2 = 2.0 * v + 0.5;
    a.b3 = -2.0 * v + 0.4;
    a.b4 = -2.0 * std::abs(v) - 0.8;
    a.c1 = 2.0 * v - 0.5;
    return a;
}

namespace {

struct RayQuad {
    std::vector<cplx> z, w;  // node and weight (includes direction, not 1/2pi i)
};

// G_anchor^phi truncated at |s| <= smax, composite 16-point Gauss per unit
RayQuad make_ray(double anchor, double phi, double smax, int per_unit) {
    static const double nodes[8] = {
        0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
        0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
        0.9445750230732326, 0.9894009349916499};
    static const double gw[8] = {
        0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
        0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
        0.0622535239386479, 0.0271524594117541};
    RayQuad rq;
    const int panels = std::max(1, int(std::ceil(smax * per_unit / 16.0)));
    const cplx dirp = std::exp(cplx(0.0, phi)), dirm = std::exp(cplx(0.0, -phi));
    for (int sgn = -1; sgn <= 1; sgn += 2) {
        for (int p = 0; p < panels; ++p) {
            double a = smax * double(p) / panels, b = smax * double(p + 1) / panels;
            double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            for (int i = 0; i < 8; ++i)
                for (int pm = -1; pm <= 1; pm += 2) {
                    double s = mid + pm * half * nodes[i];
                    cplx dir = (sgn > 0) ? dirp : dirm;
                    rq.z.push_back(anchor + s * dir);
                    // oriented from anchor + inf e^{-i phi} to anchor + inf e^{i phi}:
                    // dZ/ds = -e^{-i phi} on the incoming branch
                    rq.w.push_back(half * gw[i] * (sgn > 0 ? dir : -dir));
                }
        }
    }
    return rq;
}

const cplx kTwoPiI(0.0, 2.0 * kPi);

} // namespace

cplx crossover_k11(double ua, double xi, double ub, double xip, double v,
                   const RayAnchors& an, int per_unit) {
    RayQuad rz = make_ray(an.a11, kPi / 3.0, 6.5, per_unit);
    RayQuad rw = make_ray(an.a11, kPi / 3.0, 6.5, per_unit);
    cplx acc = 0.0;
    for (size_t j = 0; j < rz.z.size(); ++j) {
        cplx z = rz.z[j];
        cplx ez = std::exp(z * z * z / 3.0 - z * z * ua - z * xi) * rz.w[j];
        cplx rowacc = 0.0;
        for (size_t k = 0; k < rw.z.size(); ++k) {
            cplx w = rw.z[k];
            cplx ew = std::exp(w * w * w / 3.0 - w * w * ub - w * xip) * rw.w[k];
            rowacc += ew * (z - w) * (w + 2.0 * v) * (z + 2.0 * v) /
                      (4.0 * z * w * (z + w));
        }
        acc += ez * rowacc;
    }
    return acc / (kTwoPiI * kTwoPiI);
}

cplx crossover_k12(double ua, double xi, double ub, double xip, double v,
                   const RayAnchors& an, int per_unit) {
    // K12^{v,1}
    RayQuad rz = make_ray(an.az, kPi / 3.0, 6.5, per_unit);
    RayQuad rw = make_ray(an.aw, 2.0 * kPi / 3.0, 6.5, per_unit);
    cplx acc = 0.0;
    for (size_t j = 0; j < rz.z.size(); ++j) {
        cplx z = rz.z[j];
        cplx ez = std::exp(z * z * z / 3.0 - z * z * ua - z * xi) * rz.w[j];
        cplx rowacc = 0.0;
        for (size_t k = 0; k < rw.z.size(); ++k) {
            cplx w = rw.z[k];
            cplx ew = std::exp(-(w * w * w) / 3.0 + w * w * ub + w * xip) * rw.w[k];
            rowacc += ew * (z + w) * (z + 2.0 * v) / (2.0 * (w + 2.0 * v) * z * (z - w));
        }
        acc += ez * rowacc;
    }
    cplx val = acc / (kTwoPiI * kTwoPiI);
    // K12^{v,2}: zero for a <= b, i.e. ua >= ub; for a > b (ua < ub) the
    // Gaussian integral over iR in closed form
    if (ua < ub) {
        double c = ub - ua;
        double d = xip - xi;
        val += -std::exp(-d * d / (4.0 * c)) / (2.0 * std::sqrt(kPi * c));
    }
    return val;
}

cplx crossover_k22(double ua, double xi, double ub, double xip, double v,
                   const RayAnchors& an, int per_unit) {
    RayQuad rz = make_ray(an.b3, 2.0 * kPi / 3.0, 6.5, per_unit);
    RayQuad rw = make_ray(an.b4, 2.0 * kPi / 3.0, 6.5, per_unit);
    cplx acc = 0.0;
    for (size_t j = 0; j < rz.z.size(); ++j) {
        cplx z = rz.z[j];
        cplx ez = std::exp(-(z * z * z) / 3.0 + z * z * ua + z * xi) * rz.w[j];
        cplx rowacc = 0.0;
        for (size_t k = 0; k < rw.z.size(); ++k) {
            cplx w = rw.z[k];
            cplx ew = std::exp(-(w * w * w) / 3.0 + w * w * ub + w * xip) * rw.w[k];
            rowacc += ew * (z - w) / ((w + 2.0 * v) * (z + 2.0 * v) * (z + w));
        }
        acc += ez * rowacc;
    }
    cplx val = acc / (kTwoPiI * kTwoPiI);
    if (ua == 0.0 && ub == 0.0) {
        // e^{8v^3/3 - 2v xi'} (2 pi i)^{-1} int_{C1 ray} e^{-Z^3/3+Z xi}/(Z-2v)
        // + sgn(xi'-xi) e^{-2v|xi-xi'|}
        RayQuad rc = make_ray(an.c1, 2.0 * kPi / 3.0, 6.5, per_unit);
        cplx single = 0.0;
        for (size_t j = 0; j < rc.z.size(); ++j) {
            cplx z = rc.z[j];
            single += std::exp(-(z * z * z) / 3.0 + z * xi) / (z - 2.0 * v) * rc.w[j];
        }
        val += std::exp(8.0 * v * v * v / 3.0 - 2.0 * v * xip) * single / kTwoPiI;
        double sgn = (xip > xi) ? 1.0 : (xip < xi ? -1.0 : 0.0);
        val += sgn * std::exp(-2.0 * v * std::abs(xi - xip));
    } else {
        RayQuad rb2 = make_ray(an.b2, 2.0 * kPi / 3.0, 6.5, per_unit);
        cplx single = 0.0;
        for (size_t j = 0; j < rb2.z.size(); ++j) {
            cplx z = rb2.z[j];
            single += std::exp(-(z * z * z) / 3.0 + z * z * ua + z * xi) /
                      (z - 2.0 * v) * rb2.w[j];
        }
        val += std::exp(8.0 * v * v * v / 3.0 + 4.0 * v * v * ub - 2.0 * v * xip) *
               single / kTwoPiI;
        // quadratic-decay ray needs a wider truncation
        double cc = ua + ub;
        double smax = std::sqrt(85.0 / std::max(cc, 0.05)) + 2.0;
        RayQuad rb1 = make_ray(an.b1, 2.0 * kPi / 3.0, smax, per_unit);
        cplx single2 = 0.0;
        for (size_t j = 0; j < rb1.z.size(); ++j) {
            cplx z = rb1.z[j];
            single2 += 2.0 * z / ((z + 2.0 * v) * (z - 2.0 * v)) *
                       std::exp(z * z * cc + z * (xi - xip)) * rb1.w[j];
        }
        val -= single2 / kTwoPiI;
    }
    return val;
}

Mat2 crossover_kernel(const CrossoverParams& p, int a_idx, double xi, int b_idx,
                      double xip) {
    if (a_idx < 0 || a_idx >= int(p.us.size()) || b_idx < 0 || b_idx >= int(p.us.size()))
        throw config_error("crossover_kernel: bad endpoint index");
    for (size_t i = 0; i + 1 < p.us.size(); ++i)
        if (!(p.us[i] > p.us[i + 1]))
            throw config_error("crossover_kernel: need u_1 > ... > u_k >= 0");
    RayAnchors an = RayAnchors::defaults(p.v);
    const double dq = p.d_q();
    const double ua = dq * p.us[size_t(a_idx)], ub = dq * p.us[size_t(b_idx)];
    Mat2 m;
    m[0][0] = crossover_k11(ua, xi, ub, xip, p.v, an, p.points_per_unit);
    m[0][1] = crossover_k12(ua, xi, ub, xip, p.v, an, p.points_per_unit);
    m[1][0] = -crossover_k12(ub, xip, ua, xi, p.v, an, p.points_per_unit);
    m[1][1] = crossover_k22(ua, xi, ub, xip, p.v, an, p.points_per_unit);
    return m;
}

LppProb F_uv(double u, double v, double s, double tol) {
    if (s < -6.0) throw config_error("F_uv: s >= -6 guard");
    RayAnchors an = RayAnchors::defaults(v);
    // window length from the decay of the 1,2 diagonal
    double len = 10.0;
    for (; len < 16.0; len += 2.0) {
        cplx probe = crossover_k12(u, s + len, u, s + len, v, an, 10);
        if (std::abs(probe) < tol * 2e-2) break;
    }
    auto pts = continuum_points(0, s, len, 8);
    const int n = int(pts.size());
    std::vector<double> xs;
    for (auto& p : pts) xs.push_back(p.x);

    // batched tables T[x][y] = sum_{jk} G_j H_k C(Z_j,W_k) E_j(x) E'_k(y)
    auto batched = [&](const RayQuad& rz, const RayQuad& rw,
                       const std::function<cplx(cplx)>& gz,
                       const std::function<cplx(cplx)>& gw,
                       const std::function<cplx(cplx, cplx)>& coupled,
                       double ez_sign, double ew_sign) {
        const int mz = int(rz.z.size()), mw = int(rw.z.size());
        std::vector<cplx> g(static_cast<size_t>(mz)), h(static_cast<size_t>(mw));
        for (int j = 0; j < mz; ++j) g[size_t(j)] = gz(rz.z[size_t(j)]) * rz.w[size_t(j)];
        for (int k = 0; k < mw; ++k) h[size_t(k)] = gw(rw.z[size_t(k)]) * rw.w[size_t(k)];
        std::vector<cplx> ew(size_t(mw) * size_t(n));
        for (int k = 0; k < mw; ++k)
            for (int y = 0; y < n; ++y)
                ew[size_t(k) * size_t(n) + size_t(y)] =
                    std::exp(ew_sign * rw.z[size_t(k)] * xs[size_t(y)]);
        std::vector<cplx> acc(size_t(mz) * size_t(n), 0.0);
        for (int j = 0; j < mz; ++j)
            for (int k = 0; k < mw; ++k) {
                cplx f = coupled(rz.z[size_t(j)], rw.z[size_t(k)]) * h[size_t(k)];
                if (f == cplx(0.0)) continue;
                const cplx* src = &ew[size_t(k) * size_t(n)];
                cplx* dst = &acc[size_t(j) * size_t(n)];
                for (int y = 0; y < n; ++y) dst[y] += f * src[y];
            }
        std::vector<cplx> table(size_t(n) * size_t(n), 0.0);
        for (int j = 0; j < mz; ++j) {
            for (int x = 0; x < n; ++x) {
                cplx e = g[size_t(j)] * std::exp(ez_sign * rz.z[size_t(j)] * xs[size_t(x)]);
                const cplx* src = &acc[size_t(j) * size_t(n)];
                for (int y = 0; y < n; ++y)
                    table[size_t(x) * size_t(n) + size_t(y)] += e * src[y];
            }
        }
        const cplx scale = 1.0 / (kTwoPiI * kTwoPiI);
        for (auto& vv : table) vv *= scale;
        return table;
    };

    const int pu = 16;
    RayQuad r11 = make_ray(an.a11, kPi / 3.0, 6.5, pu);
    RayQuad rz12 = make_ray(an.az, kPi / 3.0, 6.5, pu);
    RayQuad rw12 = make_ray(an.aw, 2.0 * kPi / 3.0, 6.5, pu);
    RayQuad rb34z = make_ray(an.b3, 2.0 * kPi / 3.0, 6.5, pu);
    RayQuad rb34w = make_ray(an.b4, 2.0 * kPi / 3.0, 6.5, pu);

    auto t11 = batched(
        r11, r11, [&](cplx z) { return std::exp(z * z * z / 3.0 - z * z * u); },
        [&](cplx w) { return std::exp(w * w * w / 3.0 - w * w * u); },
        [&](cplx z, cplx w) {
            return (z - w) * (w + 2.0 * v) * (z + 2.0 * v) / (4.0 * z * w * (z + w));
        },
        -1.0, -1.0);
    auto t12 = batched(
        rz12, rw12, [&](cplx z) { return std::exp(z * z * z / 3.0 - z * z * u); },
        [&](cplx w) { return std::exp(-(w * w * w) / 3.0 + w * w * u); },
        [&](cplx z, cplx w) {
            return (z + w) * (z + 2.0 * v) / (2.0 * (w + 2.0 * v) * z * (z - w));
        },
        -1.0, 1.0);
    auto t22 = batched(
        rb34z, rb34w, [&](cplx z) { return std::exp(-(z * z * z) / 3.0 + z * z * u); },
        [&](cplx w) { return std::exp(-(w * w * w) / 3.0 + w * w * u); },
        [&](cplx z, cplx w) {
            return (z - w) / ((w + 2.0 * v) * (z + 2.0 * v) * (z + w));
        },
        1.0, 1.0);

    // the rank-one and difference-kernel parts of K22^{v,2}
    if (u == 0.0) {
        RayQuad rc = make_ray(an.c1, 2.0 * kPi / 3.0, 6.5, pu);
        std::vector<cplx> svec(size_t(n), 0.0);
        for (int x = 0; x < n; ++x) {
            cplx single = 0.0;
            for (size_t j = 0; j < rc.z.size(); ++j) {
                cplx z = rc.z[j];
                single += std::exp(-(z * z * z) / 3.0 + z * xs[size_t(x)]) /
                          (z - 2.0 * v) * rc.w[j];
            }
            svec[size_t(x)] = single / kTwoPiI;
        }
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) {
                double xi = xs[size_t(x)], xip = xs[size_t(y)];
                cplx add = std::exp(8.0 * v * v * v / 3.0 - 2.0 * v * xip) * svec[size_t(x)];
                double sgn = (xip > xi) ? 1.0 : (xip < xi ? -1.0 : 0.0);
                add += sgn * std::exp(-2.0 * v * std::abs(xi - xip));
                t22[size_t(x) * size_t(n) + size_t(y)] += add;
            }
    } else {
        RayQuad rb2 = make_ray(an.b2, 2.0 * kPi / 3.0, 6.5, pu);
        std::vector<cplx> svec(size_t(n), 0.0);
        for (int x = 0; x < n; ++x) {
            cplx single = 0.0;
            for (size_t j = 0; j < rb2.z.size(); ++j) {
                cplx z = rb2.z[j];
                single += std::exp(-(z * z * z) / 3.0 + z * z * u + z * xs[size_t(x)]) /
                          (z - 2.0 * v) * rb2.w[j];
            }
            svec[size_t(x)] = single / kTwoPiI;
        }
        double cc = 2.0 * u;
        double smax = std::sqrt(85.0 / std::max(cc, 0.05)) + 2.0;
        RayQuad rb1 = make_ray(an.b1, 2.0 * kPi / 3.0, smax, pu);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) {
                double xi = xs[size_t(x)], xip = xs[size_t(y)];
                cplx add = std::exp(8.0 * v * v * v / 3.0 + 4.0 * v * v * u -
                                    2.0 * v * xip) *
                           svec[size_t(x)];
                cplx single2 = 0.0;
                for (size_t j = 0; j < rb1.z.size(); ++j) {
                    cplx z = rb1.z[j];
                    single2 += 2.0 * z / ((z + 2.0 * v) * (z - 2.0 * v)) *
                               std::exp(z * z * cc + z * (xi - xip)) * rb1.w[j];
                }
                add -= single2 / kTwoPiI;
                t22[size_t(x) * size_t(n) + size_t(y)] += add;
            }
    }

    BlockKernel lookup = [&](const FredholmPoint& a, const FredholmPoint& b) {
        int i = -1, j = -1;
        for (int p = 0; p < n; ++p) {
            if (i < 0 && xs[size_t(p)] == a.x) i = p;
            if (j < 0 && xs[size_t(p)] == b.x) j = p;
        }
        Mat2 blk;
        blk[0][0] = t11[size_t(i) * size_t(n) + size_t(j)];
        blk[0][1] = t12[size_t(i) * size_t(n) + size_t(j)];
        blk[1][0] = -t12[size_t(j) * size_t(n) + size_t(i)];
        blk[1][1] = t22[size_t(i) * size_t(n) + size_t(j)];
        return blk;
    };
    FredholmSpec fs{lookup, pts, n + 1};
    auto res = fredholm_pfaffian(fs, 1.0);
    return {res.value, res.tail_bound + tol * 0.1};
}

} // namespace fbschur
