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

#include "fbschur/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <unordered_map>

#include "fbschur/pfaffian.hpp"

namespace fbschur {

LogPoint log_point(cplx z) {
    return {std::log(std::abs(z)), std::arg(z)};
}

namespace {

constexpr double kPi = 3.14159265358979323846;

cplx mul_qpoch(const std::vector<cplx>& xs, double q, double tol) {
    QParams qp(q, tol);
    cplx prod = 1.0;
    for (cplx x : xs) prod *= qpoch(x, qp);
    return prod;
}

// one-boundary kappa rational parts; half powers applied by the caller
cplx kappa_rational(KappaVariant var, Block block, cplx z, cplx w,
                    const KappaParams& p) {
    const double v = p.v, t = p.t;
    const cplx zw = z * w;
    switch (var) {
        case KappaVariant::plain:
            switch (block) {
                case Block::k11:
                    return v * v * (z - w) / ((z + v) * (w + v) * (zw - v * v)) / t;
                case Block::k12:
                    return (zw - v * v) / ((z - w) * (w - v) * (z + v));
                case Block::k22:
                    return t * v * v * (z - w) / ((z - v) * (w - v) * (zw - v * v));
            }
            break;
        case KappaVariant::odd_columns:
        case KappaVariant::even_columns: {
            const double a = (var == KappaVariant::even_columns ? 0.0 : p.param) * v;
            switch (block) {
                case Block::k11:
                    return v * v * (z - w) * (z - a) * (w - a) /
                           ((z * z - v * v) * (w * w - v * v) * (zw - v * v)) / t;
                case Block::k12:
                    return (zw - v * v) * (z - a) /
                           ((z - w) * (z * z - v * v) * (w - a));
                case Block::k22:
                    return t * v * v * (z - w) / ((zw - v * v) * (z - a) * (w - a));
            }
            break;
        }
        case KappaVariant::odd_rows:
        case KappaVariant::even_rows: {
            const double b = (var == KappaVariant::even_rows ? 0.0 : p.param) * v;
            switch (block) {
                case Block::k11:
                    return v * v * (z - w) / ((zw - v * v) * (z + b) * (w + b)) / t;
                case Block::k12:
                    return (zw - v * v) * (w + b) /
                           ((z - w) * (w * w - v * v) * (z + b));
                case Block::k22:
                    return t * v * v * (z - w) * (z + b) * (w + b) /
                           ((z * z - v * v) * (w * w - v * v) * (zw - v * v));
            }
            break;
        }
        case KappaVariant::two_boundary:
            throw config_error("kappa_rational: two_boundary handled separately");
    }
    throw config_error("kappa_rational: bad block");
}

cplx kappa_two_boundary(Block block, const LogPoint& z, const LogPoint& w,
                        const KappaParams& p) {
    const double u = p.u, v = p.v, t = p.t;
    if (u == 0.0) {
        // limit of the theta form; equals the plain one-boundary kernels
        KappaParams q = p;
        return kappa(KappaVariant::plain, block, z, w, q);
    }
    const double quv = u * v, q2 = quv * quv, q4 = q2 * q2;
    QParams qp2(q2, p.tol), qp4(q4, p.tol);
    const cplx zv = z.value(), wv = w.value();
    const cplx woz = wv / zv;
    const double c2 = std::pow(qpoch(q2, qp2).real(), 2.0);  // ((uv)^2;(uv)^2)_inf^2
    const cplx th_woz = theta_q(woz, qp2);
    const cplx th_uzw = theta_q(u * u * zv * wv, qp2);
    const double norm3 = theta3(t * t, qp4).real();
    switch (block) {
        case Block::k11: {
            cplx denom = mul_qpoch({u * zv, u * wv, -v / zv, -v / wv}, quv, p.tol);
            cplx th3 = theta3(std::pow(t * zv * wv / (v * v), 2.0), qp4);
            return z.pow(-0.5) * w.pow(-1.5) * (v * v / t) * c2 * th_woz * th3 /
                   (denom * th_uzw * norm3);
        }
        case Block::k12: {
            cplx denom = mul_qpoch({u * zv, -u * wv, -v / zv, v / wv}, quv, p.tol);
            cplx th3 = theta3(std::pow(t * zv / wv, 2.0), qp4);
            return z.pow(-0.5) * w.pow(0.5) * c2 * th_uzw * th3 /
                   (denom * th_woz * norm3);
        }
        case Block::k22: {
            cplx denom = mul_qpoch({-u * zv, -u * wv, v / zv, v / wv}, quv, p.tol);
            cplx th3 = theta3(std::pow(t * v * v / (zv * wv), 2.0), qp4);
            return z.pow(-0.5) * w.pow(-1.5) * (t * v * v) * c2 * th_woz * th3 /
                   (denom * th_uzw * norm3);
        }
    }
    throw config_error("kappa_two_boundary: bad block");
}

} // namespace

cplx kappa(KappaVariant var, Block block, const LogPoint& z, const LogPoint& w,
           const KappaParams& p) {
    if (var == KappaVariant::two_boundary) return kappa_two_boundary(block, z, w, p);
    return z.pow(0.5) * w.pow(0.5) *
           kappa_rational(var, block, z.value(), w.value(), p);
}

cplx kappa(KappaVariant var, Block block, cplx z, cplx w, const KappaParams& p) {
    return kappa(var, block, log_point(z), log_point(w), p);
}

cplx propagator_row(KappaVariant var, PropRow row, cplx z, cplx w,
                    const KappaParams& p) {
    const double v = p.v;
    const cplx s = std::sqrt(z * w), zw = z * w;
    const cplx vz = z * z - v * v, vw = w * w - v * v;
    switch (var) {
        case KappaVariant::plain:
            switch (row) {
                case PropRow::psi_psi:
                    return v * v * s * (z - w) / ((z + v) * (w + v) * (zw - v * v));
                case PropRow::psi_psistar:
                    return s * (zw - v * v) / ((z - w) * (w - v) * (z + v));
                case PropRow::psistar_psi:
                    return s * (zw - v * v) / ((z - w) * (w + v) * (z - v));
                case PropRow::psistar_psistar:
                    return v * v * s * (z - w) / ((z - v) * (w - v) * (zw - v * v));
            }
            break;
        case KappaVariant::even_rows:
            switch (row) {
                case PropRow::psi_psi:
                    return v * v * (z - w) / (s * (zw - v * v));
                case PropRow::psi_psistar:
                    return w * std::sqrt(w / z) * (zw - v * v) / ((z - w) * vw);
                case PropRow::psistar_psi:
                    return z * std::sqrt(z / w) * (zw - v * v) / ((z - w) * vz);
                case PropRow::psistar_psistar:
                    return v * v * zw * s * (z - w) / (vz * vw * (zw - v * v));
            }
            break;
        case KappaVariant::even_columns:
            switch (row) {
                case PropRow::psi_psi:
                    return v * v * zw * s * (z - w) / (vz * vw * (zw - v * v));
                case PropRow::psi_psistar:
                    return z * std::sqrt(z / w) * (zw - v * v) / ((z - w) * vz);
                case PropRow::psistar_psi:
                    return w * std::sqrt(w / z) * (zw - v * v) / ((z - w) * vw);
                case PropRow::psistar_psistar:
                    return v * v * (z - w) / (s * (zw - v * v));
            }
            break;
        case KappaVariant::odd_columns: {
            const cplx a = p.param * v;
            switch (row) {
                case PropRow::psi_psi:
                    return v * v * s * (z - w) * (z - a) * (w - a) /
                           (vz * vw * (zw - v * v));
                case PropRow::psi_psistar:
                    return s * (zw - v * v) * (z - a) / ((z - w) * vz * (w - a));
                case PropRow::psistar_psi:
                    return s * (zw - v * v) * (w - a) / ((z - w) * vw * (z - a));
                case PropRow::psistar_psistar:
                    return v * v * s * (z - w) / ((zw - v * v) * (z - a) * (w - a));
            }
            break;
        }
        case KappaVariant::odd_rows: {
            const cplx b = p.param * v;
            switch (row) {
                case PropRow::psi_psi:
                    return v * v * s * (z - w) / ((zw - v * v) * (z + b) * (w + b));
                case PropRow::psi_psistar:
                    return s * (zw - v * v) * (w + b) / ((z - w) * vw * (z + b));
                case PropRow::psistar_psi:
                    return s * (zw - v * v) * (z + b) / ((z - w) * vz * (w + b));
                case PropRow::psistar_psistar:
                    return v * v * s * (z - w) * (z + b) * (w + b) /
                           (vz * vw * (zw - v * v));
            }
            break;
        }
        case KappaVariant::two_boundary: {
            // raw C.2 rows = normalized kappa times <u,t|v,t>
            double norm = two_boundary_norm(p.u, p.v, p.t);
            LogPoint lz = log_point(z), lw = log_point(w);
            switch (row) {
                case PropRow::psi_psi:
                    return kappa_two_boundary(Block::k11, lz, lw, p) * norm;
                case PropRow::psi_psistar:
                    return kappa_two_boundary(Block::k12, lz, lw, p) * norm;
                case PropRow::psistar_psistar:
                    return kappa_two_boundary(Block::k22, lz, lw, p) * norm;
                case PropRow::psistar_psi: {
                    // <u,t|psi*(z)psi(w)|v,t>: C.2 row 3
                    const double u = p.u, t = p.t;
                    const double quv = u * v, q2 = quv * quv, q4 = q2 * q2;
                    QParams qp2(q2, p.tol), qp4(q4, p.tol);
                    double c2 = std::pow(std::abs(qpoch(q2, qp2)), 2.0);
                    cplx denom = mul_qpoch({v / z, -v / w, -u * z, u * w}, quv, p.tol);
                    cplx th3 = theta3(std::pow(t * w / z, 2.0), qp4);
                    QParams quvp(quv, p.tol);
                    return std::sqrt(z / w) * c2 * theta_q(u * u * z * w, qp2) * th3 /
                           (denom * theta_q(w / z, qp2) * qpoch(quv, quvp));
                }
            }
            break;
        }
    }
    throw config_error("propagator_row: bad arguments");
}

double two_boundary_norm(double u, double v, double t) {
    const double quv = u * v;
    QParams qp4(std::pow(quv, 4.0), 1e-15), qpv(quv, 1e-15);
    return theta3(t * t, qp4).real() / qpoch(quv, qpv).real();
}

// ---------------------------------------------------------------------------
// F-prefactors
// ---------------------------------------------------------------------------

cplx F_one(const ProcessSpec& spec, int i, cplx z) {
    if (spec.u != 0.0) throw config_error("F_one: needs u = 0");
    cplx num = 1.0, den = 1.0;
    for (int l = 1; l <= i; ++l) num *= spec.rho_plus[size_t(l - 1)].H(z);
    std::vector<Specialization> plus(spec.rho_plus.begin(), spec.rho_plus.end());
    Specialization rp = Specialization::unite(plus);
    den *= Specialization::scaled(spec.v * spec.v, rp).H(1.0 / z);
    for (int l = std::max(i, 1); l <= spec.N; ++l)
        den *= spec.rho_minus[size_t(l - 1)].H(1.0 / z);
    return num / den;
}

cplx F_two(const ProcessSpec& spec, int i, cplx z, double tol) {
    const double u = spec.u, v = spec.v;
    if (u == 0.0) return F_one(spec, i, z);
    std::vector<Specialization> plus, minus;
    for (int l = 1; l <= spec.N; ++l) {
        plus.push_back(spec.rho_plus[size_t(l - 1)]);
        minus.push_back(spec.effective_rho_minus(l));
    }
    Specialization rp = Specialization::unite(plus);
    Specialization rm = Specialization::unite(minus);
    cplx f = 1.0;
    for (int l = 1; l <= i; ++l) f *= spec.rho_plus[size_t(l - 1)].H(z);
    for (int l = std::max(i, 1); l <= spec.N; ++l)
        f /= spec.effective_rho_minus(l).H(1.0 / z);
    const double scale = std::max(rp.max_leaf(), rm.max_leaf());
    for (int n = 1; n < 10000; ++n) {
        f *= Specialization::scaled(std::pow(u, 2.0 * n) * std::pow(v, 2.0 * n - 2.0), rm).H(z);
        f *= Specialization::scaled(std::pow(u * v, 2.0 * n), rp).H(z);
        f /= Specialization::scaled(std::pow(u, 2.0 * n - 2.0) * std::pow(v, 2.0 * n), rp).H(1.0 / z);
        f /= Specialization::scaled(std::pow(u * v, 2.0 * n), rm).H(1.0 / z);
        if (std::pow(u * v, 2.0 * n - 2.0) * u * u * scale < tol) break;
    }
    return f;
}

cplx F_H(const std::vector<double>& x, int i, cplx z) {
    cplx f = 1.0;
    for (size_t k = 0; k < x.size(); ++k) f *= 1.0 - x[k] / z;
    for (int k = 1; k <= i; ++k) f /= 1.0 - x[size_t(k - 1)] * z;
    return f;
}

cplx F_HV(const std::vector<double>& x, int i, cplx z) {
    if (x.size() % 2 != 0) throw config_error("F_HV: need an even number of variables");
    const int m = int(x.size()) / 2;
    cplx f = 1.0;
    for (int k = 1; k <= i / 2; ++k) f *= 1.0 + x[size_t(2 * k - 1)] * z;
    for (int k = 1; k <= (i + 1) / 2; ++k) f /= 1.0 - x[size_t(2 * k - 2)] * z;
    for (int k = 1; k <= m; ++k)
        f *= (1.0 - x[size_t(2 * k - 2)] / z) / (1.0 + x[size_t(2 * k - 1)] / z);
    return f;
}

cplx F_pp(int n, int i, double q, cplx z) {
    QParams qp(q, 1e-15);
    return qpoch(q / z, qp, long(n)) / qpoch(std::pow(q, i + 1) * z, qp, long(n - i));
}

cplx F_ov(double x, double q, cplx z, std::optional<long> ncap) {
    QParams qp(q, 1e-15);
    const long cx = long(std::ceil(x));
    const long cxh = long(std::ceil(x + 0.5));
    std::optional<long> n1, n2, nn;
    if (ncap.has_value()) {
        n1 = *ncap + 1 - cxh;
        n2 = *ncap + 1 - cx;
        nn = *ncap;
    }
    return qpoch(-std::pow(q, double(cxh)) * z, qp, n1) /
           qpoch(std::pow(q, double(cx)) * z, qp, n2) * qpoch(q / z, qp, nn) /
           qpoch(-q / z, qp, nn);
}

// ---------------------------------------------------------------------------
// contour engine
// ---------------------------------------------------------------------------

cplx contour_double_integral(double rz, double rw,
                             const std::function<cplx(const LogPoint&)>& fz,
                             const std::function<cplx(const LogPoint&)>& fw,
                             const std::function<cplx(const LogPoint&, const LogPoint&)>& coupled,
                             double tol, int m_start, int m_max,
                             QuadratureDiag* diag) {
    cplx prev = 0.0;
    bool have = false;
    const double lz = std::log(rz), lw = std::log(rw);
    for (int m = m_start; m <= m_max; m *= 2) {
        std::vector<LogPoint> zs(static_cast<size_t>(m)), ws(static_cast<size_t>(m));
        std::vector<cplx> az(static_cast<size_t>(m)), aw(static_cast<size_t>(m));
        for (int a = 0; a < m; ++a) {
            zs[size_t(a)] = {lz, 2.0 * kPi * (a + 0.5) / m};
            ws[size_t(a)] = {lw, 2.0 * kPi * (a + 0.5) / m};
            az[size_t(a)] = fz(zs[size_t(a)]);
            aw[size_t(a)] = fw(ws[size_t(a)]);
        }
        cplx acc = 0.0;
        for (int a = 0; a < m; ++a) {
            cplx rowacc = 0.0;
            for (int b = 0; b < m; ++b)
                rowacc += aw[size_t(b)] * coupled(zs[size_t(a)], ws[size_t(b)]);
            acc += az[size_t(a)] * rowacc;
        }
        acc /= double(m) * double(m);
        if (have && std::abs(acc - prev) < tol * std::max(1.0, std::abs(acc))) {
            if (diag) {
                diag->m_used = m;
                diag->est_error = std::abs(acc - prev);
            }
            return acc;
        }
        prev = acc;
        have = true;
    }
    throw numeric_error("contour_double_integral: no convergence at M = " +
                        std::to_string(m_max) + ", last value " +
                        std::to_string(prev.real()) + "+" +
                        std::to_string(prev.imag()) + "i");
}

// ---------------------------------------------------------------------------
// kernel entries
// ---------------------------------------------------------------------------

std::pair<double, double> radius_window(const ProcessSpec& spec) {
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double plus_leaf = 0.0, minus_leaf = 0.0, all_leaf = 0.0;
    for (int l = 1; l <= spec.N; ++l) {
        plus_leaf = std::max(plus_leaf, spec.rho_plus[size_t(l - 1)].max_leaf());
        minus_leaf = std::max(minus_leaf, spec.effective_rho_minus(l).max_leaf());
    }
    all_leaf = std::max(plus_leaf, minus_leaf);
    if (spec.u == 0.0) {
        lo = std::max({spec.v, spec.v * spec.v * plus_leaf, minus_leaf});
        if (spec.variant != BoundaryWeight::plain)
            lo = std::max(lo, spec.variant_param * spec.v);
        if (plus_leaf > 0.0) hi = 1.0 / plus_leaf;
    } else {
        const double r = all_leaf > 0.0 ? 1.0 / all_leaf
                                        : std::numeric_limits<double>::infinity();
        lo = std::max(spec.v, 1.0 / r);
        hi = std::min(r, 1.0 / spec.u);
    }
    if (!(lo < hi))
        throw domain_error("radius_window: no admissible radius window");
    if (!std::isfinite(hi)) hi = std::max(4.0 * std::max(lo, 1.0), 4.0);
    return {lo, hi};
}

namespace {

struct EntrySetup {
    KappaVariant var;
    KappaParams params;
    std::function<cplx(cplx)> f_of_z;  // the F-prefactor
};

EntrySetup entry_setup(const ProcessSpec& spec, double t, double tol) {
    EntrySetup s;
    s.params.u = spec.u;
    s.params.v = spec.v;
    s.params.t = t;
    s.params.param = spec.variant_param;
    if (spec.u == 0.0) {
        switch (spec.variant) {
            case BoundaryWeight::plain: s.var = KappaVariant::plain; break;
            case BoundaryWeight::odd_columns: s.var = KappaVariant::odd_columns; break;
            case BoundaryWeight::odd_rows: s.var = KappaVariant::odd_rows; break;
        }
    } else {
        s.var = KappaVariant::two_boundary;
    }
    (void)tol;
    return s;
}

} // namespace

cplx kernel_entry_at_radii(const KernelRequest& req, double rz, double rw,
                           double tol, QuadratureDiag* diag) {
    const ProcessSpec& spec = req.spec;
    spec.validate();
    if (req.i < 1 || req.i > spec.N || req.ip < 1 || req.ip > spec.N)
        throw config_error("kernel_entry: abscissa out of range");
    EntrySetup setup = entry_setup(spec, req.t, tol);
    const bool two = (spec.u != 0.0);
    auto ffun = [&](int i, cplx z) {
        return two ? F_two(spec, i, z, tol * 1e-3) : F_one(spec, i, z);
    };
    const double kv = 0.5 * double(req.k.twice);
    const double kpv = 0.5 * double(req.kp.twice);
    std::function<cplx(const LogPoint&)> fz, fw;
    switch (req.block) {
        case Block::k11:
            fz = [&, kv](const LogPoint& z) { return z.pow(-kv) * ffun(req.i, z.value()); };
            fw = [&, kpv](const LogPoint& w) { return w.pow(-kpv) * ffun(req.ip, w.value()); };
            break;
        case Block::k12:
            fz = [&, kv](const LogPoint& z) { return z.pow(-kv) * ffun(req.i, z.value()); };
            fw = [&, kpv](const LogPoint& w) { return w.pow(kpv) / ffun(req.ip, w.value()); };
            break;
        case Block::k22:
            fz = [&, kv](const LogPoint& z) { return z.pow(kv) / ffun(req.i, z.value()); };
            fw = [&, kpv](const LogPoint& w) { return w.pow(kpv) / ffun(req.ip, w.value()); };
            break;
    }
    auto coupled = [&](const LogPoint& z, const LogPoint& w) {
        return kappa(setup.var, req.block, z, w, setup.params);
    };
    return contour_double_integral(rz, rw, fz, fw, coupled, tol, 64, 32768, diag);
}

cplx kernel_entry(const KernelRequest& req, double tol, QuadratureDiag* diag) {
    auto [lo, hi] = radius_window(req.spec);
    const double r0 = std::sqrt(lo * hi);
    const double delta = 0.017;
    const bool z_outside = (req.i <= req.ip);
    const double rz = z_outside ? r0 * (1.0 + delta) : r0 * (1.0 - delta);
    const double rw = z_outside ? r0 * (1.0 - delta) : r0 * (1.0 + delta);
    return kernel_entry_at_radii(req, rz, rw, tol, diag);
}

// ---------------------------------------------------------------------------
// series coefficient oracle (one free boundary)
// ---------------------------------------------------------------------------

namespace {

// dense univariate Laurent series: exponents lo .. lo + c.size() - 1
struct USeries {
    int lo = 0;
    std::vector<double> c;
};

// dense bivariate Laurent window [-w, w]^2
struct BivSeries {
    int w;
    std::vector<double> c;
    explicit BivSeries(int w_) : w(w_), c(size_t(2 * w_ + 1) * size_t(2 * w_ + 1), 0.0) {}
    double& at(int a, int b) { return c[size_t(a + w) * size_t(2 * w + 1) + size_t(b + w)]; }
    double get(int a, int b) const {
        if (std::abs(a) > w || std::abs(b) > w) return 0.0;
        return c[size_t(a + w) * size_t(2 * w + 1) + size_t(b + w)];
    }
};

void mul_univariate(BivSeries& biv, const USeries& s, bool in_z) {
    BivSeries out(biv.w);
    const int n = int(s.c.size());
    for (int j = 0; j < n; ++j) {
        const double coef = s.c[size_t(j)];
        if (coef == 0.0) continue;
        const int e = s.lo + j;
        for (int a = -biv.w; a <= biv.w; ++a) {
            int src = a - e;
            if (src < -biv.w || src > biv.w) continue;
            for (int b = -biv.w; b <= biv.w; ++b) {
                double val = in_z ? biv.get(src, b) : biv.get(b, src);
                if (val == 0.0) continue;
                if (in_z) out.at(a, b) += coef * val;
                else out.at(b, a) += coef * val;
            }
        }
    }
    biv = std::move(out);
}

// multiply by z^dz w^dw
void shift_biv(BivSeries& biv, int dz, int dw) {
    BivSeries out(biv.w);
    for (int a = -biv.w; a <= biv.w; ++a)
        for (int b = -biv.w; b <= biv.w; ++b) {
            double val = biv.get(a, b);
            if (val == 0.0) continue;
            if (std::abs(a + dz) <= biv.w && std::abs(b + dw) <= biv.w)
                out.at(a + dz, b + dw) += val;
        }
    biv = std::move(out);
}

// multiply by (zw - v^2)
void mul_zw_minus(BivSeries& biv, double v2) {
    BivSeries shifted = biv;
    shift_biv(shifted, 1, 1);
    for (size_t i = 0; i < biv.c.size(); ++i)
        shifted.c[i] -= v2 * biv.c[i];
    biv = std::move(shifted);
}

// multiply by 1/(zw - v^2) = sum_j v^{2j} z^{-j-1} w^{-j-1}
void mul_zw_inverse(BivSeries& biv, double v2) {
    BivSeries out(biv.w);
    for (int j = 0;; ++j) {
        double coef = std::pow(v2, double(j));
        if (coef < 1e-18 && j > 0) break;
        if (j > 2 * biv.w) break;
        for (int a = -biv.w; a <= biv.w; ++a)
            for (int b = -biv.w; b <= biv.w; ++b) {
                double val = biv.get(a + j + 1, b + j + 1);
                if (val != 0.0) out.at(a, b) += coef * val;
            }
    }
    biv = std::move(out);
}

// multiply by 1/(z - w): sum_j w^j z^{-j-1} if z_outside, else -sum_j z^j w^{-j-1}
void mul_z_minus_w_inverse(BivSeries& biv, bool z_outside) {
    BivSeries out(biv.w);
    for (int j = 0; j <= 2 * biv.w; ++j) {
        for (int a = -biv.w; a <= biv.w; ++a)
            for (int b = -biv.w; b <= biv.w; ++b) {
                if (z_outside) {
                    double val = biv.get(a + j + 1, b - j);
                    if (val != 0.0) out.at(a, b) += val;
                } else {
                    double val = biv.get(a - j, b + j + 1);
                    if (val != 0.0) out.at(a, b) -= val;
                }
            }
    }
    biv = std::move(out);
}

// Taylor coefficients of H(rho;t) as a USeries in t^{+1} (invert = reciprocal)
USeries h_series(const Specialization& rho, int deg, bool invert, bool in_inverse_var) {
    Specialization r = rho;
    if (invert) {
        // 1/H(rho;t) = H(neg rho;t): single x -> dual -x, dual x -> single -x
        std::vector<Specialization> parts;
        for (const auto& l : rho.leaves())
            parts.push_back(l.dual ? Specialization::single(-l.x)
                                   : Specialization::dual(-l.x));
        r = Specialization::unite(parts);
    }
    auto h = r.h_coeffs(deg);
    while (h.size() > 1 && std::abs(h.back()) < 1e-18) h.pop_back();
    int hdeg = int(h.size()) - 1;
    USeries s;
    if (in_inverse_var) {
        // series in 1/z: exponents 0, -1, ..., -hdeg
        s.lo = -hdeg;
        s.c.assign(size_t(hdeg) + 1, 0.0);
        for (int n = 0; n <= hdeg; ++n) s.c[size_t(hdeg - n)] = h[size_t(n)];
    } else {
        s.lo = 0;
        s.c = std::move(h);
    }
    return s;
}

USeries geometric_series(double ratio, int base_exp, int step_exp, double scale, int deg) {
    // scale * sum_j ratio^j z^{base + j*step}; step is +-1 or -2 etc.
    USeries s;
    std::vector<std::pair<int, double>> terms;
    double coef = scale;
    for (int j = 0; j <= deg; ++j) {
        terms.push_back({base_exp + j * step_exp, coef});
        coef *= ratio;
        if (std::abs(coef) < 1e-18) break;
    }
    int lo = terms[0].first, hi = terms[0].first;
    for (auto& tm : terms) {
        lo = std::min(lo, tm.first);
        hi = std::max(hi, tm.first);
    }
    s.lo = lo;
    s.c.assign(size_t(hi - lo) + 1, 0.0);
    for (auto& tm : terms) s.c[size_t(tm.first - lo)] += tm.second;
    return s;
}

USeries monomial_binomial(double c0, int e0, double c1, int e1) {
    // c0 z^{e0} + c1 z^{e1}
    USeries s;
    int lo = std::min(e0, e1), hi = std::max(e0, e1);
    s.lo = lo;
    s.c.assign(size_t(hi - lo) + 1, 0.0);
    s.c[size_t(e0 - lo)] += c0;
    s.c[size_t(e1 - lo)] += c1;
    return s;
}

} // namespace

cplx series_coefficient_oracle(const KernelRequest& req, int max_deg) {
    const ProcessSpec& spec = req.spec;
    if (spec.u != 0.0)
        throw config_error("series_coefficient_oracle: one free boundary only");
    if (max_deg > 200) throw config_error("series_coefficient_oracle: degree guard");
    spec.validate();
    const int w = max_deg;
    const double v = spec.v;
    BivSeries biv(w);
    biv.at(0, 0) = 1.0;
    const bool z_outside = (req.i <= req.ip);

    // kappa-hat pieces (kappa with the sqrt(zw) stripped), then F-factors
    const double a = spec.variant_param * v;  // alpha*v or beta*v
    switch (spec.variant) {
        case BoundaryWeight::plain:
            switch (req.block) {
                case Block::k11:
                    // v^2 (z-w) / ((z+v)(w+v)(zw-v^2)), t^{-1}
                    mul_zw_inverse(biv, v * v);
                    mul_univariate(biv, geometric_series(-v, -1, -1, 1.0, w), true);
                    mul_univariate(biv, geometric_series(-v, -1, -1, 1.0, w), false);
                    {
                        BivSeries t1 = biv, t2 = biv;
                        shift_biv(t1, 1, 0);
                        shift_biv(t2, 0, 1);
                        for (size_t i = 0; i < biv.c.size(); ++i)
                            biv.c[i] = v * v * (t1.c[i] - t2.c[i]) / req.t;
                    }
                    break;
                case Block::k12:
                    mul_zw_minus(biv, v * v);
                    mul_z_minus_w_inverse(biv, z_outside);
                    mul_univariate(biv, geometric_series(v, -1, -1, 1.0, w), false);
                    mul_univariate(biv, geometric_series(-v, -1, -1, 1.0, w), true);
                    break;
                case Block::k22:
                    mul_zw_inverse(biv, v * v);
                    mul_univariate(biv, geometric_series(v, -1, -1, 1.0, w), true);
                    mul_univariate(biv, geometric_series(v, -1, -1, 1.0, w), false);
                    {
                        BivSeries t1 = biv, t2 = biv;
                        shift_biv(t1, 1, 0);
                        shift_biv(t2, 0, 1);
                        for (size_t i = 0; i < biv.c.size(); ++i)
                            biv.c[i] = v * v * (t1.c[i] - t2.c[i]) * req.t;
                    }
                    break;
            }
            break;
        case BoundaryWeight::odd_columns:
        case BoundaryWeight::odd_rows: {
            const bool oc = spec.variant == BoundaryWeight::odd_columns;
            switch (req.block) {
                case Block::k11: {
                    if (oc) {
                        // v^2 (z-w)(z-a)(w-a) / ((z^2-v^2)(w^2-v^2)(zw-v^2)) / t
                        mul_zw_inverse(biv, v * v);
                        mul_univariate(biv, geometric_series(v * v, -2, -2, 1.0, w / 2), true);
                        mul_univariate(biv, geometric_series(v * v, -2, -2, 1.0, w / 2), false);
                        mul_univariate(biv, monomial_binomial(1.0, 1, -a, 0), true);
                        mul_univariate(biv, monomial_binomial(1.0, 1, -a, 0), false);
                    } else {
                        // v^2 (z-w) / ((zw-v^2)(z+b)(w+b)) / t
                        mul_zw_inverse(biv, v * v);
                        mul_univariate(biv, geometric_series(-a, -1, -1, 1.0, w), true);
                        mul_univariate(biv, geometric_series(-a, -1, -1, 1.0, w), false);
                    }
                    BivSeries t1 = biv, t2 = biv;
                    shift_biv(t1, 1, 0);
                    shift_biv(t2, 0, 1);
                    for (size_t i = 0; i < biv.c.size(); ++i)
                        biv.c[i] = v * v * (t1.c[i] - t2.c[i]) / req.t;
                    break;
                }
                case Block::k12:
                    mul_zw_minus(biv, v * v);
                    mul_z_minus_w_inverse(biv, z_outside);
                    if (oc) {
                        // (z-a) / ((z^2-v^2)(w-a))
                        mul_univariate(biv, monomial_binomial(1.0, 1, -a, 0), true);
                        mul_univariate(biv, geometric_series(v * v, -2, -2, 1.0, w / 2), true);
                        mul_univariate(biv, geometric_series(a, -1, -1, 1.0, w), false);
                    } else {
                        // (w+b) / ((w^2-v^2)(z+b))
                        mul_univariate(biv, monomial_binomial(1.0, 1, a, 0), false);
                        mul_univariate(biv, geometric_series(v * v, -2, -2, 1.0, w / 2), false);
                        mul_univariate(biv, geometric_series(-a, -1, -1, 1.0, w), true);
                    }
                    break;
                case Block::k22: {
                    if (oc) {
                        mul_zw_inverse(biv, v * v);
                        mul_univariate(biv, geometric_series(a, -1, -1, 1.0, w), true);
                        mul_univariate(biv, geometric_series(a, -1, -1, 1.0, w), false);
                    } else {
                        mul_zw_inverse(biv, v * v);
                        mul_univariate(biv, geometric_series(v * v, -2, -2, 1.0, w / 2), true);
                        mul_univariate(biv, geometric_series(v * v, -2, -2, 1.0, w / 2), false);
                        mul_univariate(biv, monomial_binomial(1.0, 1, a, 0), true);
                        mul_univariate(biv, monomial_binomial(1.0, 1, a, 0), false);
                    }
                    BivSeries t1 = biv, t2 = biv;
                    shift_biv(t1, 1, 0);
                    shift_biv(t2, 0, 1);
                    for (size_t i = 0; i < biv.c.size(); ++i)
                        biv.c[i] = v * v * (t1.c[i] - t2.c[i]) * req.t;
                    break;
                }
            }
            break;
        }
    }

    // F factors: F(i,z)^{s1} in z, F(i',w)^{s2} in w with the block signs
    auto apply_f = [&](int i, bool in_z, bool inverted) {
        for (int l = 1; l <= i; ++l)
            mul_univariate(biv,
                           h_series(spec.rho_plus[size_t(l - 1)], w, inverted, false),
                           in_z);
        std::vector<Specialization> plus(spec.rho_plus.begin(), spec.rho_plus.end());
        Specialization rp = Specialization::scaled(spec.v * spec.v,
                                                   Specialization::unite(plus));
        mul_univariate(biv, h_series(rp, w, !inverted, true), in_z);
        for (int l = std::max(i, 1); l <= spec.N; ++l)
            mul_univariate(biv,
                           h_series(spec.rho_minus[size_t(l - 1)], w, !inverted, true),
                           in_z);
    };
    int target_a = 0, target_b = 0;
    switch (req.block) {
        case Block::k11:
            apply_f(req.i, true, false);
            apply_f(req.ip, false, false);
            target_a = int((req.k.twice - 1) / 2);
            target_b = int((req.kp.twice - 1) / 2);
            break;
        case Block::k12:
            apply_f(req.i, true, false);
            apply_f(req.ip, false, true);
            target_a = int((req.k.twice - 1) / 2);
            target_b = int((-req.kp.twice - 1) / 2);
            break;
        case Block::k22:
            apply_f(req.i, true, true);
            apply_f(req.ip, false, true);
            target_a = int((-req.k.twice - 1) / 2);
            target_b = int((-req.kp.twice - 1) / 2);
            break;
    }
    return biv.get(target_a, target_b);
}

// ---------------------------------------------------------------------------
// pfaffian correlations
// ---------------------------------------------------------------------------

double rho_pfaffian(const ProcessSpec& spec,
                    const std::vector<std::pair<int, HalfInt>>& points,
                    std::optional<double> t, double tol) {
    if (points.empty()) return 1.0;
    if (points.size() > 8) throw config_error("rho_pfaffian: |U| <= 8");
    std::vector<std::pair<int, HalfInt>> pts = points;
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second.twice < b.second.twice;
    });
    const double tv = t.value_or(1.0);
    const int n = int(pts.size());
    std::vector<cplx> mat(size_t(2 * n) * size_t(2 * n), 0.0);
    auto put = [&](int r, int c, cplx val) {
        mat[size_t(r) * size_t(2 * n) + size_t(c)] = val;
        mat[size_t(c) * size_t(2 * n) + size_t(r)] = -val;
    };
    for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) {
            KernelRequest req;
            req.spec = spec;
            req.i = pts[size_t(a)].first;
            req.k = pts[size_t(a)].second;
            req.ip = pts[size_t(b)].first;
            req.kp = pts[size_t(b)].second;
            req.t = tv;
            if (a != b) {
                req.block = Block::k11;
                put(2 * a, 2 * b, kernel_entry(req, tol));
                req.block = Block::k22;
                put(2 * a + 1, 2 * b + 1, kernel_entry(req, tol));
            }
            req.block = Block::k12;
            put(2 * a, 2 * b + 1, kernel_entry(req, tol));
            if (a != b) {
                KernelRequest rq = req;
                std::swap(rq.i, rq.ip);
                std::swap(rq.k, rq.kp);
                put(2 * b, 2 * a + 1, kernel_entry(rq, tol));
            }
        }
    }
    cplx pf = pfaffian(2 * n, std::move(mat));
    if (std::abs(pf.imag()) > 1e-6 * std::max(1.0, std::abs(pf)))
        throw numeric_error("rho_pfaffian: nonreal pfaffian");
    return pf.real();
}

// ---------------------------------------------------------------------------
// n-point integrand and the 2n-fold integral
// ---------------------------------------------------------------------------

cplx phi_integrand(const std::vector<LogPoint>& zs, const std::vector<LogPoint>& ws,
                   double u, double v, double t, bool shifted, double tol) {
    const int n = int(zs.size());
    if (int(ws.size()) != n) throw config_error("phi_integrand: need equal lists");
    cplx phi = 1.0;
    for (int i = 0; i < n; ++i) phi *= ws[size_t(i)].pow(0.5) * zs[size_t(i)].pow(-0.5);
    const double quv = u * v, q2 = quv * quv, q4 = q2 * q2;
    if (u > 0.0) {
        QParams qp2(q2, tol);
        const cplx c2 = std::pow(qpoch(q2, qp2), 2.0);
        for (int i = 0; i < n; ++i) {
            cplx zi = zs[size_t(i)].value(), wi = ws[size_t(i)].value();
            phi *= c2 / mul_qpoch({u * zi, -u * wi, -v / zi, v / wi}, quv, tol);
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                phi *= theta_q(u * u * zs[size_t(i)].value() * ws[size_t(j)].value(), qp2);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                phi /= theta_q(ws[size_t(j)].value() / zs[size_t(i)].value(), qp2);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                phi /= theta_q(zs[size_t(j)].value() / ws[size_t(i)].value(), qp2);
                phi *= theta_q(zs[size_t(j)].value() / zs[size_t(i)].value(), qp2) *
                       theta_q(ws[size_t(j)].value() / ws[size_t(i)].value(), qp2);
                phi /= theta_q(u * u * zs[size_t(i)].value() * zs[size_t(j)].value(), qp2) *
                       theta_q(u * u * ws[size_t(i)].value() * ws[size_t(j)].value(), qp2);
            }
    } else {
        // u = 0 limits: theta_0(u^2 X) -> (1 - v^2/X), theta_0(x) -> (1-x),
        // the Pochhammer block -> (1+v/z)(1-v/w)
        for (int i = 0; i < n; ++i) {
            cplx zi = zs[size_t(i)].value(), wi = ws[size_t(i)].value();
            phi /= (1.0 + v / zi) * (1.0 - v / wi);
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                phi *= 1.0 - v * v / (zs[size_t(i)].value() * ws[size_t(j)].value());
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                phi /= 1.0 - ws[size_t(j)].value() / zs[size_t(i)].value();
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                phi /= 1.0 - zs[size_t(j)].value() / ws[size_t(i)].value();
                phi *= (1.0 - zs[size_t(j)].value() / zs[size_t(i)].value()) *
                       (1.0 - ws[size_t(j)].value() / ws[size_t(i)].value());
                phi /= (1.0 - v * v / (zs[size_t(i)].value() * zs[size_t(j)].value())) *
                       (1.0 - v * v / (ws[size_t(i)].value() * ws[size_t(j)].value()));
            }
    }
    if (shifted) {
        QParams qp4(q4, tol);
        cplx ratio = 1.0;
        for (int i = 0; i < n; ++i)
            ratio *= zs[size_t(i)].value() / ws[size_t(i)].value();
        phi *= theta3(std::pow(t * ratio, 2.0), qp4) / theta3(t * t, qp4);
    }
    return phi;
}

double rho_nfold(const ProcessSpec& spec,
                 const std::vector<std::pair<int, HalfInt>>& points,
                 double t, bool shifted, int m_nodes) {
    const int n = int(points.size());
    if (n < 1 || n > 2) throw config_error("rho_nfold: n <= 2 only");
    std::vector<std::pair<int, HalfInt>> pts = points;
    std::sort(pts.begin(), pts.end());
    auto [lo, hi] = radius_window(spec);
    // nested radii: hi > |z1| > |w1| > ... > |wn| > lo, log-uniform
    std::vector<double> radii(size_t(2 * n));
    for (int j = 0; j < 2 * n; ++j) {
        double frac = double(j + 1) / double(2 * n + 1);
        radii[size_t(j)] = std::exp(std::log(hi) + frac * (std::log(lo) - std::log(hi)));
    }
    const bool two = spec.u != 0.0;
    auto ffun = [&](int i, cplx z) {
        return two ? F_two(spec, i, z, 1e-13) : F_one(spec, i, z);
    };
    const int m = m_nodes;
    // per-variable factors: z_j^{-k_j} F(i_j, z_j) and w_j^{k_j} / F(i_j, w_j)
    std::vector<std::vector<LogPoint>> znodes(static_cast<size_t>(n));
    std::vector<std::vector<LogPoint>> wnodes(static_cast<size_t>(n));
    std::vector<std::vector<cplx>> zf(static_cast<size_t>(n));
    std::vector<std::vector<cplx>> wf(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double kv = 0.5 * double(pts[size_t(j)].second.twice);
        const double rz = radii[size_t(2 * j)], rw = radii[size_t(2 * j + 1)];
        for (int a = 0; a < m; ++a) {
            LogPoint z{std::log(rz), 2.0 * kPi * (a + 0.5) / m};
            LogPoint w{std::log(rw), 2.0 * kPi * (a + 0.5) / m};
            znodes[size_t(j)].push_back(z);
            wnodes[size_t(j)].push_back(w);
            zf[size_t(j)].push_back(z.pow(-kv) * ffun(pts[size_t(j)].first, z.value()));
            wf[size_t(j)].push_back(w.pow(kv) / ffun(pts[size_t(j)].first, w.value()));
        }
    }
    cplx acc = 0.0;
    if (n == 1) {
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                acc += zf[0][size_t(a)] * wf[0][size_t(b)] *
                       phi_integrand({znodes[0][size_t(a)]}, {wnodes[0][size_t(b)]},
                                     spec.u, spec.v, t, shifted);
            }
        acc /= double(m) * double(m);
    } else {
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                for (int c = 0; c < m; ++c)
                    for (int d = 0; d < m; ++d) {
                        acc += zf[0][size_t(a)] * wf[0][size_t(b)] * zf[1][size_t(c)] *
                               wf[1][size_t(d)] *
                               phi_integrand(
                                   {znodes[0][size_t(a)], znodes[1][size_t(c)]},
                                   {wnodes[0][size_t(b)], wnodes[1][size_t(d)]},
                                   spec.u, spec.v, t, shifted);
                    }
        acc /= std::pow(double(m), 4.0);
    }
    return acc.real();
}

// ---------------------------------------------------------------------------
// finite-size plane partition / overpartition kernels
// ---------------------------------------------------------------------------

cplx pp_kernel_entry(int n, double q, int i, HalfInt k, int ip, HalfInt kp,
                     Block block, double tol, QuadratureDiag* diag) {
    // radii slightly above 1; zeros accumulate in (0, q], poles from q^{-i-1} up
    const double lo = 1.0, hi = 1.0 / q;
    const double r0 = std::sqrt(lo * hi);
    const double delta = 0.009;
    const bool z_outside = (ip <= i);  // time-reversed chain flips the rule
    const double rz = z_outside ? r0 * (1.0 + delta) : r0 * (1.0 - delta);
    const double rw = z_outside ? r0 * (1.0 - delta) : r0 * (1.0 + delta);
    const double kv = 0.5 * double(k.twice), kpv = 0.5 * double(kp.twice);
    KappaParams params;  // v = 1, t = 1
    std::function<cplx(const LogPoint&)> fz, fw;
    switch (block) {
        case Block::k11:
            fz = [&](const LogPoint& z) { return z.pow(-kv) * F_pp(n, i, q, z.value()); };
            fw = [&](const LogPoint& w) { return w.pow(-kpv) * F_pp(n, ip, q, w.value()); };
            break;
        case Block::k12:
            fz = [&](const LogPoint& z) { return z.pow(-kv) * F_pp(n, i, q, z.value()); };
            fw = [&](const LogPoint& w) { return w.pow(kpv) / F_pp(n, ip, q, w.value()); };
            break;
        case Block::k22:
            fz = [&](const LogPoint& z) { return z.pow(kv) / F_pp(n, i, q, z.value()); };
            fw = [&](const LogPoint& w) { return w.pow(kpv) / F_pp(n, ip, q, w.value()); };
            break;
    }
    auto coupled = [&](const LogPoint& z, const LogPoint& w) {
        return kappa(KappaVariant::plain, block, z, w, params);
    };
    return contour_double_integral(rz, rw, fz, fw, coupled, tol, 256, 32768, diag);
}

cplx ov_kernel_entry(double q, std::optional<long> ncap, double x, HalfInt tbar,
                     double xp, HalfInt tbarp, Block block, double tol,
                     QuadratureDiag* diag) {
    const double lo = 1.0, hi = 1.0 / q;
    const double r0 = std::sqrt(lo * hi);
    const double delta = 0.009;
    const bool z_outside = (x >= xp);
    const double rz = z_outside ? r0 * (1.0 + delta) : r0 * (1.0 - delta);
    const double rw = z_outside ? r0 * (1.0 - delta) : r0 * (1.0 + delta);
    const double kv = 0.5 * double(tbar.twice), kpv = 0.5 * double(tbarp.twice);
    KappaParams params;
    std::function<cplx(const LogPoint&)> fz, fw;
    switch (block) {
        case Block::k11:
            fz = [&](const LogPoint& z) { return z.pow(-kv) * F_ov(x, q, z.value(), ncap); };
            fw = [&](const LogPoint& w) { return w.pow(-kpv) * F_ov(xp, q, w.value(), ncap); };
            break;
        case Block::k12:
            fz = [&](const LogPoint& z) { return z.pow(-kv) * F_ov(x, q, z.value(), ncap); };
            fw = [&](const LogPoint& w) { return w.pow(kpv) / F_ov(xp, q, w.value(), ncap); };
            break;
        case Block::k22:
            fz = [&](const LogPoint& z) { return z.pow(kv) / F_ov(x, q, z.value(), ncap); };
            fw = [&](const LogPoint& w) { return w.pow(kpv) / F_ov(xp, q, w.value(), ncap); };
            break;
    }
    auto coupled = [&](const LogPoint& z, const LogPoint& w) {
        return kappa(KappaVariant::plain, block, z, w, params);
    };
    return contour_double_integral(rz, rw, fz, fw, coupled, tol, 256, 32768, diag);
}

} // namespace fbschur
