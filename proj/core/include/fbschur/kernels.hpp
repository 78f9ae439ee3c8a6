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

#ifndef FBSCHUR_KERNELS_HPP
#define FBSCHUR_KERNELS_HPP

#include <functional>
#include <optional>
#include <vector>

#include "fbschur/process.hpp"

namespace fbschur {

/// A point on a circular contour, kept as log-radius and accumulated angle so
/// half-integer powers are single-valued by construction.
struct LogPoint {
    double logr = 0.0;
    double theta = 0.0;
    cplx value() const { return std::exp(cplx(logr, theta)); }
    /// z^p via exp(p (log r + i theta)); p may be any real (half-integers!)
    cplx pow(double p) const { return std::exp(p * cplx(logr, theta)); }
};
LogPoint log_point(cplx z);

enum class Block { k11, k12, k22 };
/// extra row orderings used by tests of the operator-ordered propagators
enum class PropRow { psi_psi, psi_psistar, psistar_psi, psistar_psistar };

enum class KappaVariant {
    plain,
    odd_columns,   // alpha^{oc} weighting
    odd_rows,      // beta^{or}
    even_columns,  // alpha = 0
    even_rows,     // beta = 0
    two_boundary   // theta-function form
};

struct KappaParams {
    double u = 0.0;
    double v = 1.0;
    double t = 1.0;
    double param = 1.0;  // alpha or beta of the odd variants
    double tol = 1e-14;
};

/// normalized propagator kernels kappa_{ab}(z,w); the one-boundary variants
/// carry t^{-1}, t^0, t^{+1} on blocks 11, 12, 22.  two_boundary at u = 0
/// reduces to plain with the same (v, t).
cplx kappa(KappaVariant var, Block block, cplx z, cplx w, const KappaParams& p);
cplx kappa(KappaVariant var, Block block, const LogPoint& z, const LogPoint& w,
           const KappaParams& p);

/// raw operator-ordered propagator rows (t = 1), for oracle tests
cplx propagator_row(KappaVariant var, PropRow row, cplx z, cplx w,
                    const KappaParams& p);

/// <u,t|v,t> = theta3(t^2;(uv)^4) / (uv;uv)_inf
double two_boundary_norm(double u, double v, double t);

// F-prefactors ------------------------------------------------------------

/// one free boundary (u = 0), general v
cplx F_one(const ProcessSpec& spec, int i, cplx z);
/// two free boundaries, the infinite product truncated at tol
cplx F_two(const ProcessSpec& spec, int i, cplx z, double tol = 1e-13);
/// H-ascending chain with variables x_1..x_N
cplx F_H(const std::vector<double>& x, int i, cplx z);
/// HV-ascending chain (N = 2M entries in x)
cplx F_HV(const std::vector<double>& x, int i, cplx z);
/// symmetric plane partitions: (q/z;q)_N / (q^{i+1} z;q)_{N-i}
cplx F_pp(int n, int i, double q, cplx z);
/// plane overpartitions at vertical coordinate x (finite N or the limit)
cplx F_ov(double x, double q, cplx z, std::optional<long> ncap);

// contour engine -----------------------------------------------------------

struct QuadratureDiag {
    int m_used = 0;
    double est_error = 0.0;
};

/// adaptive trapezoid double contour integral
/// (2 pi)^{-2} int int fz(z) fw(w) coupled(z, w) dtheta dtheta'
cplx contour_double_integral(double rz, double rw,
                             const std::function<cplx(const LogPoint&)>& fz,
                             const std::function<cplx(const LogPoint&)>& fw,
                             const std::function<cplx(const LogPoint&, const LogPoint&)>& coupled,
                             double tol, int m_start, int m_max,
                             QuadratureDiag* diag);

// kernel entries ------------------------------------------------------------

struct KernelRequest {
    ProcessSpec spec;
    int i = 1, ip = 1;      // abscissas
    HalfInt k{1}, kp{1};    // ordinates
    Block block = Block::k12;
    double t = 1.0;         // shift-mixing parameter
};

/// admissible radius window (lo, hi) for the request's contours
std::pair<double, double> radius_window(const ProcessSpec& spec);

/// trapezoid-rule double contour integral of the requested entry, radii at the
/// log-midpoint of the window with the nesting offset (z outside iff i <= i')
cplx kernel_entry(const KernelRequest& req, double tol = 1e-10,
                  QuadratureDiag* diag = nullptr);
/// same with explicit radii (contour-independence tests)
cplx kernel_entry_at_radii(const KernelRequest& req, double rz, double rw,
                           double tol = 1e-10, QuadratureDiag* diag = nullptr);

/// independent bivariate Laurent-series evaluation of the same coefficient
/// (one free boundary only); max_deg guards the expansion window
cplx series_coefficient_oracle(const KernelRequest& req, int max_deg = 200);

/// rho(U) (or the shift-mixed rho_t for u > 0) as the pfaffian of the
/// assembled 2n x 2n kernel matrix, points sorted by (i, k)
double rho_pfaffian(const ProcessSpec& spec,
                    const std::vector<std::pair<int, HalfInt>>& points,
                    std::optional<double> t = {}, double tol = 1e-10);

/// 2n-fold contour integral of the n-point function (n <= 2): the integrand
/// product F/F times Phi_t (shifted = true) or Phi (unshifted)
double rho_nfold(const ProcessSpec& spec,
                 const std::vector<std::pair<int, HalfInt>>& points,
                 double t, bool shifted, int m_nodes);

/// n-point integrand Phi_t (shifted) / Phi of the length-0 process
cplx phi_integrand(const std::vector<LogPoint>& zs, const std::vector<LogPoint>& ws,
                   double u, double v, double t, bool shifted, double tol = 1e-14);

/// finite-size symmetric plane partition kernel entries (time-reversed chain;
/// the z contour sits outside exactly when i' <= i)
cplx pp_kernel_entry(int n, double q, int i, HalfInt k, int ip, HalfInt kp,
                     Block block, double tol = 1e-9, QuadratureDiag* diag = nullptr);

/// finite-size plane overpartition kernel entries on the (t, x) lattice
/// (x, xp are the vertical coordinates, tbar ordinates already rounded)
cplx ov_kernel_entry(double q, std::optional<long> ncap, double x, HalfInt tbar,
                     double xp, HalfInt tbarp, Block block, double tol = 1e-9,
                     QuadratureDiag* diag = nullptr);

} // namespace fbschur

#endif
