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

#ifndef FBSCHUR_LPP_HPP
#define FBSCHUR_LPP_HPP

#include <vector>

#include "fbschur/pfaffian.hpp"
#include "fbschur/process.hpp"

namespace fbschur {

/// Joint distribution request P(L_{(1,1)->(r_l,t_l)} <= s_l for all l) for
/// endpoints on a down-right path: r ascending, t descending, r_l <= t_l.
struct LppRequest {
    std::vector<double> a;  // a_1..a_{t_1}
    double alpha = 1.0;
    std::vector<std::pair<int, int>> endpoints;  // (r_l, t_l)
    std::vector<long> thresholds;                // s_l

    void validate() const;
};

struct LppProb {
    double value = 0.0;
    double tail_bound = 0.0;
};

/// finite-size kernel block of the symmetric LPP pfaffian process,
/// x, y in Z' (doubled half-integer ordinates)
cplx lpp_kernel_block(const LppRequest& req, int a_idx, HalfInt x, int b_idx,
                      HalfInt y, int block /*0,1,2 -> 11,12,22*/, double tol = 1e-9);

/// gap probability pf(J-K)_B over B = prod (s_l, inf) cap Z', truncated with
/// the fitted exponential envelopes
LppProb lpp_multipoint_prob(const LppRequest& req, double tol = 1e-8);

/// independent oracle: exact enumeration of the (truncated) geometric matrix
/// entries for small grids; tail below tail_eps
double lpp_prob_by_enumeration(const LppRequest& req, double tail_eps = 1e-10);

// ---------------------------------------------------------------------------
// crossover kernel K^v and the interpolating distribution F_{u,v}
// ---------------------------------------------------------------------------

struct CrossoverParams {
    double q = 0.25;            // geometric parameter (enters through d_q)
    double v = 0.0;
    std::vector<double> us;     // u_1 > u_2 > ... >= 0 (unscaled)
    double c_q() const;         // (1-sqrt q) / (q^{1/6} (1+sqrt q)^{1/3})
    double d_q() const;         // q^{1/6} / (2 (1+sqrt q)^{2/3})
    int points_per_unit = 16;   // ray quadrature density
};

/// assembled 2x2 crossover block K^v(u_a, xi; u_b, xi') (d_q scaling applied)
Mat2 crossover_kernel(const CrossoverParams& p, int a_idx, double xi, int b_idx,
                      double xip);

/// individual ray-integral pieces at already-scaled arguments ua, ub;
/// anchors may be overridden to exercise Cauchy-theorem independence
struct RayAnchors {
    double a11 = 1.0;   // K11 ray anchor (movable by Cauchy's theorem)
    double az, aw;      // K12 anchors
    double b1, b2, b3, b4, c1;
    static RayAnchors defaults(double v);
};
cplx crossover_k11(double ua, double xi, double ub, double xip, double v,
                   const RayAnchors& anchors, int per_unit = 16);
cplx crossover_k12(double ua, double xi, double ub, double xip, double v,
                   const RayAnchors& anchors, int per_unit = 16);
cplx crossover_k22(double ua, double xi, double ub, double xip, double v,
                   const RayAnchors& anchors, int per_unit = 16);

/// F_{u,v}(s) = pf(J - K^v(u, xi; u, xi'))_{(s, inf)} over the continuum
/// half-line; u is the scaled argument (d_q u in the finite-size limit).
/// s >= -6 guard; returns the value and a truncation estimate.
LppProb F_uv(double u, double v, double s, double tol = 1e-6);

} // namespace fbschur

#endif
