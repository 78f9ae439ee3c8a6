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

#ifndef FBSCHUR_PFAFFIAN_HPP
#define FBSCHUR_PFAFFIAN_HPP

#include <array>
#include <functional>
#include <vector>

#include "fbschur/errors.hpp"
#include "fbschur/specialfn.hpp"

namespace fbschur {

/// 2x2 complex block, row-major
using Mat2 = std::array<std::array<cplx, 2>, 2>;

/// Dense skew-symmetric matrix; entries are symmetrized on ingest and the
/// deviation |A + A^T| must stay below a relative 1e-12.
class SkewMatrix {
public:
    SkewMatrix(int n, std::vector<cplx> entries);
    int dim() const { return n_; }
    cplx at(int i, int j) const { return a_[size_t(i) * n_ + j]; }
    cplx& at(int i, int j) { return a_[size_t(i) * n_ + j]; }

private:
    int n_;
    std::vector<cplx> a_;
};

/// pfaffian via skew-symmetric (Parlett-Reid type) elimination with partial
/// pivoting; pivots below 1e-13 * scale declare a structural zero.
cplx pfaffian(SkewMatrix a);

/// convenience: pfaffian of a raw row-major skew array
cplx pfaffian(int n, std::vector<cplx> entries);

/// One point of a discretized Fredholm domain: an optional component index
/// (multi-interval domains), a coordinate, and a quadrature weight
/// (1 for counting measure).
struct FredholmPoint {
    int comp = 0;
    double x = 0.0;
    double weight = 1.0;
};

/// Antisymmetric 2x2-block kernel on the discretized set.
using BlockKernel = std::function<Mat2(const FredholmPoint&, const FredholmPoint&)>;

struct FredholmSpec {
    BlockKernel kernel;
    std::vector<FredholmPoint> points;
    int series_cap = 64;  // max expansion order admitted by the Hadamard bound
};

struct FredholmResult {
    double value = 0.0;
    double tail_bound = 0.0;  // certified bound on the dropped series tail
};

/// pf(J - K) over the discretized domain: the ordinary pfaffian of the
/// weighted 2M x 2M matrix, equal to the alternating series
/// sum_n (-1)^n/n! sum pf[K(x_i,x_j)].  The Hadamard bound on the terms
/// beyond series_cap is reported; if it is not finite the call refuses.
FredholmResult fredholm_pfaffian(const FredholmSpec& fs, double tol = 1e-10);

/// Same series evaluated by explicit inclusion-exclusion over subsets;
/// an independent oracle, only usable for very small point sets.
double fredholm_pfaffian_inclusion_exclusion(const FredholmSpec& fs);

/// Half-line (s,inf) in Z' for one component: points s+1/2, s+3/2, ...,
/// truncated at s+L where the fitted exponential envelopes of Lemma-type
/// decay certify a tail below tol.  Throws if the fit fails (growth of the
/// 2,2 block not dominated by the decay of the 1,1 block).
std::vector<FredholmPoint> halfline_points(const BlockKernel& kernel, int comp,
                                           double s, double tol,
                                           int max_len = 400);

/// Continuum half-line (s, s+L) with composite Gauss-Legendre panels.
std::vector<FredholmPoint> continuum_points(int comp, double s, double len,
                                            int points_per_unit = 8);

/// Conjugated kernel Ktilde = diag(e^f, e^-f) K diag(e^f, e^-f); leaves every
/// finite-set pfaffian unchanged.
BlockKernel conjugate_kernel(const BlockKernel& kernel,
                             const std::function<double(const FredholmPoint&)>& f);

} // namespace fbschur

#endif
