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

#ifndef FBSCHUR_SPECIALFN_HPP
#define FBSCHUR_SPECIALFN_HPP

#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include "fbschur/errors.hpp"

namespace fbschur {

using cplx = std::complex<double>;

/// q-parameters shared by the Pochhammer / theta evaluators.
struct QParams {
    double q   = 0.0;     // 0 <= q < 1
    double tol = 1e-14;   // truncation tolerance for infinite products/sums

    QParams() = default;
    QParams(double q_, double tol_ = 1e-14) : q(q_), tol(tol_) {
        if (!(q >= 0.0 && q < 1.0)) throw domain_error("QParams: need 0 <= q < 1");
        if (!(tol > 0.0)) throw domain_error("QParams: need tol > 0");
    }
};

/// q-Pochhammer symbol (x;q)_n.  n = nullopt means the infinite product,
/// truncated when |log factor| drops below tol.  Negative n uses
/// (x;q)_n = (x;q)_inf / (q^n x;q)_inf, i.e. 1 / prod_{j=1..-n} (1 - x q^{-j}).
cplx qpoch(cplx x, const QParams& qp, std::optional<long> n = std::nullopt);

/// Multiplicative theta function theta_q(x) = (x;q)_inf (q/x;q)_inf.
cplx theta_q(cplx x, const QParams& qp);

/// Additive (Jacobi) theta function theta_3(z;q) = sum_n q^{n^2/2} z^n.
cplx theta3(cplx z, const QParams& qp);

/// Dilogarithm Li_2(z) for z off the cut [1,inf): power series for |z| <= 1/2,
/// numerical quadrature of -int_0^z log(1-u)/u du along a straight path otherwise.
cplx dilog(cplx z);

/// Independent straight/bent-path quadrature of the integral representation,
/// used as an oracle against the primary dilog path.
cplx dilog_quadrature(cplx z, int panels = 64);

/// Symbolic description of a specialization rho of the algebra of symmetric
/// functions.  Only finitely many single/dual variable leaves; gamma = 0.
/// Leaf parameters may be negative internally (plethystic negation is needed
/// for the odd-column/odd-row boundary variants); nonnegativity is enforced
/// where the measure requires it, via nonnegative().
class Specialization {
public:
    struct Leaf {
        double x    = 0.0;
        bool   dual = false;  // false: H *= 1/(1-xt);  true: H *= (1+xt)
    };

    Specialization() = default;  // the zero specialization

    static Specialization zero() { return Specialization(); }
    static Specialization single(double x);
    static Specialization dual(double x);
    static Specialization unite(const std::vector<Specialization>& parts);
    static Specialization scaled(double s, const Specialization& inner);

    const std::vector<Leaf>& leaves() const { return leaves_; }
    bool is_zero() const { return leaves_.empty(); }
    bool nonnegative() const;

    /// max |x| over leaves (0 for the zero specialization)
    double max_leaf() const;
    /// radius of the disk where H(rho; .) is analytic and nonzero: min 1/|x|
    double radius() const;

    /// p_n(rho) = sum_leaves x^n (single) resp. (-1)^{n-1} x^n (dual), n >= 1
    double power_sum(long n) const;

    /// generating function H(rho;t) = prod 1/(1-x t) * prod (1+x t)
    cplx H(cplx t) const;

    /// Taylor coefficients h_0..h_deg of H(rho;t) around t=0
    std::vector<double> h_coeffs(int deg) const;

private:
    std::vector<Leaf> leaves_;
};

/// H(rho;rho') = exp(sum_n p_n(rho) p_n(rho')/n)  (Cauchy pairing)
double Hpair(const Specialization& rho, const Specialization& rhop,
             double tol = 1e-15);

/// Htilde(rho) = exp(sum_n p_{2n-1}/(2n-1) + p_n^2/(2n))  (Littlewood sum)
double Htilde(const Specialization& rho, double tol = 1e-15);

} // namespace fbschur

#endif
