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

#ifndef FBSCHUR_FOCK_HPP
#define FBSCHUR_FOCK_HPP

#include <string>
#include <unordered_map>
#include <vector>

#include "fbschur/partitions.hpp"
#include "fbschur/specialfn.hpp"

namespace fbschur {

/// Basis label |lambda, c> of the charge-c sector.
struct FockKey {
    Partition lam;
    int c = 0;
    bool operator==(const FockKey& o) const { return c == o.c && lam == o.lam; }
};

struct FockKeyHash {
    size_t operator()(const FockKey& k) const {
        return PartitionHash{}(k.lam) * 1000003u + size_t(k.c + 512);
    }
};

/// Energy-truncated vector of the fermionic Fock space.  Stores amplitudes on
/// keys with |lambda| + c^2/2 <= cutoff; anything produced beyond the cutoff
/// is dropped and flagged.
class FockVector {
public:
    explicit FockVector(int cutoff) : cutoff_twice_(2 * cutoff) {}

    static FockVector vacuum(int cutoff);
    static FockVector basis(const Partition& lam, int c, int cutoff);

    int cutoff() const { return cutoff_twice_ / 2; }
    std::int64_t cutoff_twice() const { return cutoff_twice_; }
    bool truncated() const { return truncated_; }
    double dropped_weight() const { return dropped_weight_; }

    static std::int64_t energy_twice(const Partition& lam, int c) {
        return 2 * lam.size() + std::int64_t(c) * c;
    }

    void add(const Partition& lam, int c, cplx amp);
    cplx coeff(const Partition& lam, int c) const;
    const std::unordered_map<FockKey, cplx, FockKeyHash>& amplitudes() const {
        return amps_;
    }

    double norm() const;
    /// drop amplitudes below rel_eps * max amplitude (recorded as truncation)
    void prune(double rel_eps);

    FockVector& operator+=(const FockVector& o);
    FockVector& operator*=(cplx s);

private:
    std::int64_t cutoff_twice_;
    std::unordered_map<FockKey, cplx, FockKeyHash> amps_;
    bool truncated_ = false;
    double dropped_weight_ = 0.0;
    friend FockVector apply_psi_modes(
        const std::vector<std::pair<HalfInt, cplx>>&, const FockVector&, bool);
};

/// A fermionic operator: creation/annihilation mode or a finite combination.
struct FermionOp {
    struct Term {
        bool star = false;  // false: psi_k, true: psi*_k
        HalfInt k;
        cplx coeff = 1.0;
    };
    std::vector<Term> terms;

    static FermionOp psi(HalfInt k) { return {{{false, k, 1.0}}}; }
    static FermionOp psi_star(HalfInt k) { return {{{true, k, 1.0}}}; }
    /// generating series psi(z) = sum_k psi_k z^k restricted to |k| <= cutoff+1/2
    static FermionOp psi_gen(cplx z, int cutoff);
    /// psi*(w) = sum_k psi*_k w^{-k} restricted likewise
    static FermionOp psi_star_gen(cplx w, int cutoff);
};

/// Exact action of the mode operators on the truncated space.
FockVector apply_fermion(const FermionOp& op, const FockVector& v);

enum class GammaSign { plus, minus };

/// Vertex operator Gamma_+(rho) (lowering) or Gamma_-(rho) (raising):
/// <lambda,c|Gamma_+(rho)|mu,c> = s_{mu/lambda}(rho); Gamma_- is the transpose.
/// Applied leaf by leaf (Gamma of a union is the product of the leaf Gammas).
FockVector apply_gamma(GammaSign sign, const Specialization& rho,
                       const FockVector& v);

/// |v> = sum_{|lam| <= D} v^|lam| |lam, 0>
FockVector boundary_state(double v, int cutoff);

/// |v,t> = sum over even charge of t^{c/2} v^{|lam|+c^2/2} |lam,c>
FockVector extended_state(double v, double t, int cutoff);

enum class BoundaryVariantKind { plain, even_columns, even_rows, odd_columns, odd_rows };

/// Extended variant boundary states; odd_columns carries alpha^{#odd columns},
/// odd_rows beta^{#odd rows}; even_* are the param = 0 degenerations.
FockVector variant_state(BoundaryVariantKind kind, double param, double v,
                         double t, int cutoff);

/// shift operator R^c acting on Maya diagrams: |lam, c0> -> |lam, c0 + c>
FockVector apply_shift(int c, const FockVector& v);

/// bilinear pairing sum_key left[key] * right[key]
cplx bracket(const FockVector& left, const FockVector& right);

/// Specification of a boundary state for propagator brackets.
struct StateSpec {
    BoundaryVariantKind kind = BoundaryVariantKind::plain;
    double v = 0.0;      // boundary weight (u for left states)
    double t = 1.0;      // shift-mixing parameter
    double param = 1.0;  // alpha / beta for the odd variants
};

struct GenInsertion {
    bool star = false;  // psi(z) or psi*(w)
    cplx point;
};

/// <left| ops |right> with the generating-function operators realized as
/// finite mode sums within the cutoff; checks the stated convergence regions.
cplx propagator_bracket(const StateSpec& left, const std::vector<GenInsertion>& ops,
                        const StateSpec& right, int cutoff);

enum class FockIdentity {
    anticommutation,      // {psi_k, psi*_l} = delta_{kl} on random vectors
    reflection,           // Gamma_+(rho)|v> = Htilde(v rho) Gamma_-(v^2 rho)|v>
    extended_shift,       // |v,t> = sum_c t^{c/2} v^{c^2/2} R^c |v>
    fermionic_reflection, // psi(z)|v,t> = t^-1 (v-z)/(v+z) psi*(v^2/z)|v,t>
    wick_one,             // <0|phi_1...phi_2n|v,t> = pf of pair brackets
    wick_two,             // <u,t|phi_1...phi_2n|v,t>/<u,t|v,t> = pf
    boson_fermion,        // psi_k modes from vertex operators, exact signs
    variant_decomposition // Gamma route = direct alpha^{oc} weights
};

struct IdentityParams {
    double u = 0.0, v = 0.4, t = 1.0;
    double param = 0.5;  // alpha or beta
    BoundaryVariantKind variant = BoundaryVariantKind::odd_columns;
    Specialization rho;
    std::vector<cplx> zs, ws;  // insertion points, used pairwise for Wick
    int kmax = 5;              // boson-fermion mode range
    Partition mu;
    int charge = 0;
    unsigned seed = 1;
};

struct IdentityReport {
    double max_residual = 0.0;
    bool truncated = false;
    std::string detail;
};

/// Evaluates both sides of the chosen identity on the truncated space,
/// comparing per-key output amplitudes of energy <= cutoff - margin
/// (scalar identities ignore the margin).
IdentityReport verify_identity(FockIdentity which, const IdentityParams& p,
                               int cutoff, int margin);

} // namespace fbschur

#endif
