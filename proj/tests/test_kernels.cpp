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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fbschur/kernels.hpp"
#include "fbschur/pfaffian.hpp"

using namespace fbschur;

namespace {

ProcessSpec one_boundary(int n, double v, std::vector<Specialization> plus) {
    ProcessSpec s;
    s.N = n;
    s.u = 0.0;
    s.v = v;
    s.rho_plus = std::move(plus);
    s.rho_minus.assign(size_t(n), Specialization::zero());
    return s;
}

} // namespace

TEST_CASE("F prefactors: trivial and closed-form cases") {
    CHECK(std::abs(F_H({0.0, 0.0}, 1, cplx(1.7)) - 1.0) < 1e-15);
    // F_H(i=1, z) with x = (0.3, 0.2)
    cplx z(1.9, 0.4);
    cplx expect = (1.0 - 0.3 / z) * (1.0 - 0.2 / z) / (1.0 - 0.3 * z);
    CHECK(std::abs(F_H({0.3, 0.2}, 1, z) - expect) < 1e-14);

    // F_pp(N=3, i=1, q=0.5, z=2) = (q/z;q)_3 / (q^2 z;q)_2 by direct product
    double q = 0.5;
    cplx z2 = 2.0;
    cplx direct = (1.0 - q / z2) * (1.0 - q * q / z2) * (1.0 - q * q * q / z2) /
                  ((1.0 - q * q * z2) * (1.0 - q * q * q * z2));
    CHECK(std::abs(F_pp(3, 1, q, z2) - direct) < 1e-14);
}

TEST_CASE("F_one matches F_H for the H-ascending process at v=1") {
    std::vector<double> x = {0.3, 0.2};
    ProcessSpec spec = one_boundary(2, 1.0,
                                    {Specialization::single(0.3), Specialization::single(0.2)});
    for (int i = 1; i <= 2; ++i) {
        cplx z(1.6, 0.7);
        CHECK(std::abs(F_one(spec, i, z) - F_H(x, i, z)) < 1e-13);
    }
}

TEST_CASE("F_HV matches its defining product") {
    std::vector<double> x = {0.3, 0.25, 0.2, 0.15};
    cplx z(1.4, 0.2);
    for (int i = 1; i <= 4; ++i) {
        cplx f = 1.0;
        for (int k = 1; k <= i / 2; ++k) f *= 1.0 + x[size_t(2 * k - 1)] * z;
        for (int k = 1; k <= (i + 1) / 2; ++k) f /= 1.0 - x[size_t(2 * k - 2)] * z;
        for (int k = 1; k <= 2; ++k)
            f *= (1.0 - x[size_t(2 * k - 2)] / z) / (1.0 + x[size_t(2 * k - 1)] / z);
        CHECK(std::abs(F_HV(x, i, z) - f) < 1e-13);
    }
}

TEST_CASE("kappa antisymmetry of the diagonal blocks") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> rd(1.1, 2.5);
    KappaParams p;  // v = 1, t = 1
    for (int trial = 0; trial < 10; ++trial) {
        cplx z(rd(rng), 0.3), w(rd(rng), -0.2);
        for (auto var : {KappaVariant::plain, KappaVariant::odd_columns,
                         KappaVariant::odd_rows}) {
            KappaParams pv = p;
            pv.param = 0.6;
            cplx a = kappa(var, Block::k11, z, w, pv);
            cplx b = kappa(var, Block::k11, w, z, pv);
            CHECK(std::abs(a + b) < 1e-13 * std::max(1.0, std::abs(a)));
            cplx c = kappa(var, Block::k22, z, w, pv);
            cplx d = kappa(var, Block::k22, w, z, pv);
            CHECK(std::abs(c + d) < 1e-13 * std::max(1.0, std::abs(c)));
        }
    }
}

TEST_CASE("variant kappas reduce to plain at alpha = beta = 1 (v = 1)") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> rd(1.1, 2.4);
    for (int trial = 0; trial < 10; ++trial) {
        cplx z(rd(rng), 0.15), w(rd(rng), -0.35);
        KappaParams p;
        p.param = 1.0;  // alpha = beta = 1 at v = 1
        for (auto block : {Block::k11, Block::k12, Block::k22}) {
            cplx plain = kappa(KappaVariant::plain, block, z, w, p);
            cplx oc = kappa(KappaVariant::odd_columns, block, z, w, p);
            cplx orr = kappa(KappaVariant::odd_rows, block, z, w, p);
            CHECK(std::abs(oc - plain) < 1e-14 * std::max(1.0, std::abs(plain)));
            CHECK(std::abs(orr - plain) < 1e-14 * std::max(1.0, std::abs(plain)));
        }
    }
}

TEST_CASE("two-boundary kappa at u=0, v=1 equals the one-boundary kappa") {
    std::mt19937_64 rng(35);
    std::uniform_real_distribution<double> rd(1.05, 2.2);
    for (int trial = 0; trial < 10; ++trial) {
        cplx z(rd(rng), 0.1), w(rd(rng), -0.1);
        KappaParams one;          // v=1, t arbitrary
        one.t = 1.7;
        KappaParams two = one;
        two.u = 0.0;
        for (auto block : {Block::k11, Block::k12, Block::k22}) {
            cplx a = kappa(KappaVariant::two_boundary, block, z, w, two);
            cplx b = kappa(KappaVariant::plain, block, z, w, one);
            CHECK(std::abs(a - b) < 1e-12 * std::max(1.0, std::abs(b)));
        }
    }
    // and the u -> 0 continuity of the theta form itself
    KappaParams tiny;
    tiny.u = 1e-7;
    tiny.v = 1.0;
    tiny.t = 1.7;
    cplx z(1.4, 0.1), w(1.2, -0.1);
    cplx a = kappa(KappaVariant::two_boundary, Block::k12, z, w, tiny);
    KappaParams zero = tiny;
    zero.u = 0.0;
    cplx b = kappa(KappaVariant::two_boundary, Block::k12, z, w, zero);
    CHECK(std::abs(a - b) < 1e-5 * std::abs(b));
}

TEST_CASE("two-boundary kappa matches the raw bracket rows over the norm") {
    KappaParams p;
    p.u = 0.3;
    p.v = 0.3;
    p.t = 1.1;
    double norm = two_boundary_norm(0.3, 0.3, 1.1);
    cplx z(1.5, 0.2), w(1.1, -0.3);
    for (auto [blk, row] : std::vector<std::pair<Block, PropRow>>{
             {Block::k11, PropRow::psi_psi},
             {Block::k12, PropRow::psi_psistar},
             {Block::k22, PropRow::psistar_psistar}}) {
        cplx lhs = kappa(KappaVariant::two_boundary, blk, z, w, p) * norm;
        cplx rhs = propagator_row(KappaVariant::two_boundary, row, z, w, p);
        CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("degenerate request reproduces the delta measure membership") {
    // all-zero specializations, u=0, v=1: the chain is pinned to the empty
    // partition and rho({(1, m-1/2)}) = 1 exactly when m <= 0
    ProcessSpec spec = one_boundary(1, 1.0, {Specialization::zero()});
    for (int m = -2; m <= 2; ++m) {
        KernelRequest req;
        req.spec = spec;
        req.i = req.ip = 1;
        req.k = req.kp = HalfInt(2 * m - 1);
        req.block = Block::k12;
        cplx val = kernel_entry(req, 1e-10);
        double expect = (m <= 0) ? 1.0 : 0.0;
        CHECK(std::abs(val - expect) < 1e-9);
        double bf = correlation_bruteforce(spec, {{1, HalfInt(2 * m - 1)}}, 12);
        CHECK(std::abs(val.real() - bf) < 1e-8);
    }
}

TEST_CASE("kernel entries are independent of the admissible radii") {
    ProcessSpec spec = one_boundary(2, 0.5,
                                    {Specialization::single(0.3), Specialization::single(0.25)});
    KernelRequest req;
    req.spec = spec;
    req.i = 1;
    req.ip = 2;
    req.k = HalfInt(3);
    req.kp = HalfInt(-1);
    for (auto block : {Block::k11, Block::k12, Block::k22}) {
        req.block = block;
        auto [lo, hi] = radius_window(spec);
        double r1 = std::exp(0.65 * std::log(lo) + 0.35 * std::log(hi));
        double r2 = std::exp(0.25 * std::log(lo) + 0.75 * std::log(hi));
        cplx a = kernel_entry_at_radii(req, r2, r1, 1e-11);
        double r3 = std::exp(0.5 * std::log(lo) + 0.5 * std::log(hi));
        double r4 = std::exp(0.8 * std::log(lo) + 0.2 * std::log(hi));
        cplx b = kernel_entry_at_radii(req, r3, r4, 1e-11);
        CHECK(std::abs(a - b) < 1e-9 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("oracle triangle: contour quadrature vs series coefficients") {
    std::mt19937_64 rng(57);
    std::uniform_real_distribution<double> xd(0.1, 0.4), vd(0.3, 0.9);
    std::uniform_int_distribution<int> kd(-5, 5), id(1, 2), bd(0, 2);
    for (int trial = 0; trial < 20; ++trial) {
        ProcessSpec spec;
        spec.N = 2;
        spec.u = 0.0;
        spec.v = vd(rng);
        spec.rho_plus = {Specialization::single(xd(rng)),
                         (trial % 2 == 0) ? Specialization::dual(xd(rng))
                                          : Specialization::single(xd(rng))};
        spec.rho_minus = {Specialization::zero(), Specialization::single(xd(rng) * 0.5)};
        KernelRequest req;
        req.spec = spec;
        req.i = id(rng);
        req.ip = id(rng);
        req.k = HalfInt(2 * kd(rng) + 1);
        req.kp = HalfInt(2 * kd(rng) + 1);
        req.block = static_cast<Block>(bd(rng));
        cplx quad = kernel_entry(req, 1e-11);
        cplx ser = series_coefficient_oracle(req, 120);
        CHECK(std::abs(quad - ser) < 1e-8 * std::max(1.0, std::abs(ser)));
    }
}

TEST_CASE("oracle triangle with odd-column and odd-row variants") {
    std::mt19937_64 rng(59);
    std::uniform_int_distribution<int> kd(-4, 4), bd(0, 2);
    for (auto variant : {BoundaryWeight::odd_columns, BoundaryWeight::odd_rows}) {
        for (int trial = 0; trial < 6; ++trial) {
            ProcessSpec spec = one_boundary(1, 0.8, {Specialization::single(0.35)});
            spec.variant = variant;
            spec.variant_param = 0.5;
            KernelRequest req;
            req.spec = spec;
            req.i = req.ip = 1;
            req.k = HalfInt(2 * kd(rng) + 1);
            req.kp = HalfInt(2 * kd(rng) + 1);
            req.block = static_cast<Block>(bd(rng));
            cplx quad = kernel_entry(req, 1e-11);
            cplx ser = series_coefficient_oracle(req, 120);
            CHECK(std::abs(quad - ser) < 1e-8 * std::max(1.0, std::abs(ser)));
        }
    }
}

TEST_CASE("single-point pfaffian correlation matches brute force") {
    ProcessSpec spec = one_boundary(1, 0.5, {Specialization::single(0.3)});
    for (int m : {-1, 0, 1, 2}) {
        HalfInt k(2 * m + 1);
        double pf = rho_pfaffian(spec, {{1, k}});
        double bf = correlation_bruteforce(spec, {{1, k}}, 32);
        CHECK(std::abs(pf - bf) < 1e-8);
    }
}

TEST_CASE("two-point pfaffian correlations match brute force (one boundary)") {
    ProcessSpec spec = one_boundary(2, 0.4,
                                    {Specialization::single(0.3), Specialization::dual(0.25)});
    spec.rho_minus[0] = Specialization::single(0.2);
    std::vector<std::vector<std::pair<int, HalfInt>>> cases = {
        {{1, HalfInt(1)}, {2, HalfInt(3)}},
        {{1, HalfInt(-1)}, {2, HalfInt(1)}},
        {{1, HalfInt(3)}, {1, HalfInt(1)}},
        {{2, HalfInt(-3)}, {1, HalfInt(-1)}},
    };
    for (const auto& u : cases) {
        double pf = rho_pfaffian(spec, u);
        double bf = correlation_bruteforce(spec, u, 26);
        CHECK(std::abs(pf - bf) < 1e-7);
    }
}

TEST_CASE("one-boundary correlations are independent of t") {
    ProcessSpec spec = one_boundary(1, 0.6, {Specialization::single(0.35)});
    std::vector<std::pair<int, HalfInt>> u = {{1, HalfInt(1)}, {1, HalfInt(-3)}};
    double a = rho_pfaffian(spec, u, 0.7);
    double b = rho_pfaffian(spec, u, 1.3);
    CHECK(std::abs(a - b) < 1e-10);
}

TEST_CASE("variant correlations match brute force") {
    for (auto variant : {BoundaryWeight::odd_columns, BoundaryWeight::odd_rows}) {
        ProcessSpec spec = one_boundary(1, 0.5, {Specialization::single(0.3)});
        spec.variant = variant;
        spec.variant_param = 0.5;
        for (int m : {0, 1}) {
            HalfInt k(2 * m + 1);
            double pf = rho_pfaffian(spec, {{1, k}});
            double bf = correlation_bruteforce(spec, {{1, k}}, 30);
            CHECK(std::abs(pf - bf) < 1e-7);
        }
    }
}

TEST_CASE("two-boundary shift-mixed correlations match brute force") {
    ProcessSpec spec;
    spec.N = 1;
    spec.u = 0.3;
    spec.v = 0.3;
    spec.rho_plus = {Specialization::single(0.3)};
    spec.rho_minus = {Specialization::zero()};
    for (double t : {0.7, 1.3}) {
        for (int m : {0, 1}) {
            HalfInt k(2 * m + 1);
            double pf = rho_pfaffian(spec, {{1, k}}, t);
            double bf = correlation_bruteforce_shifted(spec, {{1, k}}, t, 26);
            CHECK(std::abs(pf - bf) < 1e-6);
        }
    }
}

TEST_CASE("n-point integrand at n=1 equals kappa_12 (Schur pfaffian seed)") {
    // u=0, v=1: Phi_t(z; w) = kappa_{1,2}(z,w) for any t
    KappaParams p;
    LogPoint z = log_point(cplx(1.9, 0.4)), w = log_point(cplx(1.3, -0.2));
    cplx phi = phi_integrand({z}, {w}, 0.0, 1.0, 0.7, true);
    cplx k12 = kappa(KappaVariant::plain, Block::k12, z, w, p);
    CHECK(std::abs(phi - k12) < 1e-12 * std::abs(k12));
}

TEST_CASE("n=2 integrand equals the pfaffian of kappa blocks") {
    // Schur-pfaffian identity: Phi_t = pf of the 4x4 kappa matrix
    for (double u : {0.0, 0.25}) {
        const double v = (u == 0.0) ? 1.0 : 0.3, t = 1.2;
        KappaParams p;
        p.u = u;
        p.v = v;
        p.t = t;
        KappaVariant var = (u == 0.0) ? KappaVariant::plain : KappaVariant::two_boundary;
        LogPoint z1 = log_point(cplx(2.2, 0.3)), w1 = log_point(cplx(1.8, -0.1));
        LogPoint z2 = log_point(cplx(1.4, 0.2)), w2 = log_point(cplx(1.1, -0.4));
        cplx phi = phi_integrand({z1, z2}, {w1, w2}, u, v, t, true);
        std::vector<cplx> m(16, 0.0);
        auto put = [&](int r, int c, cplx val) {
            m[size_t(r) * 4 + size_t(c)] = val;
            m[size_t(c) * 4 + size_t(r)] = -val;
        };
        // rows: psi(z1), psi*(w1), psi(z2), psi*(w2)
        put(0, 1, kappa(var, Block::k12, z1, w1, p));
        put(0, 2, kappa(var, Block::k11, z1, z2, p));
        put(0, 3, kappa(var, Block::k12, z1, w2, p));
        put(1, 2, -kappa(var, Block::k12, z2, w1, p));
        put(1, 3, kappa(var, Block::k22, w1, w2, p));
        put(2, 3, kappa(var, Block::k12, z2, w2, p));
        cplx pf = pfaffian(4, std::move(m));
        CHECK(std::abs(phi - pf) < 1e-9 * std::max(1.0, std::abs(pf)));
    }
}

TEST_CASE("2n-fold integral cross-checks the pfaffian route") {
    ProcessSpec spec = one_boundary(1, 0.5, {Specialization::single(0.3)});
    std::vector<std::pair<int, HalfInt>> u1 = {{1, HalfInt(1)}};
    double a = rho_nfold(spec, u1, 1.0, true, 96);
    double b = rho_pfaffian(spec, u1);
    CHECK(std::abs(a - b) < 1e-8);

    std::vector<std::pair<int, HalfInt>> u2 = {{1, HalfInt(1)}, {1, HalfInt(-1)}};
    double c = rho_nfold(spec, u2, 1.0, true, 48);
    double d = rho_pfaffian(spec, u2);
    CHECK(std::abs(c - d) < 1e-6);
}
