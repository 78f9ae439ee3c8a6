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

#include "fbschur/specialfn.hpp"

using namespace fbschur;

TEST_CASE("qpoch finite products") {
    QParams qp(0.3);
    CHECK(std::abs(qpoch(0.5, qp, 0L) - 1.0) < 1e-15);
    // (1-0.5)(1-0.15) = 0.425
    CHECK(std::abs(qpoch(0.5, qp, 2L) - 0.425) < 1e-15);
}

TEST_CASE("qpoch infinite product vs 40-term explicit oracle") {
    QParams qp(0.4, 1e-14);
    cplx v = qpoch(0.2, qp);
    // oracle: explicit 40-term product
    double oracle = 1.0, qk = 1.0;
    for (int k = 0; k <= 40; ++k) {
        oracle *= 1.0 - 0.2 * qk;
        qk *= 0.4;
    }
    CHECK(std::abs(v - oracle) < 1e-12);
}

TEST_CASE("qpoch negative length and identities") {
    QParams qp(0.3);
    // (x;q)_{-m} (q^{-m} x;q)_m ... consistency: (x;q)_n = (x;q)_inf/(q^n x;q)_inf
    for (long n : {-3L, -1L, 2L, 5L}) {
        cplx lhs = qpoch(0.35, qp, n);
        cplx rhs = qpoch(0.35, qp) / qpoch(0.35 * std::pow(0.3, double(n)), qp);
        CHECK(std::abs(lhs - rhs) < 1e-13 * std::abs(rhs));
    }
    CHECK_THROWS_AS(qpoch(std::pow(0.3, 2), qp, -2L), domain_error);  // factor 1-x q^{-2} = 0
}

TEST_CASE("theta3 q=0 limit keeps only n=0") {
    QParams qp(0.0);
    CHECK(std::abs(theta3(2.0, qp) - 1.0) < 1e-15);
}

TEST_CASE("theta_q vanishes at x=q") {
    QParams qp(0.36);
    CHECK(std::abs(theta_q(0.36, qp)) < 1e-13);
}

TEST_CASE("Jacobi triple product: theta3 vs (q;q)inf theta_q(-z sqrt q)") {
    QParams qp(0.36, 1e-15);
    cplx lhs = theta3(0.7, qp);
    cplx rhs = qpoch(0.36, qp) * theta_q(-0.7 * std::sqrt(0.36), qp);
    CHECK(std::abs(lhs - rhs) < 1e-12);

    // 20-point random sample
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> qd(0.05, 0.6), zd(0.3, 1.8);
    for (int i = 0; i < 20; ++i) {
        QParams q2(qd(rng), 1e-15);
        cplx z(zd(rng), zd(rng) - 1.0);
        cplx a = theta3(z, q2);
        cplx b = qpoch(q2.q, q2) * theta_q(-z * std::sqrt(q2.q), q2);
        CHECK(std::abs(a - b) < 1e-11 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("theta_q quasi-periodicity") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> qd(0.05, 0.6), xd(0.4, 1.5);
    for (int i = 0; i < 20; ++i) {
        QParams qp(qd(rng), 1e-15);
        double x = xd(rng);
        cplx t = theta_q(x, qp);
        CHECK(std::abs(theta_q(qp.q * x, qp) + t / x) < 1e-11 * std::max(1.0, std::abs(t)));
        CHECK(std::abs(theta_q(1.0 / x, qp) + t / x) < 1e-11 * std::max(1.0, std::abs(t)));
    }
}

TEST_CASE("dilog basics and oracles") {
    CHECK(std::abs(dilog(0.0)) < 1e-15);
    // series oracle at z = 0.5
    cplx series = 0.0;
    for (int n = 1; n <= 60; ++n) series += std::pow(0.5, n) / double(n * n);
    CHECK(std::abs(dilog(0.5) - series) < 1e-13);
    // independent quadrature oracle at z = -1 (exact value -pi^2/12)
    CHECK(std::abs(dilog(-1.0) - dilog_quadrature(-1.0)) < 1e-10);
    CHECK(std::abs(dilog(-1.0) - cplx(-M_PI * M_PI / 12.0)) < 1e-12);
    CHECK_THROWS_AS(dilog(1.5), domain_error);
}

TEST_CASE("dilog derivative by central differences") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> xd(-0.8, 0.8), yd(0.1, 0.9);
    for (int i = 0; i < 10; ++i) {
        cplx z(xd(rng), yd(rng));
        double h = 1e-6;
        cplx d = (dilog(z * (1.0 + h)) - dilog(z * (1.0 - h))) / (2.0 * h);
        CHECK(std::abs(d + std::log(1.0 - z)) < 1e-8);
    }
}

TEST_CASE("H generating functions") {
    CHECK(std::abs(Specialization::zero().H(3.7) - 1.0) < 1e-15);
    CHECK(std::abs(Specialization::single(0.3).H(0.5) - 1.0 / 0.85) < 1e-15);
    CHECK(std::abs(Specialization::dual(0.3).H(0.5) - 1.15) < 1e-15);
    auto u = Specialization::unite(
        {Specialization::single(0.2), Specialization::dual(0.4)});
    CHECK(std::abs(u.H(0.5) - (1.2 / 0.9)) < 1e-14);
    auto s = Specialization::scaled(0.5, Specialization::single(0.3));
    CHECK(std::abs(s.H(1.0) - Specialization::single(0.3).H(0.5)) < 1e-15);
}

TEST_CASE("Htilde of a single variable is geometric") {
    // sum over lambda of s_lambda(x) = sum_m x^m (one-row support)
    double x = 0.2;
    double oracle = (1.0 - std::pow(x, 31)) / (1.0 - x);
    CHECK(std::abs(Htilde(Specialization::single(x)) - oracle) < 1e-12);
}

TEST_CASE("union identities for H-type sums") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> xd(0.05, 0.45);
    for (int i = 0; i < 10; ++i) {
        auto a = Specialization::unite(
            {Specialization::single(xd(rng)), Specialization::dual(xd(rng))});
        auto b = Specialization::single(xd(rng));
        auto ab = Specialization::unite({a, b});
        cplx t(0.4, 0.2);
        CHECK(std::abs(ab.H(t) - a.H(t) * b.H(t)) < 1e-13);
        double lhs = Htilde(ab);
        double rhs = Htilde(a) * Htilde(b) * Hpair(a, b);
        CHECK(std::abs(lhs - rhs) < 1e-11 * std::abs(lhs));
    }
}

TEST_CASE("h-coefficient extraction matches H Taylor expansion") {
    auto rho = Specialization::unite(
        {Specialization::single(0.3), Specialization::dual(0.25),
         Specialization::single(0.1)});
    auto h = rho.h_coeffs(12);
    // series at small t by direct evaluation
    double t = 0.05;
    cplx byseries = 0.0;
    for (int n = 0; n <= 12; ++n) byseries += h[size_t(n)] * std::pow(t, n);
    CHECK(std::abs(byseries - rho.H(t)) < 1e-14);
}
