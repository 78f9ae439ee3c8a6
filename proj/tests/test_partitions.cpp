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
#include <set>

#include "fbschur/partitions.hpp"

using namespace fbschur;

namespace {

Partition random_partition(std::mt19937_64& rng, int max_size) {
    std::uniform_int_distribution<int> sd(0, max_size);
    int remaining = sd(rng);
    std::vector<int> parts;
    int cap = remaining;
    while (remaining > 0 && cap > 0) {
        std::uniform_int_distribution<int> pd(1, cap);
        int p = std::min(pd(rng), remaining);
        parts.push_back(p);
        remaining -= p;
        cap = p;
    }
    return Partition(std::move(parts));
}

// brute-force SSYT count for s_lambda(1,1,...,1) with n variables
long ssyt_count(const Partition& lam, int n, std::vector<std::vector<int>>& tab,
                int row, int col) {
    if (row == lam.length()) return 1;
    if (col == lam.part(row + 1)) return ssyt_count(lam, n, tab, row + 1, 0);
    long total = 0;
    int lo = 1;
    if (col > 0) lo = std::max(lo, tab[size_t(row)][size_t(col - 1)]);
    if (row > 0 && col < lam.part(row)) lo = std::max(lo, tab[size_t(row - 1)][size_t(col)] + 1);
    for (int v = lo; v <= n; ++v) {
        tab[size_t(row)][size_t(col)] = v;
        total += ssyt_count(lam, n, tab, row, col + 1);
    }
    return total;
}

long schur_at_ones(const Partition& lam, int n) {
    std::vector<std::vector<int>> tab(size_t(lam.length()));
    for (int i = 0; i < lam.length(); ++i) tab[size_t(i)].assign(size_t(lam.part(i + 1)), 0);
    return ssyt_count(lam, n, tab, 0, 0);
}

} // namespace

TEST_CASE("charge and energy of Maya diagrams") {
    auto ce0 = charge_energy(maya(Partition{}, 0));
    CHECK(ce0.charge == 0);
    CHECK(ce0.energy_twice == 0);
    auto ce1 = charge_energy(maya(Partition{2, 1}, 0));
    CHECK(ce1.charge == 0);
    CHECK(ce1.energy() == doctest::Approx(3.0));
    auto ce2 = charge_energy(maya(Partition{2, 1}, 1));
    CHECK(ce2.charge == 1);
    CHECK(ce2.energy() == doctest::Approx(3.5));
}

TEST_CASE("maya of (3,1) at charge 0") {
    auto s = maya(Partition{3, 1}, 0);
    REQUIRE(s.plus.size() == 1);
    CHECK(s.plus[0].twice == 5);
    REQUIRE(s.minus.size() == 1);
    CHECK(s.minus[0].twice == -3);
}

TEST_CASE("maya round-trip on random partitions and charges") {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> cd(-3, 3);
    for (int i = 0; i < 100; ++i) {
        Partition lam = random_partition(rng, 20);
        int c = cd(rng);
        auto s = maya(lam, c);
        auto [lam2, c2] = inverse_maya(s);
        CHECK(lam2 == lam);
        CHECK(c2 == c);
        auto ce = charge_energy(s);
        CHECK(ce.charge == c);
        CHECK(ce.energy_twice == 2 * lam.size() + std::int64_t(c) * c);
    }
}

TEST_CASE("maya membership matches the explicit set") {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 40; ++i) {
        Partition lam = random_partition(rng, 12);
        int c = int(rng() % 5) - 2;
        auto s = maya(lam, c);
        std::set<std::int64_t> elems;
        for (auto& k : s.plus) elems.insert(k.twice);
        std::set<std::int64_t> holes;
        for (auto& k : s.minus) holes.insert(k.twice);
        for (std::int64_t t = -41; t <= 41; t += 2) {
            bool expected = (t > 0) ? elems.count(t) > 0 : holes.count(t) == 0;
            CHECK(maya_contains(lam, c, HalfInt(t)) == expected);
        }
    }
}

TEST_CASE("interlacing predicates") {
    CHECK(interlace_h(Partition{2, 2}, Partition{2, 1}));
    CHECK(interlace_v(Partition{2, 2}, Partition{2, 1}));
    CHECK(interlace_h(Partition{3}, Partition{1}));
    CHECK_FALSE(interlace_v(Partition{3}, Partition{1}));
    Partition lam{4, 2, 1};
    CHECK(interlace_h(lam, lam));
    CHECK(interlace_v(lam, lam));
}

TEST_CASE("skew Schur basics") {
    auto rho = Specialization::unite(
        {Specialization::single(0.3), Specialization::dual(0.2)});
    Partition lam{3, 2, 1};
    CHECK(skew_schur(lam, lam, rho) == doctest::Approx(1.0));
    // single variable: x^{gap} gated by the horizontal strip
    CHECK(skew_schur(Partition{2, 1}, Partition{1}, Specialization::single(0.5)) ==
          doctest::Approx(0.25));
    // (2,1)/(1) is not a vertical strip over (1)? lambda-mu = (1,1): it is
    CHECK(skew_schur(Partition{2, 1}, Partition{1}, Specialization::dual(0.5)) ==
          doctest::Approx(0.25));
    CHECK(skew_schur(Partition{3}, Partition{1}, Specialization::dual(0.5)) == 0.0);
}

TEST_CASE("s_{(2,1)} at two unit variables counts SSYT") {
    auto rho = Specialization::unite(
        {Specialization::single(1.0), Specialization::single(1.0)});
    CHECK(skew_schur(Partition{2, 1}, Partition{}, rho) == doctest::Approx(2.0));
    // brute-force tableau oracle on more shapes with 3 variables
    auto rho3 = Specialization::unite({Specialization::single(1.0),
                                       Specialization::single(1.0),
                                       Specialization::single(1.0)});
    for (const Partition& lam :
         {Partition{2, 1}, Partition{3, 1}, Partition{2, 2}, Partition{3, 2, 1}}) {
        CHECK(skew_schur(lam, Partition{}, rho3) ==
              doctest::Approx(double(schur_at_ones(lam, 3))));
    }
}

TEST_CASE("branching rule for skew Schur over unions") {
    std::mt19937_64 rng(7);
    auto a = Specialization::unite(
        {Specialization::single(0.31), Specialization::dual(0.17)});
    auto b = Specialization::single(0.23);
    auto ab = Specialization::unite({a, b});
    auto smalls = enumerate_partitions(8);
    for (int trial = 0; trial < 30; ++trial) {
        Partition lam = random_partition(rng, 8);
        Partition mu = random_partition(rng, 4);
        double lhs = skew_schur(lam, mu, ab);
        double rhs = 0.0;
        for (const Partition& nu : smalls)
            rhs += skew_schur(lam, nu, a) * skew_schur(nu, mu, b);
        CHECK(std::abs(lhs - rhs) < 1e-11 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("conjugation duality") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        Partition lam = random_partition(rng, 10);
        Partition mu = random_partition(rng, 6);
        double a = skew_schur(lam, mu, Specialization::dual(0.4));
        double b = skew_schur(lam.conjugate(), mu.conjugate(), Specialization::single(0.4));
        CHECK(a == b);
    }
}

TEST_CASE("partition enumeration counts and order") {
    CHECK(enumerate_partitions(0).size() == 1);
    CHECK(enumerate_partitions(4).size() == 12);  // p(0..4) = 1,1,2,3,5
    auto lst = enumerate_partitions(5, 2);
    std::vector<Partition> expect = {
        Partition{},     Partition{1},    Partition{2},    Partition{1, 1},
        Partition{3},    Partition{2, 1}, Partition{4},    Partition{3, 1},
        Partition{2, 2}, Partition{5},    Partition{4, 1}, Partition{3, 2}};
    REQUIRE(lst.size() == expect.size());
    for (size_t i = 0; i < lst.size(); ++i) CHECK(lst[i] == expect[i]);
    CHECK_THROWS_AS(enumerate_partitions(61), config_error);
}

TEST_CASE("strip enumerators agree with predicate scans") {
    std::mt19937_64 rng(17);
    auto all = enumerate_partitions(12);
    for (int trial = 0; trial < 20; ++trial) {
        Partition mu = random_partition(rng, 6);
        long budget = 12 - mu.size();
        std::set<std::vector<int>> above_h, above_v;
        for_h_strips_above(mu, budget, [&](const Partition& lam, long) {
            CHECK(interlace_h(lam, mu));
            above_h.insert(lam.parts());
        });
        for_v_strips_above(mu, budget, [&](const Partition& lam, long) {
            CHECK(interlace_v(lam, mu));
            above_v.insert(lam.parts());
        });
        size_t nh = 0, nv = 0;
        for (const Partition& lam : all) {
            if (lam.size() > mu.size() + budget) continue;
            if (interlace_h(lam, mu)) { CHECK(above_h.count(lam.parts())); ++nh; }
            if (interlace_v(lam, mu)) { CHECK(above_v.count(lam.parts())); ++nv; }
        }
        CHECK(nh == above_h.size());
        CHECK(nv == above_v.size());
        std::set<std::vector<int>> below_h, below_v;
        for_h_strips_below(mu, [&](const Partition& nu) { below_h.insert(nu.parts()); });
        for_v_strips_below(mu, [&](const Partition& nu) { below_v.insert(nu.parts()); });
        for (const Partition& nu : all) {
            if (interlace_h(mu, nu)) CHECK(below_h.count(nu.parts()));
            if (interlace_v(mu, nu)) CHECK(below_v.count(nu.parts()));
        }
    }
}

TEST_CASE("odd rows and columns") {
    Partition lam{4, 3, 3, 1};
    CHECK(lam.odd_rows() == 3);
    // conjugate of (4,3,3,1) is (4,3,3,1)': columns 4,3,3,1 -> odd columns = 2
    CHECK(lam.odd_columns() == lam.conjugate().odd_rows());
}
