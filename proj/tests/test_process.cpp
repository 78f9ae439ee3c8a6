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
#include <map>
#include <random>

#include "fbschur/process.hpp"
#include "fbschur/rng.hpp"

using namespace fbschur;

namespace {

ProcessSpec make_spec(int n, double u, double v,
                      std::vector<Specialization> plus,
                      std::vector<Specialization> minus) {
    ProcessSpec s;
    s.N = n;
    s.u = u;
    s.v = v;
    s.rho_plus = std::move(plus);
    s.rho_minus = std::move(minus);
    return s;
}

// direct chain enumeration, independent of the transfer-matrix summation
double z_by_enumeration(const ProcessSpec& spec, int cutoff) {
    auto parts = enumerate_partitions(cutoff);
    double z = 0.0;
    std::function<void(int, SeqConfig&, double)> rec = [&](int k, SeqConfig& cfg,
                                                           double acc) {
        if (k == spec.N) {
            z += acc;
            return;
        }
        for (const Partition& lam : parts) {
            if (!lam.contains(cfg.mus.back())) continue;
            double w1 = skew_schur(lam, cfg.mus.back(), spec.rho_plus[size_t(k)]);
            if (w1 == 0.0) continue;
            for (const Partition& mu : parts) {
                if (!lam.contains(mu)) continue;
                double w2 = skew_schur(lam, mu, spec.rho_minus[size_t(k)]);
                if (w2 == 0.0) continue;
                cfg.lambdas.push_back(lam);
                cfg.mus.push_back(mu);
                double vw = 1.0;
                if (k + 1 == spec.N) {
                    vw = std::pow(spec.v, double(mu.size()));
                    if (spec.variant == BoundaryWeight::odd_columns)
                        vw *= std::pow(spec.variant_param, double(mu.odd_columns()));
                    if (spec.variant == BoundaryWeight::odd_rows)
                        vw *= std::pow(spec.variant_param, double(mu.odd_rows()));
                }
                rec(k + 1, cfg, acc * w1 * w2 * vw);
                cfg.lambdas.pop_back();
                cfg.mus.pop_back();
            }
        }
    };
    for (const Partition& mu0 : parts) {
        if (spec.u == 0.0 && !mu0.empty()) continue;
        SeqConfig cfg;
        cfg.mus.push_back(mu0);
        rec(0, cfg, std::pow(spec.u, double(mu0.size())));
    }
    return z;
}

} // namespace

TEST_CASE("weight of the constant sequence is (uv)^size") {
    Partition lam{3, 1};
    ProcessSpec spec = make_spec(2, 0.3, 0.4,
                                 {Specialization::zero(), Specialization::zero()},
                                 {Specialization::zero(), Specialization::zero()});
    SeqConfig cfg;
    cfg.mus = {lam, lam, lam};
    cfg.lambdas = {lam, lam};
    CHECK(weight(spec, cfg) == doctest::Approx(std::pow(0.12, 4.0)));
}

TEST_CASE("weight of a one-step geometric chain") {
    // free top boundary (v = 1): weight of (empty, (m), (m)) is x^m
    ProcessSpec spec = make_spec(1, 0.0, 1.0, {Specialization::single(0.7)},
                                 {Specialization::zero()});
    for (int m = 0; m <= 4; ++m) {
        SeqConfig cfg;
        Partition lam = (m == 0) ? Partition{} : Partition{m};
        cfg.mus = {Partition{}, lam};
        cfg.lambdas = {lam};
        CHECK(weight(spec, cfg) == doctest::Approx(std::pow(0.7, m)));
    }
}

TEST_CASE("chain violation gives weight zero") {
    ProcessSpec spec = make_spec(1, 0.2, 0.2, {Specialization::single(0.5)},
                                 {Specialization::zero()});
    SeqConfig bad;
    bad.mus = {Partition{2}, Partition{1}};
    bad.lambdas = {Partition{1}};
    CHECK(weight(spec, bad) == 0.0);
}

TEST_CASE("plane partition slicing chain is H-ascending") {
    std::vector<Partition> chain = {Partition{},           Partition{6},
                                    Partition{7, 3},       Partition{9, 5, 2},
                                    Partition{9, 7, 3, 1}, Partition{10, 8, 6, 2, 1}};
    CHECK(validate_h_chain(chain));
}

TEST_CASE("overpartition figure chain is HV-ascending") {
    std::vector<Partition> chain = {
        Partition{},           Partition{1},          Partition{2},
        Partition{2, 2},       Partition{3, 3, 1},    Partition{5, 3, 1},
        Partition{5, 4, 1},    Partition{5, 4, 1, 1}, Partition{5, 4, 2, 1}};
    CHECK(validate_hv_chain(chain));
    CHECK_FALSE(validate_h_chain(chain));
}

TEST_CASE("N=0 partition function is the Euler product") {
    ProcessSpec spec = make_spec(0, 0.4, 0.4, {}, {});
    double z = partition_function_closed(spec);
    QParams q(0.16, 1e-15);
    double oracle = 1.0 / std::abs(qpoch(0.16, q));
    CHECK(std::abs(z - oracle) < 1e-12 * oracle);
}

TEST_CASE("u=v=0 reduces to the Cauchy product") {
    auto sp = Specialization::single(0.3);
    auto sm = Specialization::single(0.25);
    ProcessSpec spec = make_spec(1, 0.0, 0.0, {sp}, {sm});
    CHECK(partition_function_closed(spec) == doctest::Approx(Hpair(sp, sm)));
    auto bf = partition_function_bruteforce(spec, 30);
    CHECK(std::abs(bf.value - Hpair(sp, sm)) < 1e-11);
}

TEST_CASE("u=1, v=0 leaves only the Htilde(rho-) factor") {
    auto sm = Specialization::single(0.3);
    ProcessSpec spec = make_spec(1, 1.0, 0.0, {Specialization::zero()}, {sm});
    double z = partition_function_closed(spec);
    CHECK(z == doctest::Approx(Htilde(sm)));
}

TEST_CASE("closed form vs brute force vs direct enumeration") {
    ProcessSpec spec = make_spec(1, 0.0, 0.5, {Specialization::single(0.3)},
                                 {Specialization::zero()});
    double closed = partition_function_closed(spec);
    auto bf = partition_function_bruteforce(spec, 40);
    CHECK(std::abs(closed - bf.value) < 1e-10);
    CHECK(std::abs(closed - bf.value) < bf.tail_bound + 1e-10);
    double enumz = z_by_enumeration(spec, 12);
    auto bf12 = partition_function_bruteforce(spec, 12);
    CHECK(std::abs(enumz - bf12.value) < 1e-12 * std::max(1.0, enumz));
}

TEST_CASE("all-zero specializations give the uv Euler product") {
    ProcessSpec spec = make_spec(2, 0.3, 0.3,
                                 {Specialization::zero(), Specialization::zero()},
                                 {Specialization::zero(), Specialization::zero()});
    auto bf = partition_function_bruteforce(spec, 40);
    double oracle = 1.0;
    for (int n = 1; n <= 40; ++n) oracle /= 1.0 - std::pow(0.09, n);
    CHECK(std::abs(bf.value - oracle) < 1e-11);
    CHECK(std::abs(partition_function_closed(spec) - oracle) < 1e-11);
}

TEST_CASE("two boundaries with nontrivial specializations") {
    ProcessSpec spec = make_spec(
        2, 0.3, 0.5,
        {Specialization::single(0.3), Specialization::dual(0.4)},
        {Specialization::single(0.2), Specialization::zero()});
    double closed = partition_function_closed(spec);
    auto bf = partition_function_bruteforce(spec, 36);
    CHECK(std::abs(closed - bf.value) < bf.tail_bound + 1e-9);
    CHECK(std::abs(closed - bf.value) < 1e-7 * closed);
}

TEST_CASE("odd-column and odd-row variants against enumeration") {
    for (auto variant : {BoundaryWeight::odd_columns, BoundaryWeight::odd_rows}) {
        ProcessSpec spec = make_spec(1, 0.0, 0.5, {Specialization::single(0.4)},
                                     {Specialization::zero()});
        spec.variant = variant;
        spec.variant_param = 0.5;
        double closed = partition_function_closed(spec);
        auto bf = partition_function_bruteforce(spec, 36);
        CHECK(std::abs(closed - bf.value) < 1e-9 * std::max(1.0, closed));
        double enumz = z_by_enumeration(spec, 12);
        auto bf12 = partition_function_bruteforce(spec, 12);
        CHECK(std::abs(enumz - bf12.value) < 1e-12 * std::max(1.0, enumz));
    }
}

TEST_CASE("brute-force correlations: trivial and geometric cases") {
    // one-row geometric law: v = 1 free boundary over a single x-step
    ProcessSpec spec = make_spec(1, 0.0, 1.0, {Specialization::single(0.3)},
                                 {Specialization::zero()});
    CHECK(correlation_bruteforce(spec, {}, 30) == doctest::Approx(1.0));
    // one-row law P(lam = (k)) = (1-x) x^k: a point sits at m-1/2 exactly
    // when lam_1 = m, and the cumulative event lam_1 >= m has mass x^m
    for (int m = 1; m <= 4; ++m) {
        double rho = correlation_bruteforce(spec, {{1, HalfInt(2 * m - 1)}}, 35);
        CHECK(std::abs(rho - 0.7 * std::pow(0.3, m)) < 1e-11);
        double cumulative = 0.0;
        for (int j = m; j <= 30; ++j)
            cumulative += correlation_bruteforce(spec, {{1, HalfInt(2 * j - 1)}}, 35);
        CHECK(std::abs(cumulative - std::pow(0.3, m)) < 1e-11);
    }
}

TEST_CASE("correlations are monotone under adding points") {
    ProcessSpec spec = make_spec(2, 0.3, 0.4,
                                 {Specialization::single(0.3), Specialization::single(0.2)},
                                 {Specialization::zero(), Specialization::zero()});
    std::vector<std::pair<int, HalfInt>> u1 = {{1, HalfInt(1)}};
    std::vector<std::pair<int, HalfInt>> u2 = {{1, HalfInt(1)}, {2, HalfInt(3)}};
    double a = correlation_bruteforce(spec, u1, 24);
    double b = correlation_bruteforce(spec, u2, 24);
    CHECK(b <= a + 1e-13);
    CHECK(a <= 1.0 + 1e-13);
}

TEST_CASE("shift-mixed correlations average the plain ones") {
    ProcessSpec spec = make_spec(1, 0.3, 0.3, {Specialization::single(0.3)},
                                 {Specialization::zero()});
    std::vector<std::pair<int, HalfInt>> u = {{1, HalfInt(1)}};
    double direct = correlation_bruteforce_shifted(spec, u, 0.8, 24);
    // independent evaluation of the mixing series
    double uv = 0.09, norm = 0.0, acc = 0.0;
    for (int d = -4; d <= 4; ++d) {
        double w = std::pow(0.8, 2.0 * d) * std::pow(uv, 2.0 * double(d) * d);
        norm += w;
        std::vector<std::pair<int, HalfInt>> shifted = {{1, HalfInt(1 - 4 * d)}};
        acc += w * correlation_bruteforce(spec, shifted, 24);
    }
    CHECK(std::abs(direct - acc / norm) < 1e-12);
}

TEST_CASE("growth rule reproduces the worked 6x6 passage time") {
    // the 6x6 symmetric matrix with passage time 69
    SymMatrix m;
    m.n = 6;
    m.a.assign(36, 0);
    auto set = [&](int r, int t, long v) {
        m.at(r, t) = v;
        m.at(t, r) = v;
    };
    set(1, 1, 8); set(1, 2, 5); set(1, 3, 0); set(1, 4, 1); set(1, 5, 1); set(1, 6, 1);
    set(2, 2, 2); set(2, 3, 9); set(2, 4, 9); set(2, 5, 3); set(2, 6, 2);
    set(3, 3, 2); set(3, 4, 2); set(3, 5, 11); set(3, 6, 1);
    set(4, 4, 1); set(4, 5, 10); set(4, 6, 0);
    set(5, 5, 11); set(5, 6, 0);
    set(6, 6, 1);
    auto surf = lpp_growth(m);
    CHECK(surf.passage_time(6, 6) == 69);
    CHECK(lpp_dp(m) == 69);
}

TEST_CASE("zero weights give empty partitions everywhere") {
    SymMatrix m;
    m.n = 4;
    m.a.assign(16, 0);
    auto surf = lpp_growth(m);
    for (int r = 1; r <= 5; ++r)
        for (int t = 1; t <= 5; ++t) CHECK(surf.at(r, t).empty());
}

TEST_CASE("growth rule vs DP oracle on 200 random symmetric 5x5 matrices") {
    std::vector<double> a = {0.5, 0.4, 0.55, 0.35, 0.5};
    for (int trial = 0; trial < 200; ++trial) {
        auto sample = sample_lpp(a, 0.9, 5, 99, std::uint64_t(trial));
        CHECK(sample.surface.passage_time(5, 5) == lpp_dp(sample.omega));
        // symmetry of the surface
        for (int r = 1; r <= 6; ++r)
            for (int t = 1; t <= 6; ++t)
                CHECK(sample.surface.at(r, t) == sample.surface.at(t, r));
    }
}

TEST_CASE("hv sampler: q=0 gives the empty chain") {
    HvBounds b{6, 6, 4};
    auto cfg = sample_hv_exact({}, 0.0, b, true, 7);
    for (const auto& lam : cfg.mus) CHECK(lam.empty());
}

TEST_CASE("hv sampler: single-variable geometric law") {
    HvBounds b{40, 1, 1};
    const double x = 0.5;
    const int samples = 100000;
    double mean = 0.0;
    for (int i = 0; i < samples; ++i) {
        auto cfg = sample_hv_exact({x}, 0.0, b, false, 2024, std::uint64_t(i));
        mean += double(cfg.lambdas[0].size());
    }
    mean /= samples;
    const double expect = x / (1.0 - x);
    const double sigma = std::sqrt(x / ((1 - x) * (1 - x)) / samples);
    CHECK(std::abs(mean - expect) < 3.0 * sigma + 1e-9);
}

TEST_CASE("hv sampler draws valid HV chains with the right law") {
    HvBounds b{3, 2, 4};
    std::map<std::vector<long>, int> counts;
    const int samples = 40000;
    for (int i = 0; i < samples; ++i) {
        auto cfg = sample_hv_exact({0.6, 0.5, 0.4, 0.3}, 0.0, b, true, 5, std::uint64_t(i));
        std::vector<Partition> chain = cfg.mus;
        CHECK(validate_hv_chain(chain));
        std::vector<long> key;
        for (const auto& p : cfg.lambdas) key.push_back(p.size());
        counts[key]++;
    }
    // spot-check the empty-chain probability against the exact normalization
    // by brute force over the bounded state space
    auto states = enumerate_partitions(6, 2, 3);
    double z = 0.0;
    std::function<double(size_t, const Partition&)> suffix = [&](size_t step,
                                                                  const Partition& cur) {
        if (step == 4) return 1.0;
        double acc = 0.0;
        const double xs[] = {0.6, 0.5, 0.4, 0.3};
        for (const Partition& nxt : states) {
            bool ok = (step % 2 == 0) ? interlace_h(nxt, cur) : interlace_v(nxt, cur);
            if (!ok) continue;
            if (!nxt.contains(cur)) continue;
            acc += std::pow(xs[step], double(nxt.size() - cur.size())) * suffix(step + 1, nxt);
        }
        return acc;
    };
    z = suffix(0, Partition{});
    double p_empty = 1.0 / z;
    double observed = double(counts[{0, 0, 0, 0}]) / samples;
    CHECK(std::abs(observed - p_empty) < 4.0 * std::sqrt(p_empty / samples) + 1e-4);
}
