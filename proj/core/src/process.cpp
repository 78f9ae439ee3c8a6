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

#include "fbschur/process.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "fbschur/rng.hpp"

namespace fbschur {

void ProcessSpec::validate() const {
    if (N < 0) throw config_error("ProcessSpec: negative N");
    if (u < 0.0 || v < 0.0 || u > 1.0 || v > 1.0)
        throw config_error("ProcessSpec: u, v must lie in [0,1]");
    if (u * v >= 1.0) throw config_error("ProcessSpec: uv < 1 required");
    if (int(rho_plus.size()) != N || int(rho_minus.size()) != N)
        throw config_error("ProcessSpec: need N specializations on each side");
    for (const auto& r : rho_plus)
        if (!r.nonnegative()) throw config_error("ProcessSpec: rho+ not nonnegative");
    for (const auto& r : rho_minus)
        if (!r.nonnegative()) throw config_error("ProcessSpec: rho- not nonnegative");
    if (variant != BoundaryWeight::plain) {
        if (variant_param < 0.0)
            throw config_error("ProcessSpec: variant parameter must be nonnegative");
        if (variant_param >= radius())
            throw config_error("ProcessSpec: variant parameter must stay below the analyticity radius");
    }
}

Specialization ProcessSpec::effective_rho_minus(int k) const {
    const Specialization& base = rho_minus[size_t(k - 1)];
    if (k != N || variant == BoundaryWeight::plain) return base;
    if (variant == BoundaryWeight::odd_columns) {
        return Specialization::unite({base, Specialization::single(variant_param * v),
                                      Specialization::dual(-v)});
    }
    return Specialization::unite({base, Specialization::dual(variant_param * v),
                                  Specialization::single(-v)});
}

double ProcessSpec::radius() const {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& s : rho_plus) r = std::min(r, s.radius());
    for (const auto& s : rho_minus) r = std::min(r, s.radius());
    return r;
}

bool SeqConfig::valid_chain() const {
    if (mus.size() != lambdas.size() + 1) return false;
    for (size_t k = 0; k < lambdas.size(); ++k) {
        if (!lambdas[k].contains(mus[k])) return false;
        if (!lambdas[k].contains(mus[k + 1])) return false;
    }
    return true;
}

PointConfig point_config(const SeqConfig& cfg, HalfInt floor) {
    PointConfig pc;
    pc.floor = floor;
    for (size_t i = 0; i < cfg.lambdas.size(); ++i) {
        const Partition& lam = cfg.lambdas[i];
        for (int j = 1;; ++j) {
            std::int64_t twice = 2 * std::int64_t(lam.part(j) - j) + 1;
            if (twice <= floor.twice) break;
            pc.points.push_back({int(i + 1), HalfInt(twice)});
        }
    }
    return pc;
}

double weight(const ProcessSpec& spec, const SeqConfig& cfg) {
    if (int(cfg.lambdas.size()) != spec.N) throw config_error("weight: wrong chain length");
    if (!cfg.valid_chain()) return 0.0;
    double w = std::pow(spec.u, double(cfg.mus.front().size())) *
               std::pow(spec.v, double(cfg.mus.back().size()));
    for (int k = 1; k <= spec.N; ++k) {
        w *= skew_schur(cfg.lambdas[size_t(k - 1)], cfg.mus[size_t(k - 1)],
                        spec.rho_plus[size_t(k - 1)]);
        w *= skew_schur(cfg.lambdas[size_t(k - 1)], cfg.mus[size_t(k)],
                        spec.rho_minus[size_t(k - 1)]);
    }
    if (spec.variant == BoundaryWeight::odd_columns)
        w *= std::pow(spec.variant_param, double(cfg.mus.back().odd_columns()));
    else if (spec.variant == BoundaryWeight::odd_rows)
        w *= std::pow(spec.variant_param, double(cfg.mus.back().odd_rows()));
    return w;
}

bool validate_h_chain(const std::vector<Partition>& chain) {
    for (size_t i = 0; i + 1 < chain.size(); ++i)
        if (!interlace_h(chain[i + 1], chain[i])) return false;
    return true;
}

bool validate_hv_chain(const std::vector<Partition>& chain) {
    for (size_t i = 0; i + 1 < chain.size(); ++i) {
        bool ok = (i % 2 == 0) ? interlace_h(chain[i + 1], chain[i])
                               : interlace_v(chain[i + 1], chain[i]);
        if (!ok) return false;
    }
    return true;
}

double partition_function_closed(const ProcessSpec& spec, double tol) {
    const double u = spec.u, v = spec.v;
    std::vector<Specialization> plus_parts, minus_parts;
    for (int k = 1; k <= spec.N; ++k) {
        plus_parts.push_back(spec.rho_plus[size_t(k - 1)]);
        minus_parts.push_back(spec.effective_rho_minus(k));
    }
    Specialization rp = Specialization::unite(plus_parts);
    Specialization rm = Specialization::unite(minus_parts);

    double z = 1.0;
    for (int k = 1; k <= spec.N; ++k)
        for (int l = k; l <= spec.N; ++l)
            z *= Hpair(spec.rho_plus[size_t(k - 1)], spec.effective_rho_minus(l));

    if (u == 0.0 && v == 0.0) return z;
    const double decay = std::max(u * v, 1e-30);
    for (int n = 1; n < 100000; ++n) {
        double un1 = std::pow(u, n - 1) * std::pow(v, n);
        double un2 = std::pow(u, n) * std::pow(v, n - 1);
        double factor = 1.0;
        factor *= Htilde(Specialization::scaled(un1, rp));
        factor *= Htilde(Specialization::scaled(un2, rm));
        factor *= Hpair(Specialization::scaled(std::pow(u, 2 * n), rp),
                        Specialization::scaled(std::pow(v, 2 * n), rm));
        factor /= 1.0 - std::pow(u * v, n);
        z *= factor;
        // all n-dependent quantities decay geometrically in max(uv, u^{n-1}v^n, ...)
        double mag = std::max({std::pow(u * v, n), un1 * rp.max_leaf(), un2 * rm.max_leaf()});
        if (mag < tol && n >= 2) break;
        if (n > 90000) throw numeric_error("partition_function_closed: product did not truncate");
        (void)decay;
    }
    return z;
}

namespace {

using StateVec = std::unordered_map<Partition, double, PartitionHash>;

// transfer up through one leaf: new[lam] += x^{|lam|-|mu|} old[mu]
StateVec transfer_up_leaf(const StateVec& in, const Specialization::Leaf& leaf,
                          int cutoff) {
    StateVec out;
    for (const auto& [mu, amp] : in) {
        long budget = cutoff - mu.size();
        auto emit = [&](const Partition& lam, long) {
            out[lam] += amp * std::pow(leaf.x, double(lam.size() - mu.size()));
        };
        if (leaf.dual) for_v_strips_above(mu, budget, emit);
        else for_h_strips_above(mu, budget, emit);
    }
    return out;
}

StateVec transfer_down_leaf(const StateVec& in, const Specialization::Leaf& leaf) {
    StateVec out;
    for (const auto& [lam, amp] : in) {
        auto emit = [&](const Partition& mu) {
            out[mu] += amp * std::pow(leaf.x, double(lam.size() - mu.size()));
        };
        if (leaf.dual) for_v_strips_below(lam, emit);
        else for_h_strips_below(lam, emit);
    }
    return out;
}

StateVec transfer(const StateVec& in, const Specialization& rho, bool up, int cutoff) {
    StateVec cur = in;
    for (const auto& leaf : rho.leaves())
        cur = up ? transfer_up_leaf(cur, leaf, cutoff) : transfer_down_leaf(cur, leaf);
    return cur;
}

double variant_weight(const ProcessSpec& spec, const Partition& lam) {
    if (spec.variant == BoundaryWeight::odd_columns)
        return std::pow(spec.variant_param, double(lam.odd_columns()));
    if (spec.variant == BoundaryWeight::odd_rows)
        return std::pow(spec.variant_param, double(lam.odd_rows()));
    return 1.0;
}

// partial sums of weights; point_filter(i, lam) gates the lambda slots
double brute_force_sum(
    const ProcessSpec& spec, int cutoff,
    const std::function<bool(int, const Partition&)>& point_filter) {
    StateVec vec;
    if (spec.u == 0.0) {
        vec[Partition{}] = 1.0;
    } else {
        for_each_partition(cutoff, {}, {}, [&](const Partition& mu) {
            vec[mu] = std::pow(spec.u, double(mu.size()));
        });
    }
    for (int k = 1; k <= spec.N; ++k) {
        vec = transfer(vec, spec.rho_plus[size_t(k - 1)], true, cutoff);
        if (point_filter) {
            for (auto it = vec.begin(); it != vec.end();) {
                if (!point_filter(k, it->first)) it = vec.erase(it);
                else ++it;
            }
        }
        vec = transfer(vec, spec.rho_minus[size_t(k - 1)], false, cutoff);
    }
    double z = 0.0;
    for (const auto& [lam, amp] : vec)
        z += amp * std::pow(spec.v, double(lam.size())) * variant_weight(spec, lam);
    return z;
}

// table of partition counts p(0..n) by Euler's pentagonal recurrence
std::vector<double> partition_counts(int n) {
    std::vector<double> p(size_t(n) + 1, 0.0);
    p[0] = 1.0;
    for (int m = 1; m <= n; ++m) {
        double acc = 0.0;
        for (int k = 1;; ++k) {
            long g1 = long(k) * (3 * k - 1) / 2, g2 = long(k) * (3 * k + 1) / 2;
            if (g1 > m && g2 > m) break;
            double sgn = (k % 2 == 1) ? 1.0 : -1.0;
            if (g1 <= m) acc += sgn * p[size_t(m - g1)];
            if (g2 <= m) acc += sgn * p[size_t(m - g2)];
        }
        p[size_t(m)] = acc;
    }
    return p;
}

double domination_ratio(const ProcessSpec& spec) {
    double r = spec.u * spec.v;
    for (int k = 1; k <= spec.N; ++k) {
        const auto& lp = spec.rho_plus[size_t(k - 1)].leaves();
        const auto& lm = spec.rho_minus[size_t(k - 1)].leaves();
        double mp = 0.0, mm = 0.0;
        for (const auto& l : lp) mp = std::max(mp, std::abs(l.x));
        for (const auto& l : lm) mm = std::max(mm, std::abs(l.x));
        r = std::max({r, double(lp.size()) * mp, double(lm.size()) * mm});
    }
    return r;
}

} // namespace

BruteForceResult partition_function_bruteforce(const ProcessSpec& spec, int cutoff) {
    if (cutoff > 40) throw config_error("partition_function_bruteforce: cutoff > 40");
    spec.validate();
    BruteForceResult res;
    res.value = brute_force_sum(spec, cutoff, nullptr);
    const double r = domination_ratio(spec);
    if (r >= 1.0) {
        res.tail_bound = std::numeric_limits<double>::infinity();
        return res;
    }
    // chains with a partition of size m > cutoff contribute at most
    // (slots) * p(m) * r^m relative to the bulk; sum the geometric-ish tail
    std::vector<double> p = partition_counts(cutoff + 260);
    double tail = 0.0;
    for (int m = cutoff + 1; m <= cutoff + 260; ++m)
        tail += p[size_t(m)] * std::pow(r, double(m));
    tail *= double(2 * spec.N + 1) * std::max(res.value, 1.0) /
            ((1.0 - r) * (1.0 - r));
    res.tail_bound = tail;
    return res;
}

double correlation_bruteforce(const ProcessSpec& spec,
                              const std::vector<std::pair<int, HalfInt>>& u_set,
                              int cutoff) {
    if (cutoff > 40) throw config_error("correlation_bruteforce: cutoff > 40");
    spec.validate();
    for (const auto& [i, k] : u_set)
        if (i < 1 || i > spec.N)
            throw config_error("correlation_bruteforce: abscissa out of range");
    double z = brute_force_sum(spec, cutoff, nullptr);
    auto filter = [&](int i, const Partition& lam) {
        for (const auto& [ii, k] : u_set)
            if (ii == i && !maya_contains(lam, 0, k)) return false;
        return true;
    };
    double zu = brute_force_sum(spec, cutoff, filter);
    return zu / z;
}

double correlation_bruteforce_shifted(const ProcessSpec& spec,
                                      const std::vector<std::pair<int, HalfInt>>& u_set,
                                      double t, int cutoff) {
    const double uv = spec.u * spec.v;
    if (uv == 0.0) return correlation_bruteforce(spec, u_set, cutoff);
    // P(D_t = d) prop to t^{2d} (uv)^{2d^2}; truncate when the weight is
    // negligible against the normalizer
    double norm = 0.0;
    int dmax = 1;
    for (int d = 1; d < 100; ++d) {
        double wplus = std::pow(t, 2.0 * d) * std::pow(uv, 2.0 * d * d);
        double wminus = std::pow(t, -2.0 * d) * std::pow(uv, 2.0 * d * d);
        if (std::max(wplus, wminus) < 1e-14) { dmax = d; break; }
    }
    std::vector<double> w(size_t(2 * dmax) + 1);
    for (int d = -dmax; d <= dmax; ++d) {
        w[size_t(d + dmax)] = std::pow(t, 2.0 * d) * std::pow(uv, 2.0 * double(d) * d);
        norm += w[size_t(d + dmax)];
    }
    double acc = 0.0;
    for (int d = -dmax; d <= dmax; ++d) {
        std::vector<std::pair<int, HalfInt>> shifted;
        for (const auto& [i, k] : u_set)
            shifted.push_back({i, HalfInt(k.twice - 4 * std::int64_t(d))});
        acc += w[size_t(d + dmax)] * correlation_bruteforce(spec, shifted, cutoff);
    }
    return acc / norm;
}

Partition growth_step(const Partition& kap, const Partition& lam,
                      const Partition& mu, long k) {
    std::vector<int> nu;
    nu.push_back(int(std::max(lam.part(1), mu.part(1)) + k));
    const int len = std::max(lam.length(), mu.length()) + 1;
    for (int i = 2; i <= len; ++i) {
        int x = std::max(lam.part(i), mu.part(i)) +
                std::min(lam.part(i - 1), mu.part(i - 1)) - kap.part(i - 1);
        if (x == 0) break;
        nu.push_back(x);
    }
    return Partition(std::move(nu));
}

GrowthSurface lpp_growth(const SymMatrix& omega) {
    const int n = omega.n;
    GrowthSurface s;
    s.n = n;
    s.lam.assign(size_t(n + 1) * size_t(n + 1), Partition{});
    for (int r = 1; r <= n; ++r)
        for (int t = 1; t <= n; ++t) {
            Partition nu = growth_step(s.at(r, t), s.at(r, t + 1), s.at(r + 1, t),
                                       omega.at(r, t));
            // volume identity |nu| + |kap| = |lam| + |mu| + k
            if (nu.size() + s.at(r, t).size() !=
                s.at(r, t + 1).size() + s.at(r + 1, t).size() + omega.at(r, t))
                throw numeric_error("lpp_growth: volume identity violated");
            s.at(r + 1, t + 1) = std::move(nu);
        }
    return s;
}

long lpp_dp(const SymMatrix& omega) {
    const int n = omega.n;
    std::vector<long> row(size_t(n) + 1, 0);
    for (int r = 1; r <= n; ++r) {
        long diag = 0;
        for (int t = 1; t <= n; ++t) {
            long up = row[size_t(t)];    // L(r-1, t)
            long left = (t == 1) ? 0 : row[size_t(t - 1)];
            row[size_t(t)] = std::max(up, left) + omega.at(r, t);
        }
        (void)diag;
    }
    return row[size_t(n)];
}

SymMatrix sample_lpp_matrix(const std::vector<double>& a, double alpha,
                            std::uint64_t seed, std::uint64_t stream) {
    const int n = int(a.size());
    for (double ai : a)
        if (!(ai > 0.0 && ai < 1.0))
            throw domain_error("sample_lpp_matrix: a_i must lie in (0,1)");
    for (int r = 0; r < n; ++r) {
        if (!(alpha * a[size_t(r)] < 1.0))
            throw domain_error("sample_lpp_matrix: alpha a_r < 1 required");
        for (int t = r; t < n; ++t)
            if (!(a[size_t(r)] * a[size_t(t)] < 1.0))
                throw domain_error("sample_lpp_matrix: a_r a_t < 1 required");
    }
    SymMatrix m;
    m.n = n;
    m.a.assign(size_t(n) * n, 0);
    auto rng = stream_rng(seed, stream);
    for (int r = 1; r <= n; ++r)
        for (int t = r; t <= n; ++t) {
            double q = (r == t) ? alpha * a[size_t(r - 1)]
                                : a[size_t(r - 1)] * a[size_t(t - 1)];
            long g = geometric_q(q, rng);
            m.at(r, t) = g;
            m.at(t, r) = g;
        }
    return m;
}

LppSample sample_lpp(const std::vector<double>& a, double alpha, int n,
                     std::uint64_t seed, std::uint64_t stream) {
    if (int(a.size()) != n) throw config_error("sample_lpp: need n parameters");
    LppSample out;
    out.omega = sample_lpp_matrix(a, alpha, seed, stream);
    out.surface = lpp_growth(out.omega);
    return out;
}

long sample_lpp_time_dp(const std::vector<double>& a, double alpha, int n,
                        std::uint64_t seed, std::uint64_t stream) {
    if (int(a.size()) != n) throw config_error("sample_lpp_time_dp: need n parameters");
    auto rng = stream_rng(seed, stream);
    // generate the symmetric matrix row by row; memory O(n)
    std::vector<std::vector<long>> w;
    w.resize(size_t(n));
    for (int r = 1; r <= n; ++r) {
        w[size_t(r - 1)].resize(size_t(n - r + 1));
        for (int t = r; t <= n; ++t) {
            double q = (r == t) ? alpha * a[size_t(r - 1)]
                                : a[size_t(r - 1)] * a[size_t(t - 1)];
            w[size_t(r - 1)][size_t(t - r)] = geometric_q(q, rng);
        }
    }
    auto wat = [&](int r, int t) {
        if (r > t) std::swap(r, t);
        return w[size_t(r - 1)][size_t(t - r)];
    };
    std::vector<long> row(size_t(n) + 1, 0);
    for (int r = 1; r <= n; ++r)
        for (int t = 1; t <= n; ++t) {
            long up = row[size_t(t)];
            long left = (t == 1) ? 0 : row[size_t(t - 1)];
            row[size_t(t)] = std::max(up, left) + wat(r, t);
        }
    return row[size_t(n)];
}

SeqConfig sample_hv_exact(std::vector<double> x, double q_volume,
                          const HvBounds& bounds, bool hv, std::uint64_t seed,
                          std::uint64_t stream) {
    if (x.empty()) {
        if (bounds.n_steps <= 0)
            throw config_error("sample_hv_exact: n_steps required with q_volume");
        if (q_volume < 0.0 || q_volume >= 1.0)
            throw config_error("sample_hv_exact: q in [0,1) required");
        const int m2 = bounds.n_steps;
        for (int i = 1; i <= m2; ++i)
            x.push_back(std::pow(q_volume, double((m2 - i) / 2 + 1)));
    }
    const int steps = int(x.size());
    std::vector<Partition> states =
        enumerate_partitions(bounds.max_part * bounds.max_len, bounds.max_len,
                             bounds.max_part);
    if (states.size() > 200000)
        throw config_error("sample_hv_exact: state space too large");
    std::unordered_map<Partition, size_t, PartitionHash> index;
    for (size_t i = 0; i < states.size(); ++i) index[states[i]] = i;

    // backward values V_i, i = steps..0
    std::vector<std::vector<double>> val(size_t(steps) + 1,
                                         std::vector<double>(states.size(), 0.0));
    for (size_t j = 0; j < states.size(); ++j) val[size_t(steps)][j] = 1.0;
    for (int i = steps - 1; i >= 0; --i) {
        const bool dualstep = hv && ((i + 1) % 2 == 0);
        const double xi = x[size_t(i)];
        for (size_t j = 0; j < states.size(); ++j) {
            const Partition& mu = states[j];
            double acc = 0.0;
            auto emit = [&](const Partition& lam, long) {
                if (lam.length() > bounds.max_len || lam.part(1) > bounds.max_part)
                    return;
                auto it = index.find(lam);
                if (it == index.end()) return;
                acc += std::pow(xi, double(lam.size() - mu.size())) *
                       val[size_t(i) + 1][it->second];
            };
            long budget = long(bounds.max_part) * bounds.max_len - mu.size();
            if (dualstep) for_v_strips_above(mu, budget, emit);
            else for_h_strips_above(mu, budget, emit);
            val[size_t(i)][j] = acc;
        }
    }

    auto rng = stream_rng(seed, stream);
    SeqConfig cfg;
    Partition cur{};
    cfg.mus.push_back(cur);
    for (int i = 0; i < steps; ++i) {
        const bool dualstep = hv && ((i + 1) % 2 == 0);
        const double xi = x[size_t(i)];
        const double total = val[size_t(i)][index[cur]];
        double u = uniform01(rng) * total;
        Partition next = cur;
        bool chosen = false;
        double acc = 0.0;
        auto emit = [&](const Partition& lam, long) {
            if (chosen) return;
            if (lam.length() > bounds.max_len || lam.part(1) > bounds.max_part) return;
            auto it = index.find(lam);
            if (it == index.end()) return;
            acc += std::pow(xi, double(lam.size() - cur.size())) *
                   val[size_t(i) + 1][it->second];
            if (acc >= u) {
                next = lam;
                chosen = true;
            }
        };
        long budget = long(bounds.max_part) * bounds.max_len - cur.size();
        if (dualstep) for_v_strips_above(cur, budget, emit);
        else for_h_strips_above(cur, budget, emit);
        cur = next;
        cfg.lambdas.push_back(cur);
        cfg.mus.push_back(cur);
    }
    return cfg;
}

} // namespace fbschur
