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

#include "fbschur/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fbschur {

void Partition::normalize() {
    while (!parts_.empty() && parts_.back() == 0) parts_.pop_back();
    for (size_t i = 0; i < parts_.size(); ++i) {
        if (parts_[i] <= 0 || (i + 1 < parts_.size() && parts_[i] < parts_[i + 1]))
            throw domain_error("Partition: parts must be weakly decreasing and positive");
    }
}

long Partition::size() const {
    return std::accumulate(parts_.begin(), parts_.end(), 0L);
}

Partition Partition::conjugate() const {
    if (parts_.empty()) return {};
    std::vector<int> c(parts_[0], 0);
    for (int p : parts_)
        for (int j = 0; j < p; ++j) ++c[j];
    return Partition(std::move(c));
}

bool Partition::contains(const Partition& mu) const {
    if (mu.length() > length()) return false;
    for (int i = 1; i <= mu.length(); ++i)
        if (part(i) < mu.part(i)) return false;
    return true;
}

int Partition::odd_columns() const {
    Partition c = conjugate();
    int n = 0;
    for (int p : c.parts())
        if (p % 2 == 1) ++n;
    return n;
}

int Partition::odd_rows() const {
    int n = 0;
    for (int p : parts_)
        if (p % 2 == 1) ++n;
    return n;
}

bool Partition::operator<(const Partition& o) const {
    if (size() != o.size()) return size() < o.size();
    return parts_ > o.parts_;  // lex descending within a size class
}

size_t PartitionHash::operator()(const Partition& p) const {
    // FNV-1a over the parts
    std::uint64_t h = 14695981039346656037ull;
    for (int x : p.parts()) {
        h ^= std::uint64_t(x);
        h *= 1099511628211ull;
    }
    return size_t(h);
}

HalfInt HalfInt::from_double(double v) {
    double t = 2.0 * v;
    double r = std::round(t);
    if (std::abs(t - r) > 1e-9 || std::llabs(std::int64_t(r)) % 2 != 1)
        throw domain_error("HalfInt: value is not a half-integer");
    return HalfInt(std::int64_t(r));
}

ChargeEnergy charge_energy(const AdmissibleSet& s) {
    ChargeEnergy ce;
    ce.charge = int(s.plus.size()) - int(s.minus.size());
    for (const auto& k : s.plus) ce.energy_twice += k.twice;
    for (const auto& k : s.minus) ce.energy_twice -= k.twice;
    return ce;
}

AdmissibleSet maya(const Partition& lambda, int c) {
    AdmissibleSet s;
    const int len = lambda.length();
    // elements lambda_i - i + 1/2 + c for i = 1..len; beyond the length the
    // tail -i + 1/2 + c covers every half-integer <= c - len - 1/2.
    std::vector<std::int64_t> neg_elems;
    for (int i = 1; i <= len; ++i) {
        std::int64_t twice = 2 * std::int64_t(lambda.part(i) - i + c) + 1;
        if (twice > 0) s.plus.push_back(HalfInt(twice));
        else neg_elems.push_back(twice);
    }
    for (int i = len + 1; i <= c; ++i)
        s.plus.push_back(HalfInt(2 * std::int64_t(c - i) + 1));
    std::sort(neg_elems.begin(), neg_elems.end(), std::greater<>());
    // holes can exist only above the fully occupied tail, i.e. for doubled
    // ordinates >= 2(c - len) + 1
    const std::int64_t floor_twice = 2 * std::int64_t(c - len) + 1;
    size_t idx = 0;
    for (std::int64_t t = -1; t >= floor_twice; t -= 2) {
        if (idx < neg_elems.size() && neg_elems[idx] == t) { ++idx; continue; }
        s.minus.push_back(HalfInt(t));
    }
    std::sort(s.plus.begin(), s.plus.end(), std::greater<>());
    return s;
}

std::pair<Partition, int> inverse_maya(const AdmissibleSet& s) {
    const int c = int(s.plus.size()) - int(s.minus.size());
    // reconstruct lambda_i = k_i + i - 1/2 - c from the descending elements
    std::vector<std::int64_t> elems;
    for (const auto& k : s.plus) {
        if (k.twice < 0) throw domain_error("inverse_maya: plus element negative");
        elems.push_back(k.twice);
    }
    std::sort(elems.begin(), elems.end(), std::greater<>());
    std::vector<std::int64_t> holes;
    for (const auto& k : s.minus) {
        if (k.twice > 0) throw domain_error("inverse_maya: minus element positive");
        holes.push_back(k.twice);
    }
    std::sort(holes.begin(), holes.end(), std::greater<>());
    const std::int64_t lowest =
        (holes.empty() ? -1 : holes.back()) -
        2 * std::int64_t(elems.size() + size_t(std::abs(c)) + 2);
    size_t hidx = 0;
    for (std::int64_t t = -1; t >= lowest; t -= 2) {
        if (hidx < holes.size() && holes[hidx] == t) { ++hidx; continue; }
        elems.push_back(t);
    }
    std::vector<int> parts;
    for (size_t i = 0; i < elems.size(); ++i) {
        std::int64_t li = (elems[i] - 1) / 2 + std::int64_t(i + 1) - c;
        if (li <= 0) break;
        parts.push_back(int(li));
    }
    return {Partition(std::move(parts)), c};
}

bool maya_contains(const Partition& lambda, int c, HalfInt k) {
    // k in S(lambda,c) iff k = lambda_i - i + 1/2 + c for some i >= 1
    const int len = lambda.length();
    for (int i = 1; i <= len; ++i)
        if (2 * std::int64_t(lambda.part(i) - i + c) + 1 == k.twice) return true;
    // tail: i > len gives -i + 1/2 + c
    std::int64_t top_tail = 2 * std::int64_t(c - (len + 1)) + 1;
    return k.twice <= top_tail && (top_tail - k.twice) % 2 == 0;
}

bool interlace_h(const Partition& lambda, const Partition& mu) {
    int n = std::max(lambda.length(), mu.length());
    for (int i = 1; i <= n; ++i) {
        if (lambda.part(i) < mu.part(i)) return false;
        if (mu.part(i) < lambda.part(i + 1)) return false;
    }
    return true;
}

bool interlace_v(const Partition& lambda, const Partition& mu) {
    int n = std::max(lambda.length(), mu.length());
    for (int i = 1; i <= n; ++i) {
        int d = lambda.part(i) - mu.part(i);
        if (d != 0 && d != 1) return false;
    }
    return true;
}

double skew_schur(const Partition& lambda, const Partition& mu,
                  const Specialization& rho) {
    if (!lambda.contains(mu)) return 0.0;
    if (lambda == mu) return 1.0;
    const long gap = lambda.size() - mu.size();
    if (rho.is_zero()) return 0.0;  // lambda != mu at this point
    const auto& leaves = rho.leaves();
    if (leaves.size() == 1) {
        const auto& l = leaves[0];
        bool ok = l.dual ? interlace_v(lambda, mu) : interlace_h(lambda, mu);
        return ok ? std::pow(l.x, double(gap)) : 0.0;
    }
    // Jacobi-Trudi: det h_{lambda_i - i - mu_j + j}
    const int n = lambda.length();
    const int deg = int(lambda.size());
    std::vector<double> h = rho.h_coeffs(deg);
    auto hval = [&](long m) { return (m < 0) ? 0.0 : (m > deg ? 0.0 : h[size_t(m)]); };
    std::vector<double> a(size_t(n) * n);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            a[size_t(i - 1) * n + (j - 1)] = hval(lambda.part(i) - i - mu.part(j) + j);
    // LU with partial pivoting
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[size_t(r) * n + col]) > std::abs(a[size_t(piv) * n + col]))
                piv = r;
        if (std::abs(a[size_t(piv) * n + col]) < 1e-300) return 0.0;
        if (piv != col) {
            for (int cc = 0; cc < n; ++cc)
                std::swap(a[size_t(piv) * n + cc], a[size_t(col) * n + cc]);
            det = -det;
        }
        det *= a[size_t(col) * n + col];
        for (int r = col + 1; r < n; ++r) {
            double f = a[size_t(r) * n + col] / a[size_t(col) * n + col];
            for (int cc = col; cc < n; ++cc)
                a[size_t(r) * n + cc] -= f * a[size_t(col) * n + cc];
        }
    }
    return det;
}

namespace {

void emit_partitions_of(int n, int max_len, int max_part, std::vector<int>& stack,
                        const std::function<void(const Partition&)>& fn) {
    if (n == 0) {
        fn(Partition(stack));
        return;
    }
    if (int(stack.size()) >= max_len) return;
    int hi = std::min(n, max_part);
    if (!stack.empty()) hi = std::min(hi, stack.back());
    for (int p = hi; p >= 1; --p) {
        stack.push_back(p);
        emit_partitions_of(n - p, max_len, max_part, stack, fn);
        stack.pop_back();
    }
}

} // namespace

void for_each_partition(int max_size, std::optional<int> max_len,
                        std::optional<int> max_part,
                        const std::function<void(const Partition&)>& fn) {
    if (max_size > 60) throw config_error("enumerate_partitions: max_size > 60");
    if (max_size < 0) throw config_error("enumerate_partitions: negative max_size");
    const int ml = max_len.value_or(max_size);
    const int mp = max_part.value_or(max_size);
    std::vector<int> stack;
    for (int n = 0; n <= max_size; ++n)
        emit_partitions_of(n, ml, mp, stack, fn);
}

std::vector<Partition> enumerate_partitions(int max_size, std::optional<int> max_len,
                                            std::optional<int> max_part) {
    std::vector<Partition> out;
    for_each_partition(max_size, max_len, max_part,
                       [&](const Partition& p) { out.push_back(p); });
    return out;
}

namespace {

void h_above_rec(const Partition& mu, long budget, int row, std::vector<int>& parts,
                 const std::function<void(const Partition&, long)>& fn) {
    const int len = mu.length();
    if (row == len + 1) {
        // optional new last row: 0 <= x <= min(mu_len, budget)
        const long hi = std::min(long(mu.part(len)), budget);
        for (long x = 0; x <= hi; ++x) {
            if (x > 0) parts.push_back(int(x));
            fn(Partition(std::vector<int>(parts)), budget - x);
            if (x > 0) parts.pop_back();
        }
        return;
    }
    const int lo = mu.part(row);
    const long hi = (row == 1) ? long(mu.part(1)) + budget
                               : std::min(long(mu.part(row - 1)), long(mu.part(row)) + budget);
    for (long x = lo; x <= hi; ++x) {
        if (x > 0) parts.push_back(int(x));
        h_above_rec(mu, budget - (x - lo), row + 1, parts, fn);
        if (x > 0) parts.pop_back();
    }
}

struct Run {
    int value;
    int count;
};

std::vector<Run> runs_of(const Partition& mu) {
    std::vector<Run> rs;
    for (int p : mu.parts()) {
        if (!rs.empty() && rs.back().value == p) ++rs.back().count;
        else rs.push_back({p, 1});
    }
    return rs;
}

void v_above_rec(const std::vector<Run>& rs, size_t idx, long budget,
                 std::vector<int>& parts,
                 const std::function<void(const Partition&, long)>& fn) {
    if (idx == rs.size()) {
        // new rows of 1s within budget
        std::vector<int> p(parts);
        for (long m = 0; m <= budget; ++m) {
            if (m > 0) p.push_back(1);
            fn(Partition(std::vector<int>(p)), budget - m);
        }
        return;
    }
    const Run& r = rs[idx];
    for (long up = 0; up <= std::min(long(r.count), budget); ++up) {
        size_t base = parts.size();
        for (int i = 0; i < r.count; ++i)
            parts.push_back(r.value + (i < up ? 1 : 0));
        v_above_rec(rs, idx + 1, budget - up, parts, fn);
        parts.resize(base);
    }
}

void h_below_rec(const Partition& mu, int row, std::vector<int>& parts,
                 const std::function<void(const Partition&)>& fn) {
    if (row == mu.length() + 1) {
        fn(Partition(std::vector<int>(parts)));
        return;
    }
    for (int x = mu.part(row); x >= mu.part(row + 1); --x) {
        if (x > 0) parts.push_back(x);
        h_below_rec(mu, row + 1, parts, fn);
        if (x > 0) parts.pop_back();
    }
}

void v_below_rec(const std::vector<Run>& rs, size_t idx, std::vector<int>& parts,
                 const std::function<void(const Partition&)>& fn) {
    if (idx == rs.size()) {
        std::vector<int> p;
        for (int x : parts)
            if (x > 0) p.push_back(x);
        fn(Partition(std::move(p)));
        return;
    }
    const Run& r = rs[idx];
    for (int down = 0; down <= r.count; ++down) {
        size_t base = parts.size();
        for (int i = 0; i < r.count; ++i)
            parts.push_back(r.value - (i >= r.count - down ? 1 : 0));
        v_below_rec(rs, idx + 1, parts, fn);
        parts.resize(base);
    }
}

} // namespace

void for_h_strips_above(const Partition& mu, long budget,
                        const std::function<void(const Partition&, long)>& fn) {
    if (budget < 0) return;
    std::vector<int> parts;
    if (mu.empty()) {
        for (long m = 0; m <= budget; ++m) {
            std::vector<int> p;
            if (m > 0) p.push_back(int(m));
            fn(Partition(std::move(p)), budget - m);
        }
        return;
    }
    h_above_rec(mu, budget, 1, parts, fn);
}

void for_h_strips_below(const Partition& mu,
                        const std::function<void(const Partition&)>& fn) {
    std::vector<int> parts;
    h_below_rec(mu, 1, parts, fn);
}

void for_v_strips_above(const Partition& mu, long budget,
                        const std::function<void(const Partition&, long)>& fn) {
    if (budget < 0) return;
    std::vector<int> parts;
    v_above_rec(runs_of(mu), 0, budget, parts, fn);
}

void for_v_strips_below(const Partition& mu,
                        const std::function<void(const Partition&)>& fn) {
    std::vector<int> parts;
    v_below_rec(runs_of(mu), 0, parts, fn);
}

} // namespace fbschur
