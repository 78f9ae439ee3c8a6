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

#ifndef FBSCHUR_PARTITIONS_HPP
#define FBSCHUR_PARTITIONS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fbschur/errors.hpp"
#include "fbschur/specialfn.hpp"

namespace fbschur {

/// Integer partition: weakly decreasing positive parts, no trailing zeros.
class Partition {
public:
    Partition() = default;
    Partition(std::initializer_list<int> p) : parts_(p) { normalize(); }
    explicit Partition(std::vector<int> p) : parts_(std::move(p)) { normalize(); }

    const std::vector<int>& parts() const { return parts_; }
    int length() const { return int(parts_.size()); }
    long size() const;
    bool empty() const { return parts_.empty(); }

    /// part i (1-indexed), zero beyond the length
    int part(int i) const {
        return (i >= 1 && i <= length()) ? parts_[i - 1] : 0;
    }

    Partition conjugate() const;
    bool contains(const Partition& mu) const;  // lambda_i >= mu_i for all i

    /// number of columns of odd height / rows of odd length
    int odd_columns() const;
    int odd_rows() const;

    bool operator==(const Partition& o) const { return parts_ == o.parts_; }
    bool operator!=(const Partition& o) const { return parts_ != o.parts_; }
    bool operator<(const Partition& o) const;  // by size, then lex descending

private:
    void normalize();
    std::vector<int> parts_;
};

struct PartitionHash {
    size_t operator()(const Partition& p) const;
};

/// Half-integer stored exactly as its doubled (odd) value.
struct HalfInt {
    std::int64_t twice = 1;  // value = twice/2, twice odd

    HalfInt() = default;
    explicit HalfInt(std::int64_t twice_) : twice(twice_) {
        if (twice % 2 == 0) throw domain_error("HalfInt: doubled value must be odd");
    }
    static HalfInt from_double(double v);
    double value() const { return 0.5 * double(twice); }

    bool operator==(const HalfInt& o) const { return twice == o.twice; }
    bool operator<(const HalfInt& o) const { return twice < o.twice; }
    bool operator>(const HalfInt& o) const { return twice > o.twice; }
};

/// Admissible subset S of Z' encoded by its finite deviations from Z'_{<0}:
/// S = (Z'_{<0} \ minus) u plus.
struct AdmissibleSet {
    std::vector<HalfInt> plus;   // positive elements of S, descending
    std::vector<HalfInt> minus;  // negative holes (Z'_{<0} \ S), descending
};

/// charge C(S) = |S_+| - |S_-| and doubled energy 2 H(S) = 2(sum S_+ - sum S_-)
struct ChargeEnergy {
    int charge = 0;
    std::int64_t energy_twice = 0;
    double energy() const { return 0.5 * double(energy_twice); }
};
ChargeEnergy charge_energy(const AdmissibleSet& s);

/// Maya bijection S(lambda,c) = {lambda_i - i + 1/2 + c} and its inverse.
AdmissibleSet maya(const Partition& lambda, int c);
std::pair<Partition, int> inverse_maya(const AdmissibleSet& s);

/// membership test k in S(lambda, c)
bool maya_contains(const Partition& lambda, int c, HalfInt k);

/// horizontal strip lambda >= mu interlaced: l1 >= m1 >= l2 >= m2 >= ...
bool interlace_h(const Partition& lambda, const Partition& mu);
/// vertical strip: lambda_i - mu_i in {0,1} for all i
bool interlace_v(const Partition& lambda, const Partition& mu);

/// skew Schur function s_{lambda/mu}(rho); 0 unless lambda contains mu.
/// Single/dual one-leaf specializations use the strip closed forms, general
/// rho the Jacobi-Trudi determinant with h_n extracted from H(rho;t).
double skew_schur(const Partition& lambda, const Partition& mu,
                  const Specialization& rho);

/// All partitions with |lambda| <= max_size (and optional length/part bounds),
/// ordered by size then lexicographically descending.  Guard: max_size <= 60.
void for_each_partition(int max_size, std::optional<int> max_len,
                        std::optional<int> max_part,
                        const std::function<void(const Partition&)>& fn);
std::vector<Partition> enumerate_partitions(int max_size,
                                            std::optional<int> max_len = {},
                                            std::optional<int> max_part = {});

/// Strip iterators shared by the transfer-matrix and Fock machinery.
/// "above" enumerates lambda with lambda/mu a strip and |lambda|-|mu| <= budget
/// (the callback receives the unused budget); "below" enumerates mu under lambda.
void for_h_strips_above(const Partition& mu, long budget,
                        const std::function<void(const Partition&, long)>& fn);
void for_h_strips_below(const Partition& mu,
                        const std::function<void(const Partition&)>& fn);
void for_v_strips_above(const Partition& mu, long budget,
                        const std::function<void(const Partition&, long)>& fn);
void for_v_strips_below(const Partition& mu,
                        const std::function<void(const Partition&)>& fn);

} // namespace fbschur

#endif
