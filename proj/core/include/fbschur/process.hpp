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

#ifndef FBSCHUR_PROCESS_HPP
#define FBSCHUR_PROCESS_HPP

#include <cstdint>
#include <vector>

#include "fbschur/partitions.hpp"
#include "fbschur/specialfn.hpp"

namespace fbschur {

enum class BoundaryWeight { plain, odd_columns, odd_rows };

/// The free boundary Schur process mu0 < lam1 > mu1 < ... < lamN > muN with
/// weight u^|mu0| v^|muN| prod s(rho+) s(rho-), optionally times alpha^{oc}
/// or beta^{or} of muN.
struct ProcessSpec {
    int N = 0;
    double u = 0.0, v = 0.0;
    std::vector<Specialization> rho_plus, rho_minus;  // N entries each
    BoundaryWeight variant = BoundaryWeight::plain;
    double variant_param = 1.0;  // alpha or beta

    void validate() const;

    /// rho_k^- with the variant absorbed into the last specialization
    /// (odd columns: add a single variable alpha*v and subtract v; odd rows:
    /// add a dual variable beta*v and subtract a dual -v).
    Specialization effective_rho_minus(int k) const;

    /// analyticity radius: min over all leaves of 1/|x| (> 1 required)
    double radius() const;
};

struct SeqConfig {
    std::vector<Partition> mus;      // N+1
    std::vector<Partition> lambdas;  // N
    bool valid_chain() const;
};

/// finite window of the point process S(lambda): points with ordinate > floor
struct PointConfig {
    std::vector<std::pair<int, HalfInt>> points;
    HalfInt floor{-1};  // every ordinate <= floor at occupied columns is implied
};
PointConfig point_config(const SeqConfig& cfg, HalfInt floor);

/// weight of a configuration; 0 if the containment chain is violated
double weight(const ProcessSpec& spec, const SeqConfig& cfg);

/// true if the list is an ascending chain of horizontal strips
bool validate_h_chain(const std::vector<Partition>& chain);
/// alternating <, <' chain starting with a horizontal step
bool validate_hv_chain(const std::vector<Partition>& chain);

/// closed-form partition function (infinite product truncated at tol)
double partition_function_closed(const ProcessSpec& spec, double tol = 1e-13);

struct BruteForceResult {
    double value = 0.0;
    double tail_bound = 0.0;
};

/// sum of weights over all chains with every partition of size <= cutoff,
/// via leafwise strip transfers; tail bound from geometric domination.
BruteForceResult partition_function_bruteforce(const ProcessSpec& spec, int cutoff);

/// probability that the point process contains U, by brute force
double correlation_bruteforce(const ProcessSpec& spec,
                              const std::vector<std::pair<int, HalfInt>>& u_set,
                              int cutoff);

/// shift-mixed correlation: average of correlation_bruteforce over the even
/// shift 2 D_t with P(D_t = d) prop to t^{2d} (uv)^{2d^2}
double correlation_bruteforce_shifted(const ProcessSpec& spec,
                                      const std::vector<std::pair<int, HalfInt>>& u_set,
                                      double t, int cutoff);

// ---------------------------------------------------------------------------
// symmetric last passage percolation
// ---------------------------------------------------------------------------

/// symmetric nonnegative integer matrix, 1-indexed accessors
struct SymMatrix {
    int n = 0;
    std::vector<long> a;  // row-major n x n
    long at(int r, int t) const { return a[size_t(r - 1) * n + (t - 1)]; }
    long& at(int r, int t) { return a[size_t(r - 1) * n + (t - 1)]; }
};

/// growth surface lam^{r,t}, r,t in [1, n+1]
struct GrowthSurface {
    int n = 0;
    std::vector<Partition> lam;  // (n+1) x (n+1)
    const Partition& at(int r, int t) const {
        return lam[size_t(r - 1) * (n + 1) + (t - 1)];
    }
    Partition& at(int r, int t) { return lam[size_t(r - 1) * (n + 1) + (t - 1)]; }
    /// L_{(1,1)->(m,n)} = lam^{m+1,n+1}_1
    long passage_time(int m, int nn) const { return at(m + 1, nn + 1).part(1); }
};

/// local growth rule: nu_1 = max(lam_1, mu_1) + k,
/// nu_i = max(lam_i, mu_i) + min(lam_{i-1}, mu_{i-1}) - kap_{i-1}
Partition growth_step(const Partition& kap, const Partition& lam,
                      const Partition& mu, long k);

/// run the growth rule over the full matrix; checks the volume identity
/// |nu| + |kap| = |lam| + |mu| + k at every cell
GrowthSurface lpp_growth(const SymMatrix& omega);

/// direct dynamic program L = max(L_left, L_down) + omega (independent oracle)
long lpp_dp(const SymMatrix& omega);

/// draw symmetric geometric weights: off-diagonal g(a_r a_t), diagonal g(alpha a_r)
SymMatrix sample_lpp_matrix(const std::vector<double>& a, double alpha,
                            std::uint64_t seed, std::uint64_t stream = 0);

struct LppSample {
    SymMatrix omega;
    GrowthSurface surface;
};
LppSample sample_lpp(const std::vector<double>& a, double alpha, int n,
                     std::uint64_t seed, std::uint64_t stream = 0);

/// fast path for Monte Carlo: only the passage time, via the DP recursion
long sample_lpp_time_dp(const std::vector<double>& a, double alpha, int n,
                        std::uint64_t seed, std::uint64_t stream);

// ---------------------------------------------------------------------------
// exact sampler for small ascending (H / HV) chains
// ---------------------------------------------------------------------------

struct HvBounds {
    int max_part = 8;
    int max_len = 8;
    int n_steps = 0;  // chain length; required when x is derived from q_volume
};

/// exact sequential sampling of the ascending chain under box bounds.  Step i
/// (1-indexed) is a horizontal strip for odd i and a vertical strip for even i
/// when hv = true; all horizontal when hv = false.  If x is empty it is
/// built from q_volume via x_{2k-1} = x_{2k} = q^{M-k+1} (n_steps = 2M).
SeqConfig sample_hv_exact(std::vector<double> x, double q_volume,
                          const HvBounds& bounds, bool hv, std::uint64_t seed,
                          std::uint64_t stream = 0);

} // namespace fbschur

#endif
