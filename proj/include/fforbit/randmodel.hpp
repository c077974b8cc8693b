#pragma once

// The random-map model: collision-time survival probabilities, exact
// and asymptotic cycle-length distributions, the erfc limit density,
// ramification-intersection probabilities, Euler products over primes,
// and a Monte-Carlo sampler over genuinely random maps.

#include <cstdint>
#include <functional>
#include <vector>

#include "fforbit/ffield.hpp"

namespace fforbit {

// Complement of the Gaussian error function, (2/sqrt(pi)) * integral of
// exp(-t^2) over [x, inf). Input must be finite.
double erfc(double x);

// alpha(k) = Prob(tau > k-1) = prod_{j<k} (1 - j/n); exactly 0 once
// k - 1 >= n. Computed with a log-space product.
double survival_alpha(std::uint64_t k, std::uint64_t n);

// exp(-k(k+1)/(2n)), an upper bound for Prob(tau > k).
double tau_tail_bound(std::uint64_t k, std::uint64_t n);

inline constexpr std::uint64_t kExactPmfCap = 10'000'000;

// Prob(cycle length = ell) = (1/n) sum_{k>=ell} alpha(k), summed from
// the small tail terms upward. Requires n <= kExactPmfCap.
double cycle_pmf_exact(std::uint64_t ell, std::uint64_t n);

// sqrt(pi/(2n)) * erfc(ell / sqrt(2n)).
double cycle_pmf_asymptotic(std::uint64_t ell, std::uint64_t n);

// Exact below the cap, asymptotic above it.
double cycle_pmf(std::uint64_t ell, std::uint64_t n);

// Precomputed alpha and pmf tables for one set size.
class ModelDistribution {
public:
    static ModelDistribution build(std::uint64_t n);  // n <= kExactPmfCap

    std::uint64_t set_size() const { return n_; }
    double alpha(std::uint64_t k) const;  // k >= 1
    double pmf(std::uint64_t ell) const;  // ell >= 1
    std::size_t table_len() const { return alpha_.size(); }

    double pmf_sum() const;
    double mean_cycle_len() const;
    // sum_k k * (alpha(k) - alpha(k+1))
    double mean_collision_time() const;

private:
    std::uint64_t n_ = 0;
    std::vector<double> alpha_;  // alpha_[k-1] = alpha(k), until underflow
    std::vector<double> pmf_;
};

// Adaptive Simpson quadrature to absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol);

// Density g(s) = sqrt(pi) * erfc(s) of the normalized cycle length and
// its cdf (by quadrature). Negative arguments are rejected.
double normalized_density(double s);
double normalized_cdf(double t);

struct NormalizedCycleLaw {
    double density(double s) const { return normalized_density(s); }
    double cdf(double t) const { return normalized_cdf(t); }
    static double mean();  // sqrt(pi)/4
};

enum class IntersectionMode { exact_hybrid, asymptotic };

// Probability that the cycle misses the ramification hypersurface on
// A^d(F_p). Asymptotic mode (d >= 3 only) is sqrt(pi/2) * p^(1-d/2);
// exact-hybrid conditions on the cycle length, truncating at
// 20 p log p with the geometric tail below p^-d.
double empty_intersection_prob(Prime p, unsigned d, IntersectionMode mode);

// sqrt(pi) * integral of exp(-sqrt(2) t) erfc(t) over [0, inf), by
// quadrature, and its closed form sqrt(pi/2)(1 - e^(1/2) erfc(1/sqrt 2)).
double d2_constant();
double d2_constant_closed_form();

enum class EulerVerdict { diverges_to_zero, converges };

struct EulerProductResult {
    double partial_product = 1.0;
    EulerVerdict verdict = EulerVerdict::converges;
    std::uint64_t primes_used = 0;
    std::uint64_t primes_skipped = 0;  // factors that would be nonpositive
};

// prod over primes p <= p_max of (1 - sqrt(pi/2) p^(1-d/2)); d >= 3.
EulerProductResult euler_product(unsigned d, std::uint64_t p_max);

// Monte-Carlo over uniformly random maps on n points: per trial the map
// is sampled lazily, the walk starts at a fixed point and stops at the
// first collision.
struct SimStats {
    std::uint64_t n = 0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> lambda_counts;  // index = cycle length
    std::vector<std::uint64_t> tau_counts;     // index = collision time

    double lambda_pmf(std::uint64_t ell) const;
    double alpha_hat(std::uint64_t k) const;  // empirical Prob(tau > k-1)
    double mean_lambda() const;
    double mean_tau() const;
};

SimStats simulate_random_map(std::uint64_t n, std::uint64_t trials, std::uint64_t seed,
                             int jobs = 0);

}  // namespace fforbit
