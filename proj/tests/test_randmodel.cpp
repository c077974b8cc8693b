#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "fforbit/randmodel.hpp"
#include "fforbit/rng.hpp"

using namespace fforbit;

namespace {

// Quadrature oracle for erfc, independent of std::erfc: integrate the
// defining Gaussian integral.
double erfc_oracle(double x) {
    auto gauss = [](double t) { return std::exp(-t * t); };
    double upper = std::max(x, 0.0) + 9.0;
    return 2.0 / std::sqrt(M_PI) * adaptive_simpson(gauss, x, upper, 1e-14);
}

// Enumerate every map on {0..n-1} for tiny n and tabulate the cycle
// length of the orbit of 0.
std::vector<double> enumerate_cycle_pmf(std::uint64_t n) {
    std::vector<double> pmf(n + 1, 0.0);
    std::uint64_t total = 1;
    for (std::uint64_t i = 0; i < n; ++i) total *= n;
    for (std::uint64_t code = 0; code < total; ++code) {
        std::vector<std::uint64_t> f(n);
        std::uint64_t c = code;
        for (std::uint64_t i = 0; i < n; ++i) {
            f[i] = c % n;
            c /= n;
        }
        std::vector<int> visit(n, -1);
        std::uint64_t x = 0;
        int t = 0;
        while (visit[x] < 0) {
            visit[x] = t++;
            x = f[x];
        }
        std::uint64_t lambda = static_cast<std::uint64_t>(t - visit[x]);
        pmf[lambda] += 1.0;
    }
    for (auto& v : pmf) v /= static_cast<double>(total);
    return pmf;
}

}  // namespace

TEST_CASE("erfc examples") {
    CHECK(fforbit::erfc(0.0) == 1.0);
    CHECK(std::fabs(fforbit::erfc(1.0) - 0.15729920705028513) < 1e-13);
    CHECK(std::fabs(fforbit::erfc(1.0) - erfc_oracle(1.0)) < 1e-12);
    CHECK(std::fabs(fforbit::erfc(2.5) - erfc_oracle(2.5)) < 1e-12);
    for (double x : {0.25, 0.5, 1.0, 3.0, 5.5}) {
        CHECK(std::fabs(fforbit::erfc(-x) - (2.0 - fforbit::erfc(x))) < 1e-14);
    }
    CHECK(fforbit::erfc(30.0) >= 0.0);
    CHECK(fforbit::erfc(30.0) < 1e-12);
    CHECK_THROWS_AS(fforbit::erfc(std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST_CASE("survival_alpha") {
    CHECK(survival_alpha(1, 7) == 1.0);
    CHECK(survival_alpha(1, 1000000) == 1.0);
    CHECK(std::fabs(survival_alpha(3, 4) - 0.375) < 1e-15);  // (3/4)(2/4)
    CHECK(survival_alpha(5, 4) == 0.0);                      // k-1 >= n
    CHECK(survival_alpha(11, 10) == 0.0);
}

TEST_CASE("tau_tail_bound dominates the survival probabilities") {
    CHECK(tau_tail_bound(0, 50) == 1.0);
    for (std::uint64_t n : {10ull, 100ull, 1000ull, 10000ull}) {
        for (std::uint64_t k = 0; k <= n; ++k) {
            CHECK(survival_alpha(k + 1, n) <= tau_tail_bound(k, n) + 1e-15);
        }
    }
    CHECK(tau_tail_bound(100, 100) < 1e-20);
}

TEST_CASE("telescoping: Prob(tau = k) = alpha(k) k/n = alpha(k) - alpha(k+1)") {
    std::uint64_t n = 100;
    for (std::uint64_t k = 1; k <= n; ++k) {
        double lhs = survival_alpha(k, n) * static_cast<double>(k) / static_cast<double>(n);
        double rhs = survival_alpha(k, n) - survival_alpha(k + 1, n);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("exact cycle pmf matches full enumeration for n = 2 and 3") {
    auto pmf2 = enumerate_cycle_pmf(2);
    CHECK(pmf2[1] == 0.75);
    CHECK(pmf2[2] == 0.25);
    CHECK(std::fabs(cycle_pmf_exact(1, 2) - 0.75) < 1e-15);
    CHECK(std::fabs(cycle_pmf_exact(2, 2) - 0.25) < 1e-15);

    auto pmf3 = enumerate_cycle_pmf(3);
    for (std::uint64_t ell = 1; ell <= 3; ++ell)
        CHECK(cycle_pmf_exact(ell, 3) == doctest::Approx(pmf3[ell]).epsilon(1e-12));
}

TEST_CASE("exact cycle pmf sums to one") {
    for (std::uint64_t n : {2ull, 10ull, 100ull, 1000ull, 10000ull}) {
        auto md = ModelDistribution::build(n);
        CHECK(std::fabs(md.pmf_sum() - 1.0) < 1e-9);
        long double direct = 0;
        for (std::uint64_t ell = 1; ell <= n; ++ell) direct += cycle_pmf_exact(ell, n);
        CHECK(std::fabs(static_cast<double>(direct) - 1.0) < 1e-9);
    }
    CHECK_THROWS_AS(cycle_pmf_exact(1, kExactPmfCap + 1), std::domain_error);
}

TEST_CASE("ModelDistribution tables agree with the standalone functions") {
    auto md = ModelDistribution::build(500);
    for (std::uint64_t k = 1; k <= 40; ++k)
        CHECK(md.alpha(k) == doctest::Approx(survival_alpha(k, 500)).epsilon(1e-12));
    for (std::uint64_t ell : {1ull, 2ull, 10ull, 100ull, 499ull})
        CHECK(md.pmf(ell) == doctest::Approx(cycle_pmf_exact(ell, 500)).epsilon(1e-12));
}

TEST_CASE("asymptotic pmf tracks the exact sum") {
    CHECK(std::fabs(cycle_pmf_asymptotic(1, 1000) -
                    std::sqrt(M_PI / 2000.0) * fforbit::erfc(1.0 / std::sqrt(2000.0))) < 1e-15);
    for (std::uint64_t ell : {1ull, 10ull, 100ull, 1000ull}) {
        double ex = cycle_pmf_exact(ell, 1000000);
        double as = cycle_pmf_asymptotic(ell, 1000000);
        CHECK(std::fabs(as - ex) / ex < 0.02);
    }
    double prev = cycle_pmf_asymptotic(1, 500);
    for (std::uint64_t ell = 2; ell < 60; ++ell) {
        double cur = cycle_pmf_asymptotic(ell, 500);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("normalized density and cdf") {
    CHECK(normalized_density(0.0) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-15));
    CHECK(normalized_density(1.0) == doctest::Approx(0.2788055853).epsilon(1e-9));
    CHECK_THROWS_AS(normalized_density(-0.1), std::domain_error);
    CHECK_THROWS_AS(normalized_cdf(-1.0), std::domain_error);

    // total mass and mean by quadrature
    CHECK(std::fabs(normalized_cdf(8.0) - 1.0) < 1e-9);
    double mean = adaptive_simpson([](double s) { return s * normalized_density(s); }, 0.0, 10.0,
                                   1e-11);
    CHECK(std::fabs(mean - std::sqrt(M_PI) / 4.0) < 1e-9);
    CHECK(std::fabs(NormalizedCycleLaw::mean() - 0.44311346272637897) < 1e-15);

    // closed-form oracle: G(t) = sqrt(pi) t erfc(t) + 1 - exp(-t^2)
    for (double t : {0.1, 0.5, 1.0, 1.7, 3.0}) {
        double closed = std::sqrt(M_PI) * t * std::erfc(t) + 1.0 - std::exp(-t * t);
        CHECK(std::fabs(normalized_cdf(t) - closed) < 1e-8);
    }
    // monotone
    CHECK(normalized_cdf(0.5) < normalized_cdf(1.0));
    CHECK(normalized_cdf(1.0) < normalized_cdf(2.0));
}

TEST_CASE("normalized cdf is the scaling limit of the exact pmf") {
    std::uint64_t n = 1000000;
    auto md = ModelDistribution::build(n);
    double root = std::sqrt(2.0 * static_cast<double>(n));
    for (double t : {0.5, 1.0, 2.0}) {
        long double acc = 0;
        std::uint64_t cut = static_cast<std::uint64_t>(t * root);
        for (std::uint64_t ell = 1; ell <= cut; ++ell) acc += md.pmf(ell);
        double cdf = normalized_cdf(t);
        CHECK(std::fabs(static_cast<double>(acc) - cdf) / cdf < 0.01);
    }
}

TEST_CASE("empty intersection probability") {
    // direct formula evaluation
    CHECK(empty_intersection_prob(Prime(10007), 3, IntersectionMode::asymptotic) ==
          doctest::Approx(std::sqrt(M_PI / 2.0) / std::sqrt(10007.0)).epsilon(1e-12));
    CHECK(std::fabs(empty_intersection_prob(Prime(10007), 3, IntersectionMode::asymptotic) -
                    0.012529) < 1e-5);

    // the conditioned sum sits below the asymptotic value by roughly
    // sqrt(2/pi)/sqrt(p) + 1/p: about 8.7% at p=101, 2.6% at p=1009
    {
        double ex = empty_intersection_prob(Prime(101), 3, IntersectionMode::exact_hybrid);
        double as = empty_intersection_prob(Prime(101), 3, IntersectionMode::asymptotic);
        double rel = std::fabs(ex - as) / as;
        CHECK(rel == doctest::Approx(0.0872).epsilon(0.05));
        CHECK(rel < 0.10);
    }
    {
        double ex = empty_intersection_prob(Prime(1009), 3, IntersectionMode::exact_hybrid);
        double as = empty_intersection_prob(Prime(1009), 3, IntersectionMode::asymptotic);
        CHECK(std::fabs(ex - as) / as <= 0.05);
    }

    // d = 1: the cycle misses the O(1)-sized locus almost surely
    CHECK(empty_intersection_prob(Prime(10007), 1, IntersectionMode::exact_hybrid) >= 0.9);

    CHECK_THROWS_AS(empty_intersection_prob(Prime(101), 2, IntersectionMode::asymptotic),
                    std::invalid_argument);
}

TEST_CASE("d2 constant") {
    CHECK(std::fabs(d2_constant() - 0.598) <= 1e-3);
    CHECK(std::fabs(d2_constant() - d2_constant_closed_form()) <= 1e-6);
    // the complement is the d=2 plateau height
    CHECK(1.0 - d2_constant() == doctest::Approx(0.4).epsilon(0.02));
}

TEST_CASE("euler products") {
    auto e3 = euler_product(3, 10000);
    CHECK(e3.partial_product < 1e-6);
    CHECK(e3.verdict == EulerVerdict::diverges_to_zero);
    CHECK(euler_product(4, 100).verdict == EulerVerdict::diverges_to_zero);

    auto e5a = euler_product(5, 100000);
    auto e5b = euler_product(5, 1000000);
    CHECK(e5a.verdict == EulerVerdict::converges);
    CHECK(std::fabs(e5a.partial_product - e5b.partial_product) < 0.01);
    CHECK(e5b.partial_product > 0.0);

    CHECK_THROWS_AS(euler_product(2, 100), std::invalid_argument);
    // no factor goes nonpositive for d >= 3
    CHECK(e3.primes_skipped == 0);
}

TEST_CASE("random-map simulation against the exact model") {
    auto sim = simulate_random_map(2, 100000, 42);
    CHECK(std::fabs(sim.lambda_pmf(1) - 0.75) < 0.005);
    CHECK(std::fabs(sim.lambda_pmf(2) - 0.25) < 0.005);

    auto sim1000 = simulate_random_map(1000, 20000, 43);
    auto md = ModelDistribution::build(1000);
    double model_mean = md.mean_cycle_len();
    // 3 standard errors of the sample mean; sd(lambda) bounded by
    // sqrt(E lambda^2) = sqrt(2n/3)
    double se = std::sqrt(2.0 * 1000.0 / 3.0) / std::sqrt(20000.0);
    CHECK(std::fabs(sim1000.mean_lambda() - model_mean) < 3 * se);

    // empirical survival is non-increasing
    double prev = 1.0;
    for (std::uint64_t k = 1; k < 80; ++k) {
        double cur = sim1000.alpha_hat(k);
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }

    // determinism: identical seeds give identical tallies
    auto again = simulate_random_map(2, 1000, 42);
    auto once = simulate_random_map(2, 1000, 42);
    CHECK(again.lambda_counts == once.lambda_counts);
    CHECK(again.tau_counts == once.tau_counts);
}

TEST_CASE("simulated pmf within three standard errors at spot values") {
    std::uint64_t trials = 100000;
    auto sim = simulate_random_map(1000, trials, 4242);
    auto md = ModelDistribution::build(1000);
    for (std::uint64_t ell : {1ull, 10ull, 30ull}) {
        double p = md.pmf(ell);
        double se = std::sqrt(p * (1 - p) / static_cast<double>(trials));
        CHECK(std::fabs(sim.lambda_pmf(ell) - p) < 3 * se);
    }
}
