#include "fforbit/randmodel.hpp"

#include <cmath>
#include <stdexcept>

#include "fforbit/orbit.hpp"
#include "fforbit/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fforbit {

namespace {
constexpr double kAlphaUnderflow = 1e-320;
const double kSqrtPi = std::sqrt(M_PI);
}  // namespace

double erfc(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("erfc requires a finite argument");
    return std::erfc(x);
}

double survival_alpha(std::uint64_t k, std::uint64_t n) {
    if (k < 1 || n < 1) throw std::invalid_argument("survival_alpha requires k >= 1, n >= 1");
    if (k - 1 >= n) return 0.0;
    long double logacc = 0.0L;
    const long double nn = static_cast<long double>(n);
    for (std::uint64_t j = 1; j < k; ++j) {
        logacc += std::log1p(-static_cast<long double>(j) / nn);
        if (logacc < -745.0L) return 0.0;
    }
    return static_cast<double>(std::exp(logacc));
}

double tau_tail_bound(std::uint64_t k, std::uint64_t n) {
    if (n < 1) throw std::invalid_argument("tau_tail_bound requires n >= 1");
    long double e = -(static_cast<long double>(k) * (static_cast<long double>(k) + 1.0L)) /
                    (2.0L * static_cast<long double>(n));
    return static_cast<double>(std::exp(e));
}

namespace {

// alpha(k) for k = ell..K as doubles, where K stops at n or underflow.
std::vector<double> alpha_range(std::uint64_t ell, std::uint64_t n) {
    std::vector<double> out;
    long double logacc = 0.0L;
    const long double nn = static_cast<long double>(n);
    std::uint64_t k = 1;
    for (; k < ell; ++k) {
        logacc += std::log1p(-static_cast<long double>(k) / nn);
        if (logacc < -745.0L) return out;  // everything from ell on underflows
        if (k >= n) return out;
    }
    for (; k <= n; ++k) {
        // invariant: logacc = log alpha(k)
        long double a = std::exp(logacc);
        if (a < kAlphaUnderflow) break;
        out.push_back(static_cast<double>(a));
        logacc += std::log1p(-static_cast<long double>(k) / nn);
    }
    return out;
}

}  // namespace

double cycle_pmf_exact(std::uint64_t ell, std::uint64_t n) {
    if (n < 1 || ell < 1) throw std::invalid_argument("cycle_pmf_exact requires ell, n >= 1");
    if (n > kExactPmfCap)
        throw std::domain_error("set size above exact cap; use cycle_pmf_asymptotic");
    if (ell > n) return 0.0;
    auto alphas = alpha_range(ell, n);
    long double acc = 0.0L;
    for (std::size_t i = alphas.size(); i-- > 0;) acc += alphas[i];
    return static_cast<double>(acc / static_cast<long double>(n));
}

double cycle_pmf_asymptotic(std::uint64_t ell, std::uint64_t n) {
    if (n < 1 || ell < 1) throw std::invalid_argument("cycle_pmf_asymptotic requires ell, n >= 1");
    double root = std::sqrt(2.0 * static_cast<double>(n));
    return std::sqrt(M_PI / (2.0 * static_cast<double>(n))) * std::erfc(static_cast<double>(ell) / root);
}

double cycle_pmf(std::uint64_t ell, std::uint64_t n) {
    return n <= kExactPmfCap ? cycle_pmf_exact(ell, n) : cycle_pmf_asymptotic(ell, n);
}

ModelDistribution ModelDistribution::build(std::uint64_t n) {
    if (n < 1 || n > kExactPmfCap)
        throw std::domain_error("ModelDistribution requires 1 <= n <= exact cap");
    ModelDistribution md;
    md.n_ = n;
    md.alpha_ = alpha_range(1, n);
    md.pmf_.assign(md.alpha_.size(), 0.0);
    long double suffix = 0.0L;
    for (std::size_t i = md.alpha_.size(); i-- > 0;) {
        suffix += md.alpha_[i];
        md.pmf_[i] = static_cast<double>(suffix / static_cast<long double>(n));
    }
    return md;
}

double ModelDistribution::alpha(std::uint64_t k) const {
    if (k < 1) throw std::invalid_argument("alpha index starts at 1");
    return k <= alpha_.size() ? alpha_[k - 1] : 0.0;
}

double ModelDistribution::pmf(std::uint64_t ell) const {
    if (ell < 1) throw std::invalid_argument("pmf index starts at 1");
    return ell <= pmf_.size() ? pmf_[ell - 1] : 0.0;
}

double ModelDistribution::pmf_sum() const {
    long double s = 0.0L;
    for (std::size_t i = pmf_.size(); i-- > 0;) s += pmf_[i];
    return static_cast<double>(s);
}

double ModelDistribution::mean_cycle_len() const {
    long double s = 0.0L;
    for (std::size_t i = pmf_.size(); i-- > 0;)
        s += static_cast<long double>(i + 1) * pmf_[i];
    return static_cast<double>(s);
}

double ModelDistribution::mean_collision_time() const {
    long double s = 0.0L;
    for (std::size_t k = alpha_.size(); k-- > 0;) {
        double next = (k + 1 < alpha_.size()) ? alpha_[k + 1] : 0.0;
        s += static_cast<long double>(k + 1) * (alpha_[k] - next);
    }
    return static_cast<double>(s);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    struct Impl {
        const std::function<double(double)>& f;
        double recurse(double a, double fa, double b, double fb, double m, double fm,
                       double whole, double tol, int depth) const {
            double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            double flm = f(lm), frm = f(rm);
            double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            double delta = left + right - whole;
            if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
                return left + right + delta / 15.0;
            return recurse(a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
                   recurse(m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
        }
    };
    double m = 0.5 * (a + b);
    double fa = f(a), fb = f(b), fm = f(m);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return Impl{f}.recurse(a, fa, b, fb, m, fm, whole, tol, 48);
}

double normalized_density(double s) {
    if (s < 0) throw std::domain_error("normalized density is supported on [0, inf)");
    return kSqrtPi * std::erfc(s);
}

double normalized_cdf(double t) {
    if (t < 0) throw std::domain_error("normalized cdf is supported on [0, inf)");
    if (t == 0) return 0.0;
    // beyond ~7 the remaining mass is below 1e-22
    double upper = std::min(t, 8.0);
    double v = adaptive_simpson(normalized_density, 0.0, upper, 1e-10);
    return std::min(v, 1.0);
}

double NormalizedCycleLaw::mean() { return kSqrtPi / 4.0; }

double empty_intersection_prob(Prime p, unsigned d, IntersectionMode mode) {
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
    const double pd = static_cast<double>(p.value());
    if (mode == IntersectionMode::asymptotic) {
        if (d < 3) throw std::invalid_argument("asymptotic intersection formula requires d >= 3");
        return std::sqrt(M_PI / 2.0) * std::pow(pd, 1.0 - d / 2.0);
    }
    // exact-hybrid: sum (1 - 1/p)^ell * pmf(ell, p^d) for ell up to
    // 20 p log p; the neglected tail is below (1-1/p)^(20 p log p) ~ p^-20.
    long double n_exact = 1.0L;
    bool exact = true;
    std::uint64_t n_int = 1;
    for (unsigned i = 0; i < d; ++i) {
        n_exact *= pd;
        if (exact && n_int <= kExactPmfCap / p.value()) n_int *= p.value();
        else exact = false;
    }
    if (n_int > kExactPmfCap) exact = false;

    std::uint64_t ell_max = static_cast<std::uint64_t>(20.0 * pd * std::log(pd)) + 1;
    const long double q = 1.0L - 1.0L / static_cast<long double>(pd);
    long double factor = q;
    long double acc = 0.0L;
    if (exact) {
        auto md = ModelDistribution::build(n_int);
        std::uint64_t stop = std::min<std::uint64_t>(ell_max, md.table_len());
        for (std::uint64_t ell = 1; ell <= stop; ++ell) {
            acc += factor * md.pmf(ell);
            factor *= q;
        }
    } else {
        double n_dbl = static_cast<double>(n_exact);
        double scale = std::sqrt(M_PI / (2.0 * n_dbl));
        double root = std::sqrt(2.0 * n_dbl);
        for (std::uint64_t ell = 1; ell <= ell_max; ++ell) {
            long double pmf = scale * std::erfc(static_cast<double>(ell) / root);
            acc += factor * pmf;
            factor *= q;
            if (factor < 1e-25L) break;  // geometric tail certified negligible
        }
    }
    return static_cast<double>(acc);
}

double d2_constant() {
    auto integrand = [](double t) { return std::exp(-std::sqrt(2.0) * t) * std::erfc(t); };
    // e^(-sqrt2 * 30) < 4e-19 and erfc <= 1: the truncated tail is
    // far below the tolerance.
    return kSqrtPi * adaptive_simpson(integrand, 0.0, 30.0, 1e-9);
}

double d2_constant_closed_form() {
    return std::sqrt(M_PI / 2.0) * (1.0 - std::exp(0.5) * std::erfc(1.0 / std::sqrt(2.0)));
}

EulerProductResult euler_product(unsigned d, std::uint64_t p_max) {
    if (d < 3) throw std::invalid_argument("Euler product requires d >= 3");
    EulerProductResult res;
    res.verdict = (d <= 4) ? EulerVerdict::diverges_to_zero : EulerVerdict::converges;
    const double c = std::sqrt(M_PI / 2.0);
    long double log_acc = 0.0L;
    bool vanished = false;
    for (const Prime& p : primes_below(p_max + 1)) {
        double factor = 1.0 - c * std::pow(static_cast<double>(p.value()), 1.0 - d / 2.0);
        if (factor <= 0.0) {
            ++res.primes_skipped;
            continue;
        }
        log_acc += std::log(static_cast<long double>(factor));
        ++res.primes_used;
        if (log_acc < -745.0L) vanished = true;
    }
    res.partial_product = vanished ? 0.0 : static_cast<double>(std::exp(log_acc));
    return res;
}

double SimStats::lambda_pmf(std::uint64_t ell) const {
    if (trials == 0 || ell >= lambda_counts.size()) return 0.0;
    return static_cast<double>(lambda_counts[ell]) / static_cast<double>(trials);
}

double SimStats::alpha_hat(std::uint64_t k) const {
    if (trials == 0) return 0.0;
    // tau > k-1
    std::uint64_t count = 0;
    for (std::uint64_t t = k; t < tau_counts.size(); ++t) count += tau_counts[t];
    return static_cast<double>(count) / static_cast<double>(trials);
}

double SimStats::mean_lambda() const {
    long double s = 0.0L;
    for (std::size_t i = 0; i < lambda_counts.size(); ++i)
        s += static_cast<long double>(i) * lambda_counts[i];
    return trials ? static_cast<double>(s / trials) : 0.0;
}

double SimStats::mean_tau() const {
    long double s = 0.0L;
    for (std::size_t i = 0; i < tau_counts.size(); ++i)
        s += static_cast<long double>(i) * tau_counts[i];
    return trials ? static_cast<double>(s / trials) : 0.0;
}

namespace {

struct TrialWorkspace {
    std::vector<std::uint32_t> image;      // lazily sampled map, kUnset = not drawn yet
    std::vector<std::uint32_t> visit;      // first-visit index, kUnset = unvisited
    std::vector<std::uint32_t> touched;    // states to reset between trials
    static constexpr std::uint32_t kUnset = ~0u;

    explicit TrialWorkspace(std::uint64_t n)
        : image(n, kUnset), visit(n, kUnset) {}

    void reset() {
        for (auto s : touched) {
            image[s] = kUnset;
            visit[s] = kUnset;
        }
        touched.clear();
    }
};

OrbitSummary run_trial(std::uint64_t n, rng::Stream& stream, TrialWorkspace& ws) {
    std::uint32_t x = 0;  // fixed starting point
    std::uint64_t t = 0;
    while (true) {
        if (ws.visit[x] != TrialWorkspace::kUnset) {
            std::uint64_t s = ws.visit[x];
            ws.reset();
            return OrbitSummary{s, t - s, t};
        }
        ws.visit[x] = static_cast<std::uint32_t>(t);
        ws.touched.push_back(x);
        if (ws.image[x] == TrialWorkspace::kUnset)
            ws.image[x] = static_cast<std::uint32_t>(stream.below(n));
        x = ws.image[x];
        ++t;
    }
}

}  // namespace

SimStats simulate_random_map(std::uint64_t n, std::uint64_t trials, std::uint64_t seed, int jobs) {
    if (n < 1) throw std::invalid_argument("set size must be >= 1");
    if (n > 20'000'000) throw std::invalid_argument("set size above simulation memory budget");
    SimStats stats;
    stats.n = n;
    stats.trials = trials;
    stats.seed = seed;

    int threads = 1;
#ifdef _OPENMP
    threads = jobs > 0 ? jobs : omp_get_max_threads();
#else
    (void)jobs;
#endif
    std::vector<std::vector<std::uint64_t>> lam_part(threads), tau_part(threads);

#ifdef _OPENMP
#pragma omp parallel num_threads(threads)
#endif
    {
        int tid = 0;
#ifdef _OPENMP
        tid = omp_get_thread_num();
#endif
        TrialWorkspace ws(n);
        auto& lam = lam_part[tid];
        auto& tau = tau_part[tid];
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
        for (std::int64_t t = 0; t < static_cast<std::int64_t>(trials); ++t) {
            rng::Stream stream(seed, static_cast<std::uint64_t>(t));
            OrbitSummary s = run_trial(n, stream, ws);
            if (s.cycle_len >= lam.size()) lam.resize(s.cycle_len + 1, 0);
            if (s.collision_time >= tau.size()) tau.resize(s.collision_time + 1, 0);
            ++lam[s.cycle_len];
            ++tau[s.collision_time];
        }
    }

    for (int t = 0; t < threads; ++t) {
        if (lam_part[t].size() > stats.lambda_counts.size())
            stats.lambda_counts.resize(lam_part[t].size(), 0);
        for (std::size_t i = 0; i < lam_part[t].size(); ++i) stats.lambda_counts[i] += lam_part[t][i];
        if (tau_part[t].size() > stats.tau_counts.size())
            stats.tau_counts.resize(tau_part[t].size(), 0);
        for (std::size_t i = 0; i < tau_part[t].size(); ++i) stats.tau_counts[i] += tau_part[t][i];
    }
    return stats;
}

}  // namespace fforbit
