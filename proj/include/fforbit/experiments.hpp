#pragma once

// Experiment drivers: per-prime cycle sweeps with ramification-locus
// membership, histogram and KS goodness-of-fit against the model law,
// seeded random quadratic map generation, ramification-meet and S(N)
// curves, orbit-avoidance and periodicity density scans, Newton maps,
// and the CSV / metadata formats every driver writes.
//
// Every sweep has an OpenMP kernel and a serial reference kernel with
// identical output; per-prime slots are written by index so the result
// is bit-identical for any worker count.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fforbit/dynmap.hpp"
#include "fforbit/orbit.hpp"
#include "fforbit/randmodel.hpp"

namespace fforbit {

// ---------------------------------------------------------------- maps

using AnyMap = std::variant<IntegerUniMap, IntegerPolySystem>;

unsigned map_dimension(const AnyMap& m);

// Text format (whitespace separated, '#' starts a comment):
//   dim <d>
//   num <c0> <c1> ...        univariate rational map, coefficients by
//   den <c0> <c1> ...        ascending power; den defaults to 1
// or
//   dim <d>
//   deg <D>
//   f <c...>                 one dense coefficient row per component in
//                            graded-lex monomial order
AnyMap load_map_file(const std::filesystem::path& path);
AnyMap parse_map_text(const std::string& text, const std::string& origin);
void write_uni_map_file(const std::filesystem::path& path, const IntegerUniMap& map);

// Embedded named maps: "dim1", "dim3", "x3plus1".
AnyMap builtin_map(const std::string& name);
std::vector<std::string> builtin_map_names();

// FNV-1a over the canonical serialization (stable across formatting).
std::uint64_t map_hash(const AnyMap& m);

struct map_parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --------------------------------------------------------------- sweep

struct SweepConfig {
    AnyMap map;
    std::vector<std::int64_t> x0;  // start point, one entry per dimension
    std::uint64_t pmax = 100'000;  // sweep primes p < pmax
    std::uint64_t budget = kDefaultOrbitBudget;
    std::uint64_t seed = 1;  // drives the verification post-pass sample
    int jobs = 0;            // 0 = all hardware threads
};

struct ResultRow {
    std::uint32_t p = 0;
    bool good = false;
    std::uint64_t mu = 0;
    std::uint64_t lambda = 0;
    std::uint64_t tau = 0;
    double ctilde = 0.0;  // lambda / sqrt(2 p^d)
    bool meets_ram = false;
    bool censored = false;
    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

std::vector<ResultRow> run_cycle_sweep(const SweepConfig& config);
std::vector<ResultRow> run_cycle_sweep_serial(const SweepConfig& config);

// ---------------------------------------------------------- statistics

struct HistogramRow {
    double bin_center = 0.0;
    double empirical = 0.0;
    double model = 0.0;
};

// Density-normalized histogram (total area 1) with the model density
// sampled at bin centers. Throws on empty input or bin_width <= 0.
std::vector<HistogramRow> histogram(std::span<const double> values, double bin_width,
                                    const NormalizedCycleLaw& law);

// Sup distance between the empirical CDF of `values` and `cdf`.
double ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf);

// ------------------------------------------- random quadratic systems

struct RandomMapSpec {
    unsigned dim = 3;
    std::int64_t coeff_bound = 100;  // coefficients uniform on [-B, B]
    std::uint64_t seed = 1;
};

// Deterministic in (spec.seed, index); resamples until the Jacobian
// determinant is non-constant, failing after 100 degenerate draws.
IntegerPolySystem gen_random_quadratic(const RandomMapSpec& spec, std::uint64_t index);

struct RamMeetRow {
    std::uint32_t p = 0;
    double fraction = 0.0;        // share of maps whose cycle meets R_p
    std::uint32_t maps_counted = 0;
    std::uint32_t censored = 0;
    friend bool operator==(const RamMeetRow&, const RamMeetRow&) = default;
};

// Orbits of the origin for `map_count` random quadratic maps at each
// listed prime; fraction of maps whose cycle meets the ramification
// locus.
std::vector<RamMeetRow> ram_meet_probability(unsigned d, std::span<const Prime> primes,
                                             std::uint64_t map_count, std::int64_t coeff_bound,
                                             std::uint64_t seed, int jobs = 0,
                                             std::uint64_t budget = kDefaultOrbitBudget);
std::vector<RamMeetRow> ram_meet_probability_serial(unsigned d, std::span<const Prime> primes,
                                                    std::uint64_t map_count, std::int64_t coeff_bound,
                                                    std::uint64_t seed,
                                                    std::uint64_t budget = kDefaultOrbitBudget);

struct SnCurveRow {
    std::uint32_t p = 0;   // N column: the largest prime included
    double s_n = 0.0;      // cumulated empty-intersection proportion
    double model = 0.0;    // cumulated sqrt(pi/(2p))
    friend bool operator==(const SnCurveRow&, const SnCurveRow&) = default;
};

// d = 3 protocol: estimate Prob(cycle misses R_p) per prime over a
// collection of random maps, cumulate into S(N) next to the model sum.
std::vector<SnCurveRow> sn_curve(std::uint64_t map_count, std::size_t prime_count,
                                 std::int64_t coeff_bound, std::uint64_t seed, int jobs = 0,
                                 std::uint64_t budget = kDefaultOrbitBudget);
std::vector<SnCurveRow> sn_curve_serial(std::uint64_t map_count, std::size_t prime_count,
                                        std::int64_t coeff_bound, std::uint64_t seed,
                                        std::uint64_t budget = kDefaultOrbitBudget);

// ----------------------------------------- avoidance and periodicity

struct RationalPoint {
    std::int64_t num = 0;
    std::int64_t den = 1;  // den == 0 encodes the point at infinity
};

RationalPoint parse_rational(const std::string& text);
ProjPoint reduce_point(const RationalPoint& q, Prime p);

struct AvoidanceRow {
    std::uint32_t p = 0;
    std::uint8_t residue_class = 0;  // p mod class_mod
    bool good = false;
    bool hit = false;
    std::int64_t hit_index = -1;
    bool censored = false;
};

struct AvoidanceReport {
    std::vector<AvoidanceRow> rows;
    unsigned class_mod = 3;
    std::uint64_t good_count = 0;
    std::uint64_t hit_count = 0;
    std::uint64_t censored_count = 0;
    std::vector<std::uint64_t> class_good;  // size class_mod
    std::vector<std::uint64_t> class_hit;

    double density() const {
        return good_count ? static_cast<double>(hit_count) / static_cast<double>(good_count) : 0.0;
    }
    double class_density(unsigned r) const {
        return class_good[r] ? static_cast<double>(class_hit[r]) / static_cast<double>(class_good[r])
                             : 0.0;
    }
};

// For each good prime p < pmax, is alpha in the forward orbit of beta
// under the reduced map; densities overall and per residue class.
AvoidanceReport avoidance_scan(const IntegerUniMap& map, const RationalPoint& alpha,
                               const RationalPoint& beta, std::uint64_t pmax,
                               unsigned class_mod = 3, int jobs = 0,
                               std::uint64_t budget = kDefaultOrbitBudget);

struct PeriodicityRow {
    std::uint32_t p = 0;
    bool good = false;
    bool periodic = false;  // preperiod 0 for the orbit of alpha
    bool censored = false;
};

struct PeriodicityReport {
    std::vector<PeriodicityRow> rows;
    std::uint64_t good_count = 0;
    std::uint64_t periodic_count = 0;
    std::uint64_t censored_count = 0;

    double periodic_fraction() const {
        return good_count ? static_cast<double>(periodic_count) / static_cast<double>(good_count)
                          : 0.0;
    }
    double nonperiodic_fraction() const { return good_count ? 1.0 - periodic_fraction() : 0.0; }
    std::uint64_t nonperiodic_count() const { return good_count - periodic_count; }
};

PeriodicityReport periodicity_scan(const IntegerUniMap& map, const RationalPoint& alpha,
                                   std::uint64_t pmax, int jobs = 0,
                                   std::uint64_t budget = kDefaultOrbitBudget);

// Newton iteration map (x f'(x) - f(x)) / f'(x) of an integer
// polynomial of degree >= 2; rejects non-squarefree input.
IntegerUniMap newton_map(std::span<const std::int64_t> poly_coeffs);

// ----------------------------------------------------------------- IO

// Shortest lossless decimal rendering of a double (round-trips).
std::string format_double(double v);

void write_sweep_csv(const std::filesystem::path& path, std::span<const ResultRow> rows);
std::vector<ResultRow> read_sweep_csv(const std::filesystem::path& path);
void write_histogram_csv(const std::filesystem::path& path, std::span<const HistogramRow> rows);
void write_ram_csv(const std::filesystem::path& path, std::span<const RamMeetRow> rows);
void write_sn_csv(const std::filesystem::path& path, std::span<const SnCurveRow> rows);
void write_avoid_csv(const std::filesystem::path& path, std::span<const AvoidanceRow> rows);
void write_periodic_csv(const std::filesystem::path& path, std::span<const PeriodicityRow> rows);

}  // namespace fforbit
