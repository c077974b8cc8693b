#include "fforbit/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <sstream>

#include "fforbit/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fforbit {

namespace {

// Run fn(i) for i in [0, count); jobs == 1 is the serial reference
// path, anything else fans out over OpenMP when available. Results must
// be written to per-index slots so scheduling cannot reorder them.
template <class Fn>
void for_each_index(std::size_t count, int jobs, Fn&& fn) {
#ifdef _OPENMP
    if (jobs != 1) {
        std::exception_ptr failure = nullptr;
        int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
            try {
                fn(static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
        return;
    }
#endif
    (void)jobs;
    for (std::size_t i = 0; i < count; ++i) fn(i);
}

}  // namespace

// ---------------------------------------------------------------- maps

unsigned map_dimension(const AnyMap& m) {
    return std::holds_alternative<IntegerUniMap>(m) ? 1u
                                                    : std::get<IntegerPolySystem>(m).dim();
}

AnyMap parse_map_text(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    int dim = -1, deg = -1;
    std::vector<std::int64_t> num, den;
    bool have_num = false, have_den = false;
    std::vector<std::vector<std::int64_t>> rows;
    std::size_t lineno = 0;

    auto fail = [&](const std::string& msg) -> void {
        throw map_parse_error(origin + ":" + std::to_string(lineno) + ": " + msg);
    };
    auto parse_ints = [&](std::istringstream& ls) {
        std::vector<std::int64_t> out;
        std::int64_t v;
        while (ls >> v) out.push_back(v);
        if (!ls.eof()) fail("expected integer coefficients");
        return out;
    };

    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "dim") {
            if (!(ls >> dim) || dim < 1 || dim > static_cast<int>(kMaxDim)) fail("dim must be 1..4");
        } else if (key == "deg") {
            if (!(ls >> deg) || deg < 1 || deg > static_cast<int>(kMaxInputDegree))
                fail("deg must be 1..8");
        } else if (key == "num") {
            num = parse_ints(ls);
            have_num = true;
        } else if (key == "den") {
            den = parse_ints(ls);
            have_den = true;
        } else if (key == "f") {
            rows.push_back(parse_ints(ls));
        } else {
            fail("unknown directive '" + key + "'");
        }
    }
    lineno = 0;
    if (dim < 0) fail("missing 'dim' line");
    if (have_num) {
        if (dim != 1) fail("num/den form requires dim 1");
        if (!rows.empty()) fail("cannot mix num/den with f rows");
        if (num.empty()) fail("empty numerator");
        try {
            return IntegerUniMap(num, have_den ? den : std::vector<std::int64_t>{1});
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
    }
    if (rows.empty()) fail("no components: expected num/den or f rows");
    if (deg < 0) fail("system form requires a 'deg' line before f rows");
    if (rows.size() != static_cast<std::size_t>(dim)) fail("expected one f row per dimension");
    std::vector<MultiPoly> comps;
    std::size_t expect = monomial_basis(dim, deg).size();
    for (const auto& r : rows) {
        if (r.size() != expect)
            fail("each f row needs " + std::to_string(expect) + " dense coefficients");
        comps.push_back(MultiPoly::from_dense(dim, deg, r));
    }
    try {
        return IntegerPolySystem(std::move(comps));
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
    throw map_parse_error("unreachable");
}

AnyMap load_map_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open map file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_map_text(ss.str(), path.string());
}

void write_uni_map_file(const std::filesystem::path& path, const IntegerUniMap& map) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write map file: " + path.string());
    out << "# rational map on P^1: affine coefficients by ascending power\n";
    out << "dim 1\n";
    out << "num";
    for (auto c : map.num()) out << ' ' << c;
    out << "\nden";
    for (auto c : map.den()) out << ' ' << c;
    out << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

AnyMap builtin_map(const std::string& name) {
    if (name == "dim1") return IntegerUniMap({2, 1, 1});
    if (name == "x3plus1") return IntegerUniMap({1, 0, 0, 1});
    if (name == "dim3") {
        // three-variable quadratic system, dense graded-lex rows:
        // 1, x1, x2, x3, x1^2, x1x2, x1x3, x2^2, x2x3, x3^2
        const std::vector<std::vector<std::int64_t>> rows = {
            {11, 7, 8, 9, 1, 2, -3, 4, 5, 6},
            {7, 1, 8, 3, 2, 3, 4, 5, 6, 10},
            {121, 2, 8, 5, 3, 4, 5, 6, 17, 11},
        };
        std::vector<MultiPoly> comps;
        for (const auto& r : rows) comps.push_back(MultiPoly::from_dense(3, 2, r));
        return IntegerPolySystem(std::move(comps));
    }
    throw std::invalid_argument("unknown builtin map '" + name + "' (dim1, dim3, x3plus1)");
}

std::vector<std::string> builtin_map_names() { return {"dim1", "dim3", "x3plus1"}; }

namespace {
void hash_feed(std::uint64_t& h, std::int64_t v) {
    // FNV-1a over the 8 bytes
    std::uint64_t u = static_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
        h ^= (u >> (8 * i)) & 0xFF;
        h *= 0x100000001B3ull;
    }
}
}  // namespace

std::uint64_t map_hash(const AnyMap& m) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    if (const auto* uni = std::get_if<IntegerUniMap>(&m)) {
        hash_feed(h, 1);
        hash_feed(h, uni->degree());
        for (auto c : uni->num()) hash_feed(h, c);
        hash_feed(h, -9999);
        for (auto c : uni->den()) hash_feed(h, c);
    } else {
        const auto& sys = std::get<IntegerPolySystem>(m);
        hash_feed(h, 2);
        hash_feed(h, sys.dim());
        hash_feed(h, sys.degree());
        for (const auto& f : sys.components())
            for (auto c : f.dense_coeffs(sys.degree())) hash_feed(h, c);
    }
    return h;
}

// --------------------------------------------------------------- sweep

namespace {

ResultRow sweep_prime_uni(const IntegerUniMap& map, std::int64_t x0, Prime p,
                          std::uint64_t budget) {
    ResultRow row;
    row.p = p.value();
    auto rm = reduce_uni(map, p);
    if (!rm) return row;
    row.good = true;
    FpCtx fp(p.value());
    std::uint64_t s0 = fp.from_int(x0);
    auto step = [&](std::uint64_t s) { return rm->step(s); };
    auto summary = detect_cycle(step, s0, budget);
    if (!summary) {
        row.censored = true;
        return row;
    }
    row.mu = summary->preperiod;
    row.lambda = summary->cycle_len;
    row.tau = summary->collision_time;
    row.ctilde = static_cast<double>(row.lambda) /
                 std::sqrt(2.0 * static_cast<double>(p.value()));
    std::uint64_t z = s0;
    for (std::uint64_t i = 0; i < summary->preperiod; ++i) z = step(z);
    row.meets_ram = cycle_any(step, z, summary->cycle_len,
                              [&](std::uint64_t s) { return rm->is_critical_state(s); });
    return row;
}

ResultRow sweep_prime_sys(const IntegerPolySystem& sys, std::span<const std::int64_t> x0,
                          Prime p, std::uint64_t budget) {
    ResultRow row;
    row.p = p.value();
    auto rs = reduce_sys(sys, p);
    if (!rs) return row;
    row.good = true;
    SysState s0{};
    for (unsigned i = 0; i < sys.dim(); ++i) s0[i] = rs->fp().from_int(x0[i]);
    auto step = [&](const SysState& s) { return rs->step(s); };
    auto summary = detect_cycle(step, s0, budget);
    if (!summary) {
        row.censored = true;
        return row;
    }
    row.mu = summary->preperiod;
    row.lambda = summary->cycle_len;
    row.tau = summary->collision_time;
    row.ctilde = static_cast<double>(row.lambda) /
                 std::sqrt(2.0 * std::pow(static_cast<double>(p.value()), sys.dim()));
    SysState z = s0;
    for (std::uint64_t i = 0; i < summary->preperiod; ++i) z = step(z);
    row.meets_ram = cycle_any(step, z, summary->cycle_len,
                              [&](const SysState& s) { return rs->jacobian_vanishes(s); });
    return row;
}

// Replay a 1% deterministic sample of rows and confirm
// step^(mu+lambda)(x0) = step^mu(x0).
void verify_sample(const SweepConfig& config, std::span<const ResultRow> rows) {
    for (const auto& row : rows) {
        if (!row.good || row.censored) continue;
        if (rng::mix(config.seed, row.p) % 100 != 0) continue;
        Prime p = Prime::unchecked(row.p);
        if (const auto* uni = std::get_if<IntegerUniMap>(&config.map)) {
            auto rm = reduce_uni(*uni, p);
            FpCtx fp(p.value());
            std::uint64_t a = fp.from_int(config.x0[0]);
            std::uint64_t b = a;
            for (std::uint64_t i = 0; i < row.tau; ++i) a = rm->step(a);
            for (std::uint64_t i = 0; i < row.mu; ++i) b = rm->step(b);
            if (a != b) throw std::logic_error("sweep verification failed at p=" + std::to_string(row.p));
        } else {
            const auto& sys = std::get<IntegerPolySystem>(config.map);
            auto rs = reduce_sys(sys, p);
            SysState a{};
            for (unsigned i = 0; i < sys.dim(); ++i) a[i] = rs->fp().from_int(config.x0[i]);
            SysState b = a;
            for (std::uint64_t i = 0; i < row.tau; ++i) a = rs->step(a);
            for (std::uint64_t i = 0; i < row.mu; ++i) b = rs->step(b);
            if (!(a == b)) throw std::logic_error("sweep verification failed at p=" + std::to_string(row.p));
        }
    }
}

std::vector<ResultRow> run_sweep_impl(const SweepConfig& config, int jobs) {
    if (config.pmax < 3) throw std::invalid_argument("prime bound must be at least 3");
    unsigned dim = map_dimension(config.map);
    if (config.x0.size() != dim)
        throw std::invalid_argument("start point dimension does not match map");
    auto primes = primes_below(config.pmax);
    std::vector<ResultRow> rows(primes.size());
    for_each_index(primes.size(), jobs, [&](std::size_t i) {
        if (const auto* uni = std::get_if<IntegerUniMap>(&config.map)) {
            rows[i] = sweep_prime_uni(*uni, config.x0[0], primes[i], config.budget);
        } else {
            rows[i] = sweep_prime_sys(std::get<IntegerPolySystem>(config.map), config.x0,
                                      primes[i], config.budget);
        }
    });
    verify_sample(config, rows);
    return rows;
}

}  // namespace

std::vector<ResultRow> run_cycle_sweep(const SweepConfig& config) {
    return run_sweep_impl(config, config.jobs);
}

std::vector<ResultRow> run_cycle_sweep_serial(const SweepConfig& config) {
    return run_sweep_impl(config, 1);
}

// ---------------------------------------------------------- statistics

std::vector<HistogramRow> histogram(std::span<const double> values, double bin_width,
                                    const NormalizedCycleLaw& law) {
    if (values.empty()) throw std::invalid_argument("histogram needs at least one value");
    if (!(bin_width > 0)) throw std::invalid_argument("bin width must be positive");
    double maxv = 0;
    for (double v : values) {
        if (v < 0) throw std::invalid_argument("histogram values must be nonnegative");
        maxv = std::max(maxv, v);
    }
    std::size_t bins = static_cast<std::size_t>(maxv / bin_width) + 1;
    std::vector<std::uint64_t> counts(bins, 0);
    for (double v : values) {
        std::size_t b = std::min(static_cast<std::size_t>(v / bin_width), bins - 1);
        ++counts[b];
    }
    std::vector<HistogramRow> rows(bins);
    double norm = 1.0 / (static_cast<double>(values.size()) * bin_width);
    for (std::size_t b = 0; b < bins; ++b) {
        rows[b].bin_center = (static_cast<double>(b) + 0.5) * bin_width;
        rows[b].empirical = static_cast<double>(counts[b]) * norm;
        rows[b].model = law.density(rows[b].bin_center);
    }
    return rows;
}

double ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf) {
    if (values.empty()) throw std::invalid_argument("ks_statistic needs at least one value");
    std::sort(values.begin(), values.end());
    double n = static_cast<double>(values.size());
    double d = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double f = cdf(values[i]);
        d = std::max(d, f - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - f);
    }
    return d;
}

// ------------------------------------------- random quadratic systems

IntegerPolySystem gen_random_quadratic(const RandomMapSpec& spec, std::uint64_t index) {
    if (spec.dim < 1 || spec.dim > kMaxDim) throw std::invalid_argument("dimension must be 1..4");
    if (spec.coeff_bound < 1) throw std::invalid_argument("coefficient bound must be >= 1");
    const auto basis = monomial_basis(spec.dim, 2);
    for (unsigned attempt = 0; attempt < 100; ++attempt) {
        rng::Stream stream(spec.seed, index, attempt);
        std::vector<MultiPoly> comps;
        comps.reserve(spec.dim);
        for (unsigned c = 0; c < spec.dim; ++c) {
            std::vector<std::int64_t> dense(basis.size());
            for (auto& v : dense) v = stream.uniform_int(-spec.coeff_bound, spec.coeff_bound);
            comps.push_back(MultiPoly::from_dense(spec.dim, 2, dense));
        }
        // degenerate draws (constant Jacobian determinant) are resampled
        std::vector<MultiPoly> partials;
        for (unsigned i = 0; i < spec.dim; ++i)
            for (unsigned j = 0; j < spec.dim; ++j) partials.push_back(comps[i].partial(j));
        if (poly_matrix_det(partials, spec.dim).is_constant()) continue;
        return IntegerPolySystem(std::move(comps));
    }
    throw std::runtime_error("100 consecutive degenerate random maps; coefficient bound too tight");
}

namespace {

struct RamCell {
    std::uint32_t counted = 0;
    std::uint32_t meets = 0;
    std::uint32_t censored = 0;
};

RamCell ram_cell(const std::vector<IntegerPolySystem>& maps, Prime p, std::uint64_t budget) {
    RamCell cell;
    for (const auto& sys : maps) {
        auto rs = reduce_sys(sys, p);
        if (!rs) continue;  // bad prime for this map, excluded
        SysState origin{};
        auto step = [&](const SysState& s) { return rs->step(s); };
        auto loc = locate_cycle(step, origin, budget);
        if (!loc) {
            ++cell.censored;
            continue;
        }
        ++cell.counted;
        if (cycle_any(step, loc->on_cycle, loc->cycle_len,
                      [&](const SysState& s) { return rs->jacobian_vanishes(s); }))
            ++cell.meets;
    }
    return cell;
}

std::vector<RamCell> ram_cells(unsigned d, std::span<const Prime> primes, std::uint64_t map_count,
                               std::int64_t coeff_bound, std::uint64_t seed, int jobs,
                               std::uint64_t budget) {
    if (d < 1 || d > 3) throw std::invalid_argument("ramification experiments cover d = 1..3");
    RandomMapSpec spec{d, coeff_bound, seed};
    std::vector<IntegerPolySystem> maps;
    maps.reserve(map_count);
    for (std::uint64_t i = 0; i < map_count; ++i) maps.push_back(gen_random_quadratic(spec, i));
    std::vector<RamCell> cells(primes.size());
    for_each_index(primes.size(), jobs,
                   [&](std::size_t i) { cells[i] = ram_cell(maps, primes[i], budget); });
    return cells;
}

}  // namespace

std::vector<RamMeetRow> ram_meet_probability(unsigned d, std::span<const Prime> primes,
                                             std::uint64_t map_count, std::int64_t coeff_bound,
                                             std::uint64_t seed, int jobs, std::uint64_t budget) {
    auto cells = ram_cells(d, primes, map_count, coeff_bound, seed, jobs, budget);
    std::vector<RamMeetRow> rows(primes.size());
    for (std::size_t i = 0; i < primes.size(); ++i) {
        rows[i].p = primes[i].value();
        rows[i].maps_counted = cells[i].counted;
        rows[i].censored = cells[i].censored;
        rows[i].fraction = cells[i].counted
                               ? static_cast<double>(cells[i].meets) / cells[i].counted
                               : 0.0;
    }
    return rows;
}

std::vector<RamMeetRow> ram_meet_probability_serial(unsigned d, std::span<const Prime> primes,
                                                    std::uint64_t map_count,
                                                    std::int64_t coeff_bound, std::uint64_t seed,
                                                    std::uint64_t budget) {
    return ram_meet_probability(d, primes, map_count, coeff_bound, seed, 1, budget);
}

std::vector<SnCurveRow> sn_curve(std::uint64_t map_count, std::size_t prime_count,
                                 std::int64_t coeff_bound, std::uint64_t seed, int jobs,
                                 std::uint64_t budget) {
    auto primes = first_primes(prime_count);
    auto cells = ram_cells(3, primes, map_count, coeff_bound, seed, jobs, budget);
    std::vector<SnCurveRow> rows(primes.size());
    double s_acc = 0, model_acc = 0;
    for (std::size_t i = 0; i < primes.size(); ++i) {
        double p = static_cast<double>(primes[i].value());
        if (cells[i].counted)
            s_acc += static_cast<double>(cells[i].counted - cells[i].meets) / cells[i].counted;
        model_acc += std::sqrt(M_PI / (2.0 * p));
        rows[i] = SnCurveRow{primes[i].value(), s_acc, model_acc};
    }
    return rows;
}

std::vector<SnCurveRow> sn_curve_serial(std::uint64_t map_count, std::size_t prime_count,
                                        std::int64_t coeff_bound, std::uint64_t seed,
                                        std::uint64_t budget) {
    return sn_curve(map_count, prime_count, coeff_bound, seed, 1, budget);
}

// ----------------------------------------- avoidance and periodicity

RationalPoint parse_rational(const std::string& text) {
    if (text == "inf" || text == "infinity") return RationalPoint{1, 0};
    RationalPoint q;
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            q.num = std::stoll(text);
            q.den = 1;
        } else {
            q.num = std::stoll(text.substr(0, slash));
            q.den = std::stoll(text.substr(slash + 1));
        }
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse rational point '" + text + "'");
    }
    if (q.den == 0 && q.num == 0) throw std::invalid_argument("0/0 is not a point");
    return q;
}

ProjPoint reduce_point(const RationalPoint& q, Prime p) {
    if (q.den == 0) return ProjPoint::infinity(p);
    FpCtx fp(p.value());
    std::uint64_t d = fp.from_int(q.den);
    if (d == 0) return ProjPoint::infinity(p);
    return ProjPoint::affine(FpElement(fp.mul(fp.from_int(q.num), fp.inv(d)), p));
}

AvoidanceReport avoidance_scan(const IntegerUniMap& map, const RationalPoint& alpha,
                               const RationalPoint& beta, std::uint64_t pmax, unsigned class_mod,
                               int jobs, std::uint64_t budget) {
    if (class_mod < 1) throw std::invalid_argument("class modulus must be >= 1");
    if (pmax < 3) throw std::invalid_argument("prime bound must be at least 3");
    auto primes = primes_below(pmax);
    AvoidanceReport report;
    report.class_mod = class_mod;
    report.rows.resize(primes.size());
    for_each_index(primes.size(), jobs, [&](std::size_t i) {
        Prime p = primes[i];
        AvoidanceRow row;
        row.p = p.value();
        row.residue_class = static_cast<std::uint8_t>(p.value() % class_mod);
        auto rm = reduce_uni(map, p);
        if (rm) {
            row.good = true;
            std::uint64_t start = rm->state_of(reduce_point(beta, p));
            std::uint64_t target = rm->state_of(reduce_point(alpha, p));
            auto res = orbit_contains([&](std::uint64_t s) { return rm->step(s); }, start, target,
                                      budget);
            switch (res.status) {
                case OrbitSearch::Status::found:
                    row.hit = true;
                    row.hit_index = static_cast<std::int64_t>(res.index);
                    break;
                case OrbitSearch::Status::absent:
                    break;
                case OrbitSearch::Status::censored:
                    row.censored = true;
                    break;
            }
        }
        report.rows[i] = row;
    });
    report.class_good.assign(class_mod, 0);
    report.class_hit.assign(class_mod, 0);
    for (const auto& row : report.rows) {
        if (!row.good) continue;
        if (row.censored) {
            ++report.censored_count;
            continue;
        }
        ++report.good_count;
        ++report.class_good[row.residue_class];
        if (row.hit) {
            ++report.hit_count;
            ++report.class_hit[row.residue_class];
        }
    }
    return report;
}

PeriodicityReport periodicity_scan(const IntegerUniMap& map, const RationalPoint& alpha,
                                   std::uint64_t pmax, int jobs, std::uint64_t budget) {
    if (pmax < 3) throw std::invalid_argument("prime bound must be at least 3");
    auto primes = primes_below(pmax);
    PeriodicityReport report;
    report.rows.resize(primes.size());
    for_each_index(primes.size(), jobs, [&](std::size_t i) {
        Prime p = primes[i];
        PeriodicityRow row;
        row.p = p.value();
        auto rm = reduce_uni(map, p);
        if (rm) {
            row.good = true;
            std::uint64_t start = rm->state_of(reduce_point(alpha, p));
            auto summary = detect_cycle([&](std::uint64_t s) { return rm->step(s); }, start, budget);
            if (summary) row.periodic = summary->preperiod == 0;
            else row.censored = true;
        }
        report.rows[i] = row;
    });
    for (const auto& row : report.rows) {
        if (!row.good) continue;
        if (row.censored) {
            ++report.censored_count;
            continue;
        }
        ++report.good_count;
        if (row.periodic) ++report.periodic_count;
    }
    return report;
}

IntegerUniMap newton_map(std::span<const std::int64_t> poly_coeffs) {
    std::vector<std::int64_t> f(poly_coeffs.begin(), poly_coeffs.end());
    while (f.size() > 1 && f.back() == 0) f.pop_back();
    if (f.size() < 3) throw std::invalid_argument("Newton map needs a polynomial of degree >= 2");
    unsigned d = static_cast<unsigned>(f.size()) - 1;
    std::vector<std::int64_t> df(d);
    for (unsigned i = 1; i <= d; ++i) {
        if (__builtin_mul_overflow(f[i], static_cast<std::int64_t>(i), &df[i - 1]))
            throw std::overflow_error("derivative coefficient overflow");
    }
    if (resultant_formal(f, d, df, d - 1).is_zero())
        throw std::invalid_argument("polynomial is not squarefree");
    // numerator x f'(x) - f(x), denominator f'(x)
    std::vector<std::int64_t> num(d + 1, 0);
    for (unsigned i = 0; i < d; ++i) num[i + 1] = df[i];
    for (unsigned i = 0; i <= d; ++i) {
        if (__builtin_sub_overflow(num[i], f[i], &num[i]))
            throw std::overflow_error("Newton numerator overflow");
    }
    return IntegerUniMap(std::move(num), std::move(df));
}

// ----------------------------------------------------------------- IO

std::string format_double(double v) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

namespace {
std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write output file: " + path.string());
    return out;
}
}  // namespace

void write_sweep_csv(const std::filesystem::path& path, std::span<const ResultRow> rows) {
    auto out = open_out(path);
    out << "p,good,mu,lambda,tau,ctilde,meets_ram,censored\n";
    for (const auto& r : rows) {
        out << r.p << ',' << (r.good ? 1 : 0) << ',' << r.mu << ',' << r.lambda << ',' << r.tau
            << ',' << format_double(r.ctilde) << ',' << (r.meets_ram ? 1 : 0) << ','
            << (r.censored ? 1 : 0) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<ResultRow> read_sweep_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV file: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "p,good,mu,lambda,tau,ctilde,meets_ram,censored")
        throw std::runtime_error("unexpected CSV header in " + path.string());
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ResultRow r;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        int good = 0, meets = 0, censored = 0;
        if (!(ls >> r.p >> good >> r.mu >> r.lambda >> r.tau >> r.ctilde >> meets >> censored))
            throw std::runtime_error("malformed CSV row in " + path.string());
        r.good = good != 0;
        r.meets_ram = meets != 0;
        r.censored = censored != 0;
        rows.push_back(r);
    }
    return rows;
}

void write_histogram_csv(const std::filesystem::path& path, std::span<const HistogramRow> rows) {
    auto out = open_out(path);
    out << "bin_center,empirical,model\n";
    for (const auto& r : rows)
        out << format_double(r.bin_center) << ',' << format_double(r.empirical) << ','
            << format_double(r.model) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_ram_csv(const std::filesystem::path& path, std::span<const RamMeetRow> rows) {
    auto out = open_out(path);
    out << "p,fraction,maps_counted,censored\n";
    for (const auto& r : rows)
        out << r.p << ',' << format_double(r.fraction) << ',' << r.maps_counted << ','
            << r.censored << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_sn_csv(const std::filesystem::path& path, std::span<const SnCurveRow> rows) {
    auto out = open_out(path);
    out << "N,S_N,model\n";
    for (const auto& r : rows)
        out << r.p << ',' << format_double(r.s_n) << ',' << format_double(r.model) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_avoid_csv(const std::filesystem::path& path, std::span<const AvoidanceRow> rows) {
    auto out = open_out(path);
    out << "p,class,good,hit,hit_index,censored\n";
    for (const auto& r : rows)
        out << r.p << ',' << static_cast<unsigned>(r.residue_class) << ',' << (r.good ? 1 : 0)
            << ',' << (r.hit ? 1 : 0) << ',' << r.hit_index << ',' << (r.censored ? 1 : 0) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_periodic_csv(const std::filesystem::path& path, std::span<const PeriodicityRow> rows) {
    auto out = open_out(path);
    out << "p,good,periodic,censored\n";
    for (const auto& r : rows)
        out << r.p << ',' << (r.good ? 1 : 0) << ',' << (r.periodic ? 1 : 0) << ','
            << (r.censored ? 1 : 0) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace fforbit
