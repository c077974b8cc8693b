// Command-line front end: every experiment and model query, with
// machine-readable CSV output and a JSON metadata preamble per file.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "fforbit/experiments.hpp"

using json = nlohmann::json;
using namespace fforbit;

namespace {

constexpr const char* kFormatVersion = "1";

std::filesystem::path resolve_out(const std::string& out) {
    std::filesystem::path p(out);
    if (p.is_relative()) {
        if (const char* dir = std::getenv("FFORBIT_OUTDIR")) p = std::filesystem::path(dir) / p;
    }
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    return p;
}

void write_meta(const std::filesystem::path& csv_path, json meta) {
    meta["format_version"] = kFormatVersion;
    meta["tool"] = "fforbit";
    auto path = csv_path;
    path += ".meta.json";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write metadata file: " + path.string());
    out << meta.dump(2) << '\n';
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
    std::vector<std::int64_t> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        try {
            out.push_back(std::stoll(item));
        } catch (const std::exception&) {
            throw CLI::ValidationError("expected a comma-separated integer list, got '" + text + "'");
        }
    }
    if (out.empty()) throw CLI::ValidationError("empty integer list");
    return out;
}

struct MapChoice {
    std::string builtin;
    std::string file;

    AnyMap load() const {
        if (!builtin.empty() && !file.empty())
            throw CLI::ValidationError("--builtin and --map are mutually exclusive");
        if (!builtin.empty()) return builtin_map(builtin);
        if (!file.empty()) return load_map_file(file);
        throw CLI::ValidationError("one of --builtin or --map is required");
    }
    json describe(const AnyMap& m) const {
        json j;
        j["source"] = builtin.empty() ? file : "builtin:" + builtin;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(map_hash(m)));
        j["map_hash"] = std::string("fnv1a:") + buf;
        j["dimension"] = map_dimension(m);
        return j;
    }
    void add_flags(CLI::App* cmd) {
        cmd->add_option("--builtin", builtin, "embedded map: dim1, dim3, x3plus1");
        cmd->add_option("--map", file, "map description file");
    }
};

int run_app(int argc, char** argv) {
    CLI::App app{"orbit statistics of polynomial and rational maps over prime fields"};
    app.require_subcommand(1);

    // ---- sweep ----
    auto* sweep = app.add_subcommand("sweep", "per-prime cycle sweep of one map");
    MapChoice sweep_map;
    sweep_map.add_flags(sweep);
    std::string sweep_x0 = "1";
    std::uint64_t sweep_pmax = 100000, sweep_budget = kDefaultOrbitBudget, sweep_seed = 1;
    int sweep_jobs = 0;
    std::string sweep_out = "sweep.csv";
    sweep->add_option("--x0", sweep_x0, "start point, comma separated per coordinate");
    sweep->add_option("--pmax", sweep_pmax, "sweep primes p < pmax");
    sweep->add_option("--budget", sweep_budget, "step budget per prime before censoring");
    sweep->add_option("--seed", sweep_seed, "seed for the verification sample");
    sweep->add_option("--jobs", sweep_jobs, "worker threads (0 = all, 1 = serial)");
    sweep->add_option("--out", sweep_out, "output CSV path");

    // ---- hist ----
    auto* hist = app.add_subcommand("hist", "normalized histogram of a sweep with model overlay");
    std::string hist_in, hist_out = "hist.csv";
    double hist_width = 0.1;
    hist->add_option("--in", hist_in, "sweep CSV to read")->required();
    hist->add_option("--width", hist_width, "bin width");
    hist->add_option("--out", hist_out, "output CSV path");

    // ---- ramprob ----
    auto* ramprob = app.add_subcommand("ramprob",
                                       "fraction of random maps whose cycle meets the "
                                       "ramification locus, per prime");
    unsigned ram_d = 3;
    std::uint64_t ram_maps = 500, ram_seed = 1, ram_budget = kDefaultOrbitBudget;
    std::size_t ram_primes = 100;
    std::int64_t ram_B = 100;
    int ram_jobs = 0;
    std::string ram_out = "ramprob.csv";
    ramprob->add_option("--d", ram_d, "dimension (1, 2 or 3)");
    ramprob->add_option("--maps", ram_maps, "number of random maps");
    ramprob->add_option("--primes", ram_primes, "number of primes, from 2 upward");
    ramprob->add_option("--B", ram_B, "coefficient bound, uniform on [-B, B]");
    ramprob->add_option("--seed", ram_seed, "generation seed");
    ramprob->add_option("--jobs", ram_jobs, "worker threads");
    ramprob->add_option("--budget", ram_budget, "step budget per orbit");
    ramprob->add_option("--out", ram_out, "output CSV path");

    // ---- sncurve ----
    auto* sncurve = app.add_subcommand("sncurve",
                                       "cumulative empty-intersection count S(N) against the "
                                       "model sum, d = 3");
    std::uint64_t sn_maps = 50, sn_seed = 1, sn_budget = kDefaultOrbitBudget;
    std::size_t sn_primes = 500;
    std::int64_t sn_B = 100;
    int sn_jobs = 0;
    std::string sn_out = "sncurve.csv";
    sncurve->add_option("--maps", sn_maps, "number of random maps");
    sncurve->add_option("--primes", sn_primes, "number of primes");
    sncurve->add_option("--B", sn_B, "coefficient bound");
    sncurve->add_option("--seed", sn_seed, "generation seed");
    sncurve->add_option("--jobs", sn_jobs, "worker threads");
    sncurve->add_option("--budget", sn_budget, "step budget per orbit");
    sncurve->add_option("--out", sn_out, "output CSV path");

    // ---- avoid ----
    auto* avoid = app.add_subcommand("avoid", "per-prime orbit membership of alpha in the orbit of beta");
    MapChoice avoid_map;
    avoid_map.add_flags(avoid);
    std::string avoid_alpha = "0", avoid_beta = "1", avoid_out;
    std::uint64_t avoid_pmax = 2000, avoid_budget = kDefaultOrbitBudget;
    unsigned avoid_classmod = 3;
    int avoid_jobs = 0;
    avoid->add_option("--alpha", avoid_alpha, "target point (integer or a/b, inf)");
    avoid->add_option("--beta", avoid_beta, "orbit start point");
    avoid->add_option("--pmax", avoid_pmax, "scan primes p < pmax");
    avoid->add_option("--classmod", avoid_classmod, "residue-class modulus for the breakdown");
    avoid->add_option("--jobs", avoid_jobs, "worker threads");
    avoid->add_option("--budget", avoid_budget, "step budget per prime");
    avoid->add_option("--out", avoid_out, "optional per-prime CSV path");

    // ---- periodic ----
    auto* periodic = app.add_subcommand("periodic", "fraction of primes where alpha reduces to a periodic point");
    MapChoice periodic_map;
    periodic_map.add_flags(periodic);
    std::string periodic_alpha = "0", periodic_out;
    std::uint64_t periodic_pmax = 10000, periodic_budget = kDefaultOrbitBudget;
    int periodic_jobs = 0;
    periodic->add_option("--alpha", periodic_alpha, "point to track");
    periodic->add_option("--pmax", periodic_pmax, "scan primes p < pmax");
    periodic->add_option("--jobs", periodic_jobs, "worker threads");
    periodic->add_option("--budget", periodic_budget, "step budget per prime");
    periodic->add_option("--out", periodic_out, "optional per-prime CSV path");

    // ---- model ----
    auto* model = app.add_subcommand("model", "query the random-map model");
    model->require_subcommand(1);
    std::uint64_t m_k = 1, m_n = 1000, m_l = 1, m_pmax = 10000;
    std::uint32_t m_p = 101;
    unsigned m_d = 3;
    double m_s = 0.0, m_t = 1.0;
    bool m_asymptotic = false;
    auto* m_alpha = model->add_subcommand("alpha", "survival probability alpha(k) on n points");
    m_alpha->add_option("--k", m_k, "index k >= 1")->required();
    m_alpha->add_option("--n", m_n, "set size");
    auto* m_pmf = model->add_subcommand("pmf", "cycle length probability");
    m_pmf->add_option("--l", m_l, "cycle length")->required();
    m_pmf->add_option("--n", m_n, "set size");
    m_pmf->add_flag("--asymptotic", m_asymptotic, "force the asymptotic form");
    auto* m_density = model->add_subcommand("density", "normalized cycle-length density g(s)");
    m_density->add_option("--s", m_s, "argument")->required();
    auto* m_cdf = model->add_subcommand("cdf", "cdf of the normalized cycle length");
    m_cdf->add_option("--t", m_t, "argument")->required();
    auto* m_inter = model->add_subcommand("intersection", "Prob(cycle misses the ramification locus)");
    m_inter->add_option("--p", m_p, "prime")->required();
    m_inter->add_option("--d", m_d, "dimension");
    m_inter->add_flag("--asymptotic", m_asymptotic, "use the asymptotic formula (d >= 3)");
    auto* m_euler = model->add_subcommand("euler", "partial Euler product over primes <= pmax");
    m_euler->add_option("--d", m_d, "dimension >= 3")->required();
    m_euler->add_option("--pmax", m_pmax, "largest prime");
    auto* m_d2 = model->add_subcommand("d2const", "the d = 2 empty-intersection constant");

    // ---- simulate ----
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo orbits of uniformly random maps");
    std::uint64_t sim_n = 1000, sim_trials = 100000, sim_seed = 1;
    int sim_jobs = 0;
    std::string sim_out = "simulate.csv";
    simulate->add_option("--n", sim_n, "set size");
    simulate->add_option("--trials", sim_trials, "number of trials");
    simulate->add_option("--seed", sim_seed, "stream seed");
    simulate->add_option("--jobs", sim_jobs, "worker threads");
    simulate->add_option("--out", sim_out, "output CSV path");

    // ---- newton ----
    auto* newton = app.add_subcommand("newton", "write the Newton iteration map of a polynomial");
    std::string newton_coeffs, newton_out = "newton.map";
    newton->add_option("--coeffs", newton_coeffs, "polynomial coefficients c0,c1,... ascending")
        ->required();
    newton->add_option("--out", newton_out, "map file to write");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (sweep->parsed()) {
        AnyMap m = sweep_map.load();
        SweepConfig cfg{m, parse_int_list(sweep_x0), sweep_pmax, sweep_budget, sweep_seed,
                        sweep_jobs};
        auto rows = run_cycle_sweep(cfg);
        auto out = resolve_out(sweep_out);
        write_sweep_csv(out, rows);
        json meta = sweep_map.describe(m);
        meta["command"] = "sweep";
        meta["x0"] = cfg.x0;
        meta["pmax"] = cfg.pmax;
        meta["budget"] = cfg.budget;
        meta["seed"] = cfg.seed;
        meta["jobs"] = cfg.jobs;
        write_meta(out, meta);
        std::size_t good = 0, censored = 0;
        for (const auto& r : rows) {
            good += r.good && !r.censored;
            censored += r.censored;
        }
        std::cout << "primes " << rows.size() << " good " << good << " censored " << censored
                  << " -> " << out.string() << '\n';
        return 0;
    }

    if (hist->parsed()) {
        auto rows = read_sweep_csv(hist_in);
        std::vector<double> vals;
        for (const auto& r : rows)
            if (r.good && !r.censored) vals.push_back(r.ctilde);
        NormalizedCycleLaw law;
        auto h = histogram(vals, hist_width, law);
        auto out = resolve_out(hist_out);
        write_histogram_csv(out, h);
        json meta;
        meta["command"] = "hist";
        meta["in"] = hist_in;
        meta["bin_width"] = hist_width;
        meta["values"] = vals.size();
        meta["ks_statistic"] = ks_statistic(vals, [&](double x) { return law.cdf(x); });
        write_meta(out, meta);
        std::cout << "bins " << h.size() << " values " << vals.size() << " ks "
                  << format_double(meta["ks_statistic"].get<double>()) << " -> " << out.string()
                  << '\n';
        return 0;
    }

    if (ramprob->parsed()) {
        auto primes = first_primes(ram_primes);
        auto rows = ram_meet_probability(ram_d, primes, ram_maps, ram_B, ram_seed, ram_jobs,
                                         ram_budget);
        auto out = resolve_out(ram_out);
        write_ram_csv(out, rows);
        json meta;
        meta["command"] = "ramprob";
        meta["d"] = ram_d;
        meta["maps"] = ram_maps;
        meta["primes"] = ram_primes;
        meta["coeff_bound"] = ram_B;
        meta["seed"] = ram_seed;
        meta["budget"] = ram_budget;
        write_meta(out, meta);
        std::cout << "d " << ram_d << " primes " << rows.size() << " last_fraction "
                  << format_double(rows.back().fraction) << " -> " << out.string() << '\n';
        return 0;
    }

    if (sncurve->parsed()) {
        auto rows = sn_curve(sn_maps, sn_primes, sn_B, sn_seed, sn_jobs, sn_budget);
        auto out = resolve_out(sn_out);
        write_sn_csv(out, rows);
        json meta;
        meta["command"] = "sncurve";
        meta["maps"] = sn_maps;
        meta["primes"] = sn_primes;
        meta["coeff_bound"] = sn_B;
        meta["seed"] = sn_seed;
        meta["budget"] = sn_budget;
        meta["final_S"] = rows.back().s_n;
        meta["final_model"] = rows.back().model;
        write_meta(out, meta);
        std::cout << "S(" << rows.back().p << ") = " << format_double(rows.back().s_n)
                  << " model " << format_double(rows.back().model) << " -> " << out.string()
                  << '\n';
        return 0;
    }

    if (avoid->parsed()) {
        AnyMap m = avoid_map.load();
        const auto* uni = std::get_if<IntegerUniMap>(&m);
        if (!uni) throw CLI::ValidationError("avoid requires a univariate map");
        auto report = avoidance_scan(*uni, parse_rational(avoid_alpha), parse_rational(avoid_beta),
                                     avoid_pmax, avoid_classmod, avoid_jobs, avoid_budget);
        std::cout << "good " << report.good_count << " hits " << report.hit_count << " density "
                  << format_double(report.density()) << '\n';
        for (unsigned r = 0; r < report.class_mod; ++r) {
            std::cout << "class " << r << " mod " << report.class_mod << ": good "
                      << report.class_good[r] << " density " << format_double(report.class_density(r))
                      << '\n';
        }
        if (!avoid_out.empty()) {
            auto out = resolve_out(avoid_out);
            write_avoid_csv(out, report.rows);
            json meta = avoid_map.describe(m);
            meta["command"] = "avoid";
            meta["alpha"] = avoid_alpha;
            meta["beta"] = avoid_beta;
            meta["pmax"] = avoid_pmax;
            meta["classmod"] = avoid_classmod;
            meta["budget"] = avoid_budget;
            meta["density"] = report.density();
            write_meta(out, meta);
            std::cout << "-> " << out.string() << '\n';
        }
        return 0;
    }

    if (periodic->parsed()) {
        AnyMap m = periodic_map.load();
        const auto* uni = std::get_if<IntegerUniMap>(&m);
        if (!uni) throw CLI::ValidationError("periodic requires a univariate map");
        auto report = periodicity_scan(*uni, parse_rational(periodic_alpha), periodic_pmax,
                                       periodic_jobs, periodic_budget);
        std::cout << "good " << report.good_count << " periodic " << report.periodic_count
                  << " periodic_fraction " << format_double(report.periodic_fraction())
                  << " nonperiodic_fraction " << format_double(report.nonperiodic_fraction())
                  << '\n';
        if (!periodic_out.empty()) {
            auto out = resolve_out(periodic_out);
            write_periodic_csv(out, report.rows);
            json meta = periodic_map.describe(m);
            meta["command"] = "periodic";
            meta["alpha"] = periodic_alpha;
            meta["pmax"] = periodic_pmax;
            meta["budget"] = periodic_budget;
            meta["periodic_fraction"] = report.periodic_fraction();
            write_meta(out, meta);
            std::cout << "-> " << out.string() << '\n';
        }
        return 0;
    }

    if (model->parsed()) {
        if (m_alpha->parsed()) {
            std::cout << format_double(survival_alpha(m_k, m_n)) << '\n';
        } else if (m_pmf->parsed()) {
            double v = m_asymptotic ? cycle_pmf_asymptotic(m_l, m_n) : cycle_pmf(m_l, m_n);
            std::cout << format_double(v) << '\n';
        } else if (m_density->parsed()) {
            std::cout << format_double(normalized_density(m_s)) << '\n';
        } else if (m_cdf->parsed()) {
            std::cout << format_double(normalized_cdf(m_t)) << '\n';
        } else if (m_inter->parsed()) {
            auto mode = m_asymptotic ? IntersectionMode::asymptotic : IntersectionMode::exact_hybrid;
            std::cout << format_double(empty_intersection_prob(Prime(m_p), m_d, mode)) << '\n';
        } else if (m_euler->parsed()) {
            auto res = euler_product(m_d, m_pmax);
            std::cout << format_double(res.partial_product) << ' '
                      << (res.verdict == EulerVerdict::diverges_to_zero ? "diverges-to-zero"
                                                                        : "converges")
                      << '\n';
        } else if (m_d2->parsed()) {
            std::cout << format_double(d2_constant()) << '\n';
        }
        return 0;
    }

    if (simulate->parsed()) {
        auto stats = simulate_random_map(sim_n, sim_trials, sim_seed, sim_jobs);
        auto out = resolve_out(sim_out);
        std::ofstream f(out);
        if (!f) throw std::runtime_error("cannot write output file: " + out.string());
        f << "k,tau_count,lambda_count\n";
        std::size_t rows = std::max(stats.tau_counts.size(), stats.lambda_counts.size());
        for (std::size_t k = 0; k < rows; ++k) {
            std::uint64_t tc = k < stats.tau_counts.size() ? stats.tau_counts[k] : 0;
            std::uint64_t lc = k < stats.lambda_counts.size() ? stats.lambda_counts[k] : 0;
            f << k << ',' << tc << ',' << lc << '\n';
        }
        if (!f) throw std::runtime_error("write failed: " + out.string());
        json meta;
        meta["command"] = "simulate";
        meta["n"] = sim_n;
        meta["trials"] = sim_trials;
        meta["seed"] = sim_seed;
        meta["mean_tau"] = stats.mean_tau();
        meta["mean_lambda"] = stats.mean_lambda();
        write_meta(out, meta);
        std::cout << "trials " << sim_trials << " mean_tau " << format_double(stats.mean_tau())
                  << " mean_lambda " << format_double(stats.mean_lambda()) << " -> "
                  << out.string() << '\n';
        return 0;
    }

    if (newton->parsed()) {
        auto coeffs = parse_int_list(newton_coeffs);
        auto map = ::fforbit::newton_map(coeffs);
        auto out = resolve_out(newton_out);
        write_uni_map_file(out, map);
        std::cout << "degree " << map.degree() << " -> " << out.string() << '\n';
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_app(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
