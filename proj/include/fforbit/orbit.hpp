#pragma once

// Constant-memory forward-orbit analysis: Brent cycle detection for the
// (tail, cycle, collision) decomposition, a hash-table oracle used by
// the tests, cycle walks, multipliers, and orbit membership search.
//
// The step function is a template parameter so sweep loops inline it;
// states are either a single machine word (P^1 and random-map
// simulation) or a small fixed array (A^d points).

#include <cstdint>
#include <optional>
#include <unordered_map>

#include "fforbit/dynmap.hpp"

namespace fforbit {

struct OrbitSummary {
    std::uint64_t preperiod = 0;       // mu: length of the tail
    std::uint64_t cycle_len = 1;       // lambda
    std::uint64_t collision_time = 1;  // tau = mu + lambda
    friend bool operator==(const OrbitSummary&, const OrbitSummary&) = default;
};

inline constexpr std::uint64_t kDefaultOrbitBudget = 100'000'000;

// Exact (mu, lambda, tau) with O(1) state memory; Brent teleporting
// tortoise for lambda, then two aligned walkers for mu. Returns nullopt
// when the walk would exceed `budget` step evaluations.
template <class State, class Step>
std::optional<OrbitSummary> detect_cycle(Step&& step, State x0,
                                         std::uint64_t budget = kDefaultOrbitBudget) {
    std::uint64_t evals = 0;
    std::uint64_t power = 1, lam = 1;
    State tortoise = x0;
    State hare = step(x0);
    if (++evals > budget) return std::nullopt;
    while (!(tortoise == hare)) {
        if (power == lam) {
            tortoise = hare;
            power <<= 1;
            lam = 0;
        }
        hare = step(hare);
        ++lam;
        if (++evals > budget) return std::nullopt;
    }
    State ahead = x0;
    for (std::uint64_t i = 0; i < lam; ++i) {
        ahead = step(ahead);
        if (++evals > budget) return std::nullopt;
    }
    std::uint64_t mu = 0;
    State walker = x0;
    while (!(walker == ahead)) {
        walker = step(walker);
        ahead = step(ahead);
        ++mu;
        if ((evals += 2) > budget) return std::nullopt;
    }
    return OrbitSummary{mu, lam, mu + lam};
}

// Cheaper variant for experiments that only need the cycle: Brent's
// first phase yields the cycle length plus a state already on the
// cycle, skipping tail recovery entirely.
template <class State>
struct CycleLocation {
    std::uint64_t cycle_len = 1;
    State on_cycle{};
};

template <class State, class Step>
std::optional<CycleLocation<State>> locate_cycle(Step&& step, State x0,
                                                 std::uint64_t budget = kDefaultOrbitBudget) {
    std::uint64_t evals = 0;
    std::uint64_t power = 1, lam = 1;
    State tortoise = x0;
    State hare = step(x0);
    if (++evals > budget) return std::nullopt;
    while (!(tortoise == hare)) {
        if (power == lam) {
            tortoise = hare;
            power <<= 1;
            lam = 0;
        }
        hare = step(hare);
        ++lam;
        if (++evals > budget) return std::nullopt;
    }
    return CycleLocation<State>{lam, tortoise};
}

struct StateHash {
    std::size_t operator()(std::uint64_t s) const {
        s += 0x9E3779B97F4A7C15ull;
        s = (s ^ (s >> 30)) * 0xBF58476D1CE4E5B9ull;
        s = (s ^ (s >> 27)) * 0x94D049BB133111EBull;
        return static_cast<std::size_t>(s ^ (s >> 31));
    }
    std::size_t operator()(const SysState& s) const {
        std::uint64_t h = 0x243F6A8885A308D3ull;
        for (auto v : s) h = (*this)(h ^ v);
        return static_cast<std::size_t>(h);
    }
};

// Reference detector: explicit visited-index table, O(tau) memory.
// Test-side oracle for detect_cycle; nullopt when the walk would store
// more than `max_states` states.
template <class State, class Step>
std::optional<OrbitSummary> detect_cycle_oracle(Step&& step, State x0,
                                                std::uint64_t max_states = 10'000'000) {
    std::unordered_map<State, std::uint64_t, StateHash> seen;
    State x = x0;
    std::uint64_t t = 0;
    while (true) {
        auto [it, inserted] = seen.try_emplace(x, t);
        if (!inserted) {
            std::uint64_t s = it->second;
            return OrbitSummary{s, t - s, t};
        }
        if (t >= max_states) return std::nullopt;
        x = step(x);
        ++t;
    }
}

// Advance to the first cycle point, then apply `pred` to each of the
// lambda distinct cycle states; returns how many satisfied it.
template <class State, class Step, class Pred>
std::uint64_t cycle_walk(Step&& step, State x0, const OrbitSummary& summary, Pred&& pred) {
    State z = x0;
    for (std::uint64_t i = 0; i < summary.preperiod; ++i) z = step(z);
    std::uint64_t count = 0;
    for (std::uint64_t i = 0; i < summary.cycle_len; ++i) {
        if (pred(z)) ++count;
        z = step(z);
    }
    return count;
}

// Membership-only walk from a state already on the cycle, with early exit.
template <class State, class Step, class Pred>
bool cycle_any(Step&& step, State on_cycle, std::uint64_t cycle_len, Pred&& pred) {
    State z = on_cycle;
    for (std::uint64_t i = 0; i < cycle_len; ++i) {
        if (pred(z)) return true;
        z = step(z);
    }
    return false;
}

struct OrbitSearch {
    enum class Status { found, absent, censored };
    Status status = Status::absent;
    std::uint64_t index = 0;
};

// Least m >= 0 with step^m(x0) = target; the orbit is eventually
// periodic so searching m < mu + lambda is exhaustive.
template <class State, class Step>
OrbitSearch orbit_contains(Step&& step, State x0, State target,
                           std::uint64_t budget = kDefaultOrbitBudget) {
    auto summary = detect_cycle(step, x0, budget);
    if (!summary) return {OrbitSearch::Status::censored, 0};
    State z = x0;
    for (std::uint64_t m = 0; m < summary->collision_time; ++m) {
        if (z == target) return {OrbitSearch::Status::found, m};
        z = step(z);
    }
    return {OrbitSearch::Status::absent, 0};
}

// Multiplier of the cycle reached from x0: product of chart-aware
// derivatives along the lambda cycle points.
FpElement cycle_multiplier(const ReducedUniMap& m, const ProjPoint& x0,
                           const OrbitSummary& summary);

}  // namespace fforbit
