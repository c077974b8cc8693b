#pragma once

// Exact arithmetic modulo word-sized primes, plus prime generation.
// Moduli are capped below 2^31 so that every product fits a 64-bit
// intermediate; the hot loops reduce with a precomputed Barrett factor
// instead of a hardware divide.

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fforbit {

struct modulus_mismatch : std::invalid_argument {
    modulus_mismatch() : std::invalid_argument("operands have different moduli") {}
};

struct not_invertible : std::domain_error {
    not_invertible() : std::domain_error("zero has no multiplicative inverse") {}
};

inline constexpr std::uint64_t kMaxModulus = (1ull << 31);

// Deterministic Miller-Rabin, valid for every 64-bit input.
bool is_prime_u64(std::uint64_t n);

// A validated odd-or-two prime below 2^31.
class Prime {
public:
    explicit Prime(std::uint64_t v) : v_(static_cast<std::uint32_t>(v)) {
        if (v >= kMaxModulus) throw std::invalid_argument("prime exceeds 2^31 modulus ceiling");
        if (!is_prime_u64(v)) throw std::invalid_argument("value fails primality test");
    }
    std::uint32_t value() const { return v_; }
    friend bool operator==(Prime a, Prime b) { return a.v_ == b.v_; }
    friend auto operator<=>(Prime a, Prime b) { return a.v_ <=> b.v_; }

    // For sieve output, which is prime by construction.
    static Prime unchecked(std::uint32_t v) { return Prime(v, unchecked_tag{}); }

private:
    struct unchecked_tag {};
    Prime(std::uint32_t v, unchecked_tag) : v_(v) {}
    std::uint32_t v_;
};

// All primes < bound, ascending. bound >= 2.
std::vector<Prime> primes_below(std::uint64_t bound);

// The first `count` primes, ascending.
std::vector<Prime> first_primes(std::size_t count);

// Reduction context for a fixed modulus. reduce() is exact for any
// t < 2^64 (at most two correction subtractions).
struct FpCtx {
    std::uint64_t p = 0;
    std::uint64_t barrett = 0;  // floor((2^64 - 1) / p)

    FpCtx() = default;
    explicit FpCtx(std::uint64_t modulus) : p(modulus), barrett(~0ull / modulus) {}

    std::uint64_t reduce(std::uint64_t t) const {
        std::uint64_t q = static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(t) * barrett) >> 64);
        std::uint64_t r = t - q * p;
        while (r >= p) r -= p;
        return r;
    }
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const { return reduce(a * b); }
    std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
        std::uint64_t s = a + b;
        return s >= p ? s - p : s;
    }
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const {
        return a >= b ? a - b : a + p - b;
    }
    std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : p - a; }
    std::uint64_t pow(std::uint64_t base, std::uint64_t e) const {
        std::uint64_t acc = 1 % p;
        while (e) {
            if (e & 1) acc = mul(acc, base);
            base = mul(base, base);
            e >>= 1;
        }
        return acc;
    }
    std::uint64_t inv(std::uint64_t a) const {
        if (a == 0) throw not_invertible();
        return pow(a, p - 2);
    }
    // Signed integer to canonical residue.
    std::uint64_t from_int(std::int64_t v) const {
        std::int64_t r = v % static_cast<std::int64_t>(p);
        if (r < 0) r += static_cast<std::int64_t>(p);
        return static_cast<std::uint64_t>(r);
    }
};

// Value-level residue carrying its modulus; the API type. Hot loops use
// FpCtx with raw residues instead.
struct FpElement {
    std::uint64_t residue = 0;
    std::uint32_t modulus = 0;

    FpElement() = default;
    FpElement(std::uint64_t v, Prime p) : residue(v % p.value()), modulus(p.value()) {}
    static FpElement from_int(std::int64_t v, Prime p) {
        FpCtx fp(p.value());
        FpElement e;
        e.residue = fp.from_int(v);
        e.modulus = p.value();
        return e;
    }
    friend bool operator==(FpElement a, FpElement b) = default;
};

FpElement mod_add(FpElement a, FpElement b);
FpElement mod_sub(FpElement a, FpElement b);
FpElement mod_mul(FpElement a, FpElement b);
FpElement mod_pow(FpElement a, std::uint64_t e);
FpElement mod_inv(FpElement a);

inline FpElement operator+(FpElement a, FpElement b) { return mod_add(a, b); }
inline FpElement operator-(FpElement a, FpElement b) { return mod_sub(a, b); }
inline FpElement operator*(FpElement a, FpElement b) { return mod_mul(a, b); }

}  // namespace fforbit
