#include "fforbit/ffield.hpp"

#include <cmath>
#include <cstring>

namespace fforbit {

namespace {

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(
        static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
    std::uint64_t acc = 1 % m;
    base %= m;
    while (e) {
        if (e & 1) acc = mulmod_u64(acc, base, m);
        base = mulmod_u64(base, base, m);
        e >>= 1;
    }
    return acc;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % q == 0) return n == q;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    // This witness set is deterministic for all n < 3.3 * 10^24.
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

std::vector<Prime> primes_below(std::uint64_t bound) {
    if (bound < 2) throw std::invalid_argument("primes_below requires bound >= 2");
    if (bound > kMaxModulus) throw std::invalid_argument("prime bound exceeds 2^31 ceiling");
    std::vector<std::uint8_t> composite(bound, 0);
    std::vector<Prime> out;
    for (std::uint64_t i = 2; i < bound; ++i) {
        if (composite[i]) continue;
        out.push_back(Prime::unchecked(static_cast<std::uint32_t>(i)));
        for (std::uint64_t j = i * i; j < bound; j += i) composite[j] = 1;
    }
    return out;
}

std::vector<Prime> first_primes(std::size_t count) {
    std::vector<Prime> out;
    out.reserve(count);
    // p_n < n (ln n + ln ln n) for n >= 6; small counts padded by the constant.
    std::uint64_t bound = 16;
    if (count > 5) {
        double n = static_cast<double>(count);
        bound = static_cast<std::uint64_t>(n * (std::log(n) + std::log(std::log(n)))) + 16;
    }
    while (true) {
        out = primes_below(bound);
        if (out.size() >= count) {
            out.erase(out.begin() + static_cast<std::ptrdiff_t>(count), out.end());
            return out;
        }
        bound *= 2;
    }
}

namespace {
void require_same_modulus(FpElement a, FpElement b) {
    if (a.modulus != b.modulus) throw modulus_mismatch();
}
}  // namespace

FpElement mod_add(FpElement a, FpElement b) {
    require_same_modulus(a, b);
    FpCtx fp(a.modulus);
    a.residue = fp.add(a.residue, b.residue);
    return a;
}

FpElement mod_sub(FpElement a, FpElement b) {
    require_same_modulus(a, b);
    FpCtx fp(a.modulus);
    a.residue = fp.sub(a.residue, b.residue);
    return a;
}

FpElement mod_mul(FpElement a, FpElement b) {
    require_same_modulus(a, b);
    FpCtx fp(a.modulus);
    a.residue = fp.mul(a.residue, b.residue);
    return a;
}

FpElement mod_pow(FpElement a, std::uint64_t e) {
    FpCtx fp(a.modulus);
    a.residue = fp.pow(a.residue, e);
    return a;
}

FpElement mod_inv(FpElement a) {
    FpCtx fp(a.modulus);
    a.residue = fp.inv(a.residue);
    return a;
}

}  // namespace fforbit
