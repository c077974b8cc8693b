#pragma once

// Minimal signed big integer, just enough for exact resultants:
// CRT accumulation (add, multiply by a machine word) and reduction
// modulo a machine word. Not a general-purpose bignum.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

namespace fforbit {

class BigInt {
public:
    BigInt() = default;
    BigInt(std::int64_t v) {
        if (v == 0) return;
        sign_ = v < 0 ? -1 : 1;
        std::uint64_t m = v < 0 ? ~static_cast<std::uint64_t>(v) + 1 : static_cast<std::uint64_t>(v);
        push_u64(m);
    }

    bool is_zero() const { return sign_ == 0; }
    int sign() const { return sign_; }

    // |this| compared to |other|: -1, 0, +1
    int cmp_abs(const BigInt& other) const {
        if (mag_.size() != other.mag_.size())
            return mag_.size() < other.mag_.size() ? -1 : 1;
        for (std::size_t i = mag_.size(); i-- > 0;) {
            if (mag_[i] != other.mag_[i]) return mag_[i] < other.mag_[i] ? -1 : 1;
        }
        return 0;
    }

    BigInt& operator+=(const BigInt& rhs) {
        if (rhs.sign_ == 0) return *this;
        if (sign_ == 0) { *this = rhs; return *this; }
        if (sign_ == rhs.sign_) {
            add_abs(rhs);
            return *this;
        }
        int c = cmp_abs(rhs);
        if (c == 0) { sign_ = 0; mag_.clear(); return *this; }
        if (c > 0) {
            sub_abs(rhs);
        } else {
            BigInt tmp = rhs;
            tmp.sub_abs(*this);
            *this = std::move(tmp);
        }
        return *this;
    }

    BigInt& operator-=(const BigInt& rhs) {
        BigInt neg = rhs;
        neg.sign_ = -neg.sign_;
        return *this += neg;
    }

    // In-place multiply by a non-negative machine word.
    BigInt& mul_u64(std::uint64_t f) {
        if (f == 0 || sign_ == 0) { sign_ = 0; mag_.clear(); return *this; }
        unsigned __int128 carry = 0;
        for (auto& limb : mag_) {
            unsigned __int128 t = static_cast<unsigned __int128>(limb) * f + carry;
            limb = static_cast<std::uint32_t>(t);
            carry = t >> 32;
        }
        while (carry) {
            mag_.push_back(static_cast<std::uint32_t>(carry));
            carry >>= 32;
        }
        return *this;
    }

    // |this| mod m (m > 0), ignoring sign.
    std::uint64_t mod_abs_u64(std::uint64_t m) const {
        std::uint64_t r = 0;
        for (std::size_t i = mag_.size(); i-- > 0;)
            r = ((r << 32) | mag_[i]) % m;
        return r;
    }

    // this mod m as the canonical representative in [0, m).
    std::uint64_t mod_u64(std::uint64_t m) const {
        std::uint64_t r = mod_abs_u64(m);
        if (sign_ < 0 && r != 0) r = m - r;
        return r;
    }

    // Decimal rendering; only used for diagnostics and map-file metadata.
    std::string to_string() const {
        if (sign_ == 0) return "0";
        std::vector<std::uint32_t> work = mag_;
        std::string digits;
        while (!work.empty()) {
            std::uint64_t rem = 0;
            for (std::size_t i = work.size(); i-- > 0;) {
                std::uint64_t cur = (rem << 32) | work[i];
                work[i] = static_cast<std::uint32_t>(cur / 1000000000u);
                rem = cur % 1000000000u;
            }
            while (!work.empty() && work.back() == 0) work.pop_back();
            for (int k = 0; k < 9; ++k) {
                digits.push_back(static_cast<char>('0' + rem % 10));
                rem /= 10;
            }
        }
        while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
        std::string out;
        if (sign_ < 0) out.push_back('-');
        out.append(digits.rbegin(), digits.rend());
        return out;
    }

    double approx_log2() const {
        if (sign_ == 0) return -1e300;
        std::size_t top = mag_.size() - 1;
        double head = static_cast<double>(mag_[top]);
        if (top >= 1) head += static_cast<double>(mag_[top - 1]) / 4294967296.0;
        return std::log2(head) + 32.0 * static_cast<double>(top);
    }

private:
    void push_u64(std::uint64_t m) {
        mag_.push_back(static_cast<std::uint32_t>(m));
        if (m >> 32) mag_.push_back(static_cast<std::uint32_t>(m >> 32));
        trim();
    }

    void trim() {
        while (!mag_.empty() && mag_.back() == 0) mag_.pop_back();
        if (mag_.empty()) sign_ = 0;
    }

    void add_abs(const BigInt& rhs) {
        if (mag_.size() < rhs.mag_.size()) mag_.resize(rhs.mag_.size(), 0);
        std::uint64_t carry = 0;
        for (std::size_t i = 0; i < mag_.size(); ++i) {
            std::uint64_t t = static_cast<std::uint64_t>(mag_[i]) + (i < rhs.mag_.size() ? rhs.mag_[i] : 0) + carry;
            mag_[i] = static_cast<std::uint32_t>(t);
            carry = t >> 32;
        }
        if (carry) mag_.push_back(static_cast<std::uint32_t>(carry));
    }

    // Requires |this| >= |rhs|.
    void sub_abs(const BigInt& rhs) {
        std::int64_t borrow = 0;
        for (std::size_t i = 0; i < mag_.size(); ++i) {
            std::int64_t t = static_cast<std::int64_t>(mag_[i]) - (i < rhs.mag_.size() ? rhs.mag_[i] : 0) - borrow;
            if (t < 0) { t += (1ll << 32); borrow = 1; } else { borrow = 0; }
            mag_[i] = static_cast<std::uint32_t>(t);
        }
        trim();
    }

    int sign_ = 0;
    std::vector<std::uint32_t> mag_;  // base 2^32, little endian
};

}  // namespace fforbit
