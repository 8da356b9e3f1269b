#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "lapbounds/errors.hpp"

namespace lapbounds {

// Signed arbitrary-precision integer on 32-bit limbs, little-endian.
// Just enough for exact alternating binomial sums: addition, subtraction,
// schoolbook multiplication, decimal output and a high-accuracy log.
class bigint {
public:
    bigint() = default;

    bigint(long long v) {  // NOLINT: implicit by design, mirrors integer literals
        if (v < 0) {
            negative_ = true;
            v = -v;
        }
        while (v > 0) {
            limbs_.push_back(static_cast<uint32_t>(v & 0xffffffffu));
            v >>= 32;
        }
    }

    bool is_zero() const { return limbs_.empty(); }
    bool negative() const { return negative_; }
    int sign() const { return is_zero() ? 0 : (negative_ ? -1 : 1); }

    friend bigint operator+(const bigint& a, const bigint& b) {
        if (a.negative_ == b.negative_) {
            bigint r;
            r.limbs_ = add_mag(a.limbs_, b.limbs_);
            r.negative_ = a.negative_;
            r.normalize();
            return r;
        }
        const int c = cmp_mag(a.limbs_, b.limbs_);
        bigint r;
        if (c == 0) return r;
        if (c > 0) {
            r.limbs_ = sub_mag(a.limbs_, b.limbs_);
            r.negative_ = a.negative_;
        } else {
            r.limbs_ = sub_mag(b.limbs_, a.limbs_);
            r.negative_ = b.negative_;
        }
        r.normalize();
        return r;
    }

    friend bigint operator-(const bigint& a, const bigint& b) {
        bigint nb = b;
        if (!nb.is_zero()) nb.negative_ = !nb.negative_;
        return a + nb;
    }

    bigint& operator+=(const bigint& b) { return *this = *this + b; }
    bigint& operator-=(const bigint& b) { return *this = *this - b; }

    friend bigint operator*(const bigint& a, const bigint& b) {
        bigint r;
        if (a.is_zero() || b.is_zero()) return r;
        r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
        for (size_t i = 0; i < a.limbs_.size(); ++i) {
            uint64_t carry = 0;
            const uint64_t ai = a.limbs_[i];
            for (size_t j = 0; j < b.limbs_.size(); ++j) {
                const uint64_t cur = r.limbs_[i + j] + ai * b.limbs_[j] + carry;
                r.limbs_[i + j] = static_cast<uint32_t>(cur & 0xffffffffu);
                carry = cur >> 32;
            }
            size_t k = i + b.limbs_.size();
            while (carry > 0) {
                const uint64_t cur = r.limbs_[k] + carry;
                r.limbs_[k] = static_cast<uint32_t>(cur & 0xffffffffu);
                carry = cur >> 32;
                ++k;
            }
        }
        r.negative_ = a.negative_ != b.negative_;
        r.normalize();
        return r;
    }

    friend bool operator==(const bigint& a, const bigint& b) {
        return a.negative_ == b.negative_ && a.limbs_ == b.limbs_;
    }
    friend bool operator!=(const bigint& a, const bigint& b) { return !(a == b); }

    uint32_t mod_u32(uint32_t m) const {
        if (m == 0) throw invalid_input("bigint: modulo by zero");
        uint64_t rem = 0;
        for (size_t i = limbs_.size(); i-- > 0;)
            rem = ((rem << 32) | limbs_[i]) % m;
        return static_cast<uint32_t>(rem);
    }

    size_t bit_length() const {
        if (limbs_.empty()) return 0;
        uint32_t top = limbs_.back();
        size_t bits = (limbs_.size() - 1) * 32;
        while (top > 0) {
            ++bits;
            top >>= 1;
        }
        return bits;
    }

    // Natural log of |value|. The mantissa keeps the top 128 bits exactly, so
    // the truncation contributes less than 1e-30 to the result; the final
    // double arithmetic dominates the error (~1e-16 relative).
    double log_abs() const {
        if (is_zero()) return -std::numeric_limits<double>::infinity();
        const size_t bits = bit_length();
        long double mant = 0.0L;
        const size_t take = bits > 128 ? 128 : bits;
        for (size_t k = 0; k < take; ++k) {
            const size_t pos = bits - 1 - k;  // from most significant down
            const uint32_t limb = limbs_[pos / 32];
            const int bit = static_cast<int>(pos % 32);
            mant = mant * 2.0L + ((limb >> bit) & 1u);
        }
        const long double ln2 = 0.69314718055994530942L;
        return static_cast<double>(logl(mant) + ln2 * static_cast<long double>(bits - take));
    }

    std::string to_decimal() const {
        if (is_zero()) return "0";
        std::vector<uint32_t> work = limbs_;
        std::string digits;
        while (!work.empty()) {
            uint64_t rem = 0;
            for (size_t i = work.size(); i-- > 0;) {
                const uint64_t cur = (rem << 32) | work[i];
                work[i] = static_cast<uint32_t>(cur / 1000000000u);
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
        if (negative_) out.push_back('-');
        out.append(digits.rbegin(), digits.rend());
        return out;
    }

private:
    void normalize() {
        while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
        if (limbs_.empty()) negative_ = false;
    }

    static int cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
        if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
        for (size_t i = a.size(); i-- > 0;)
            if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
        return 0;
    }

    static std::vector<uint32_t> add_mag(const std::vector<uint32_t>& a,
                                         const std::vector<uint32_t>& b) {
        const auto& big = a.size() >= b.size() ? a : b;
        const auto& small = a.size() >= b.size() ? b : a;
        std::vector<uint32_t> r(big.size() + 1, 0);
        uint64_t carry = 0;
        for (size_t i = 0; i < big.size(); ++i) {
            uint64_t cur = carry + big[i] + (i < small.size() ? small[i] : 0u);
            r[i] = static_cast<uint32_t>(cur & 0xffffffffu);
            carry = cur >> 32;
        }
        r[big.size()] = static_cast<uint32_t>(carry);
        while (!r.empty() && r.back() == 0) r.pop_back();
        return r;
    }

    // requires |a| >= |b|
    static std::vector<uint32_t> sub_mag(const std::vector<uint32_t>& a,
                                         const std::vector<uint32_t>& b) {
        std::vector<uint32_t> r(a.size(), 0);
        int64_t borrow = 0;
        for (size_t i = 0; i < a.size(); ++i) {
            int64_t cur = static_cast<int64_t>(a[i]) - borrow -
                          (i < b.size() ? static_cast<int64_t>(b[i]) : 0);
            if (cur < 0) {
                cur += (1ll << 32);
                borrow = 1;
            } else {
                borrow = 0;
            }
            r[i] = static_cast<uint32_t>(cur);
        }
        while (!r.empty() && r.back() == 0) r.pop_back();
        return r;
    }

    bool negative_ = false;
    std::vector<uint32_t> limbs_;
};

}  // namespace lapbounds
