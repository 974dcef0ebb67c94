#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace swapdp {

/// Rejected input: a precondition on user-supplied data or configuration failed.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A solve was refused because the instance exceeds the configured size guard.
struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Artifacts built from different scenarios were combined.
struct artifact_mismatch_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** Compensated accumulator for long probability/value sums. */
class KahanSum {
public:
    void add(double x) {
        const double y = x - carry_;
        const double t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

/// Shortest round-trip decimal form; locale-independent and stable across runs.
inline std::string format_double(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

/// 64-bit FNV-1a hash, used for scenario and artifact fingerprints.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hash_hex(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[h & 0xf];
        h >>= 4;
    }
    return s;
}

}  // namespace swapdp
