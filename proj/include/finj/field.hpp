#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace finj {

using Scalar = std::uint32_t;

/// Thrown for malformed user input (bad prime, bad polynomial text, ...).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when an internal consistency check fails. Seeing one of these means
/// a bug or a theory violation, never bad input.
struct InvariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

/// Arithmetic in Z/p for a prime p < 2^31.
class PrimeField {
public:
    explicit PrimeField(std::uint64_t p) : p_(static_cast<Scalar>(p)) {
        if (p >= (1ull << 31)) throw InputError("p too large (must be < 2^31)");
        if (!is_prime(p)) throw InputError("p not prime: " + std::to_string(p));
    }

    Scalar p() const { return p_; }

    Scalar reduce(std::int64_t v) const {
        std::int64_t r = v % static_cast<std::int64_t>(p_);
        return static_cast<Scalar>(r < 0 ? r + p_ : r);
    }
    Scalar add(Scalar a, Scalar b) const {
        Scalar s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    Scalar sub(Scalar a, Scalar b) const { return a >= b ? a - b : a + p_ - b; }
    Scalar neg(Scalar a) const { return a == 0 ? 0 : p_ - a; }
    Scalar mul(Scalar a, Scalar b) const {
        return static_cast<Scalar>((static_cast<std::uint64_t>(a) * b) % p_);
    }
    Scalar pow(Scalar a, std::uint64_t e) const {
        Scalar r = 1 % p_;
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }
    Scalar inv(Scalar a) const {
        if (a == 0) throw InvariantError("inverse of zero in F_p");
        return pow(a, p_ - 2);
    }

    friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.p_ == b.p_; }

private:
    Scalar p_;
};

} // namespace finj
