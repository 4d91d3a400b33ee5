#pragma once

#include "finj/field.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace finj {

using Exponents = std::vector<int>;

class WeightSystem {
public:
    explicit WeightSystem(std::vector<int> w) : w_(std::move(w)) {
        if (w_.empty()) throw InputError("weight system needs at least one variable");
        for (int x : w_)
            if (x < 1) throw InputError("weights must be positive");
    }
    static WeightSystem standard(int n) { return WeightSystem(std::vector<int>(n, 1)); }

    int n() const { return static_cast<int>(w_.size()); }
    int operator[](int i) const { return w_[i]; }
    const std::vector<int>& weights() const { return w_; }
    int max_weight() const { return *std::max_element(w_.begin(), w_.end()); }
    int total() const { return std::accumulate(w_.begin(), w_.end(), 0); }

    int degree(const Exponents& e) const {
        int d = 0;
        for (int i = 0; i < n(); ++i) d += e[i] * w_[i];
        return d;
    }

    friend bool operator==(const WeightSystem& a, const WeightSystem& b) { return a.w_ == b.w_; }

private:
    std::vector<int> w_;
};

/// Graded-lex comparison: weighted degree first, then the exponent of the
/// highest-index variable, then the next one down.  x0 < x1 < ... < x{n-1}.
inline bool graded_lex_less(const WeightSystem& w, const Exponents& a, const Exponents& b) {
    int da = w.degree(a), db = w.degree(b);
    if (da != db) return da < db;
    for (int i = w.n() - 1; i >= 0; --i)
        if (a[i] != b[i]) return a[i] < b[i];
    return false;
}

inline bool divides(const Exponents& a, const Exponents& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

/// All exponent vectors of weighted degree `deg`, in graded-lex ascending order.
inline std::vector<Exponents> monomials_of_degree(const WeightSystem& w, int deg) {
    std::vector<Exponents> out;
    if (deg < 0) return out;
    Exponents cur(w.n(), 0);
    auto rec = [&](auto&& self, int var, int remaining) -> void {
        if (var < 0) {
            if (remaining == 0) out.push_back(cur);
            return;
        }
        for (int k = 0; k * w[var] <= remaining; ++k) {
            cur[var] = k;
            self(self, var - 1, remaining - k * w[var]);
        }
        cur[var] = 0;
    };
    rec(rec, w.n() - 1, deg);
    std::sort(out.begin(), out.end(),
              [&](const Exponents& a, const Exponents& b) { return graded_lex_less(w, a, b); });
    return out;
}

/// Sparse polynomial over F_p in variables x0..x{n-1}.
class Poly {
public:
    using TermMap = std::map<Exponents, Scalar>;

    Poly(PrimeField k, WeightSystem w) : k_(k), w_(std::move(w)) {}

    static Poly monomial(PrimeField k, WeightSystem w, Exponents e, Scalar c = 1) {
        Poly r(k, std::move(w));
        r.add_term(std::move(e), c);
        return r;
    }
    static Poly constant(PrimeField k, WeightSystem w, Scalar c) {
        Exponents z(w.n(), 0);
        return monomial(k, std::move(w), std::move(z), c);
    }

    const PrimeField& field() const { return k_; }
    const WeightSystem& weights() const { return w_; }
    int n() const { return w_.n(); }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    Scalar coeff(const Exponents& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? 0 : it->second;
    }

    void add_term(Exponents e, Scalar c) {
        c %= k_.p();
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(std::move(e), c);
        if (!inserted) {
            it->second = k_.add(it->second, c);
            if (it->second == 0) terms_.erase(it);
        }
    }

    bool is_homogeneous() const {
        if (terms_.empty()) return true;
        int d = w_.degree(terms_.begin()->first);
        for (const auto& [e, c] : terms_)
            if (w_.degree(e) != d) return false;
        return true;
    }

    /// Weighted degree of a homogeneous polynomial (nullopt for zero or mixed).
    std::optional<int> degree() const {
        if (terms_.empty() || !is_homogeneous()) return std::nullopt;
        return w_.degree(terms_.begin()->first);
    }

    const Exponents& leading_exponent() const {
        if (terms_.empty()) throw InvariantError("leading term of zero polynomial");
        auto best = terms_.begin();
        for (auto it = terms_.begin(); it != terms_.end(); ++it)
            if (graded_lex_less(w_, best->first, it->first)) best = it;
        return best->first;
    }
    Scalar leading_coeff() const { return coeff(leading_exponent()); }

    Poly& operator+=(const Poly& o) {
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        for (const auto& [e, c] : o.terms_) add_term(e, k_.neg(c));
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

    Poly scaled(Scalar s) const {
        Poly r(k_, w_);
        for (const auto& [e, c] : terms_) r.add_term(e, k_.mul(c, s));
        return r;
    }

    Poly times_monomial(const Exponents& m, Scalar s = 1) const {
        Poly r(k_, w_);
        for (const auto& [e, c] : terms_) {
            Exponents x = e;
            for (int i = 0; i < n(); ++i) x[i] += m[i];
            r.add_term(std::move(x), k_.mul(c, s));
        }
        return r;
    }

    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly r(a.k_, a.w_);
        for (const auto& [e, c] : b.terms_) r += a.times_monomial(e, c);
        return r;
    }

    Poly pow(unsigned e) const {
        Poly r = constant(k_, w_, 1);
        for (unsigned i = 0; i < e; ++i) r = r * *this;
        return r;
    }

    /// g^p, computed as the coefficientwise Frobenius (exact in characteristic p).
    Poly frobenius() const {
        Poly r(k_, w_);
        for (const auto& [e, c] : terms_) {
            Exponents x = e;
            for (int& v : x) v *= static_cast<int>(k_.p());
            r.add_term(std::move(x), c);
        }
        return r;
    }

    Poly partial(int i) const {
        if (i < 0 || i >= n()) throw InputError("partial derivative index out of range");
        Poly r(k_, w_);
        for (const auto& [e, c] : terms_) {
            if (e[i] == 0) continue;
            Exponents x = e;
            x[i] -= 1;
            r.add_term(std::move(x), k_.mul(c, k_.reduce(e[i])));
        }
        return r;
    }

    friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }

private:
    PrimeField k_;
    WeightSystem w_;
    TermMap terms_;
};

/// Canonical text form: terms in descending graded-lex order, e.g. "2*x0^2 + x1*x2".
inline std::string to_string(const Poly& g) {
    if (g.is_zero()) return "0";
    std::vector<std::pair<Exponents, Scalar>> ts(g.terms().begin(), g.terms().end());
    std::sort(ts.begin(), ts.end(), [&](const auto& a, const auto& b) {
        return graded_lex_less(g.weights(), b.first, a.first);
    });
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : ts) {
        if (!first) os << " + ";
        first = false;
        std::vector<std::string> factors;
        for (int i = 0; i < g.n(); ++i) {
            if (e[i] == 0) continue;
            std::string v = "x" + std::to_string(i);
            if (e[i] > 1) v += "^" + std::to_string(e[i]);
            factors.push_back(v);
        }
        if (c != 1 || factors.empty()) factors.insert(factors.begin(), std::to_string(c));
        for (std::size_t k = 0; k < factors.size(); ++k) os << (k ? "*" : "") << factors[k];
    }
    return os.str();
}

namespace detail {

class PolyParser {
public:
    PolyParser(std::string_view s, const PrimeField& k, const WeightSystem& w) : s_(s), k_(k), w_(w) {}

    Poly parse() {
        skip();
        if (pos_ >= s_.size()) fail("empty polynomial");
        Poly out = expr();
        skip();
        if (pos_ < s_.size()) {
            if (s_[pos_] == ')') fail("unbalanced ')'");
            fail("unexpected character '" + std::string(1, s_[pos_]) + "' (implicit multiplication is not allowed)");
        }
        return out;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw InputError("syntax error at position " + std::to_string(pos_) + ": " + what);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool peek(char c) {
        skip();
        return pos_ < s_.size() && s_[pos_] == c;
    }
    std::uint64_t integer() {
        skip();
        if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
            fail("expected integer");
        std::uint64_t v = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            if (v > (1ull << 58)) fail("integer literal too large");
            v = v * 10 + static_cast<unsigned>(s_[pos_++] - '0');
        }
        return v;
    }
    // expr := [+-] term ([+-] term)*
    Poly expr() {
        Poly out(k_, w_);
        bool first = true;
        while (true) {
            bool negative = false;
            if (peek('+') || peek('-')) {
                negative = s_[pos_] == '-';
                ++pos_;
            } else if (!first) {
                break;
            }
            first = false;
            Poly t = term();
            out = negative ? out - t : out + t;
            if (!peek('+') && !peek('-')) break;
        }
        return out;
    }

    // term := factor (* factor)*
    Poly term() {
        Poly out = factor();
        while (peek('*')) {
            ++pos_;
            out = out * factor();
        }
        return out;
    }

    // factor := primary [^ integer]
    Poly factor() {
        Poly base = primary();
        if (peek('^')) {
            ++pos_;
            std::uint64_t e = integer();
            if (e > 100000) fail("exponent too large");
            base = base.pow(static_cast<unsigned>(e));
        }
        return base;
    }

    Poly primary() {
        skip();
        if (peek('(')) {
            ++pos_;
            Poly inner = expr();
            if (!peek(')')) fail("expected ')'");
            ++pos_;
            return inner;
        }
        if (peek('x')) {
            ++pos_;
            std::size_t at = pos_;
            std::uint64_t idx = integer();
            if (idx >= static_cast<std::uint64_t>(w_.n())) {
                pos_ = at;
                fail("variable index x" + std::to_string(idx) + " >= n = " + std::to_string(w_.n()));
            }
            Exponents e(w_.n(), 0);
            e[idx] = 1;
            return Poly::monomial(k_, w_, std::move(e));
        }
        if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            return Poly::constant(k_, w_, static_cast<Scalar>(integer() % k_.p()));
        fail("expected variable, integer or '('");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    const PrimeField& k_;
    const WeightSystem& w_;
};

} // namespace detail

inline Poly parse_poly(std::string_view text, const PrimeField& k, const WeightSystem& w) {
    return detail::PolyParser(text, k, w).parse();
}

/// Remainder of g on division by f: no term of the result is divisible by the
/// graded-lex leading monomial of f.
inline Poly normal_form_mod(const Poly& g, const Poly& f) {
    if (f.is_zero()) throw InvariantError("division by the zero polynomial");
    const auto& k = g.field();
    const Exponents lead = f.leading_exponent();
    const Scalar lead_inv = k.inv(f.leading_coeff());
    Poly r = g;
    const auto& w = g.weights();
    while (true) {
        const Exponents* best = nullptr;
        for (const auto& [e, c] : r.terms())
            if (divides(lead, e) && (!best || graded_lex_less(w, *best, e))) best = &e;
        if (!best) return r;
        Exponents q = *best;
        Scalar c = k.mul(r.coeff(q), lead_inv);
        for (int i = 0; i < g.n(); ++i) q[i] -= lead[i];
        r -= f.times_monomial(q, c);
    }
}

} // namespace finj
