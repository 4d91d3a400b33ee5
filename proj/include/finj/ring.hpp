#pragma once

#include "finj/linalg.hpp"
#include "finj/poly.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

namespace finj {

/// Grading of F_p[x] by Z^n / L, where L is spanned by the differences of the
/// exponent vectors of f.  It refines the weighted grading, and f, df, d and
/// multiplication by monomials are all homogeneous for it, so every graded
/// piece splits into independent blocks.
class FineGrading {
public:
    FineGrading() = default;

    explicit FineGrading(const Poly& f) : n_(f.n()) {
        std::vector<std::vector<long long>> rows;
        const Exponents* base = nullptr;
        for (const auto& [e, c] : f.terms()) {
            if (!base) {
                base = &e;
                continue;
            }
            std::vector<long long> r(n_);
            for (int i = 0; i < n_; ++i) r[i] = e[i] - (*base)[i];
            rows.push_back(std::move(r));
        }
        hermite(rows);
    }

    /// Canonical representative of the class of e.
    Exponents key(Exponents e) const {
        for (std::size_t r = 0; r < hnf_.size(); ++r) {
            const int c = piv_[r];
            const long long h = hnf_[r][c];
            long long q = e[c] >= 0 ? e[c] / h : -((-e[c] + h - 1) / h);
            if (q == 0) continue;
            for (int i = 0; i < n_; ++i) e[i] -= static_cast<int>(q * hnf_[r][i]);
        }
        return e;
    }

    std::size_t relation_rank() const { return hnf_.size(); }

private:
    void hermite(std::vector<std::vector<long long>> rows) {
        std::size_t lead = 0;
        for (int col = 0; col < n_ && lead < rows.size(); ++col) {
            // gcd-reduce column `col` among rows[lead..]
            while (true) {
                std::size_t best = rows.size();
                for (std::size_t r = lead; r < rows.size(); ++r)
                    if (rows[r][col] != 0 && (best == rows.size() || std::llabs(rows[r][col]) < std::llabs(rows[best][col])))
                        best = r;
                if (best == rows.size()) break;
                std::swap(rows[lead], rows[best]);
                if (rows[lead][col] < 0)
                    for (auto& x : rows[lead]) x = -x;
                bool done = true;
                for (std::size_t r = lead + 1; r < rows.size(); ++r) {
                    long long q = rows[r][col] / rows[lead][col];
                    if (q)
                        for (int i = 0; i < n_; ++i) rows[r][i] -= q * rows[lead][i];
                    if (rows[r][col] != 0) done = false;
                }
                if (done) break;
            }
            if (lead < rows.size() && rows[lead][col] != 0) {
                piv_.push_back(col);
                ++lead;
            }
        }
        rows.resize(lead);
        // reduce entries above each pivot into [0, pivot)
        for (std::size_t r = 0; r < rows.size(); ++r) {
            int c = piv_[r];
            for (std::size_t s = 0; s < r; ++s) {
                long long h = rows[r][c];
                long long v = rows[s][c];
                long long q = v >= 0 ? v / h : -((-v + h - 1) / h);
                if (q)
                    for (int i = 0; i < n_; ++i) rows[s][i] -= q * rows[r][i];
            }
        }
        hnf_ = std::move(rows);
    }

    int n_ = 0;
    std::vector<std::vector<long long>> hnf_;
    std::vector<int> piv_;
};

using SparseTerms = std::vector<std::pair<Exponents, Scalar>>;

/// F_p[x] / (h) for a weighted-homogeneous h, with monomial normal forms
/// relative to the graded-lex leading monomial of h.
class QuotientRing {
public:
    explicit QuotientRing(const Poly& h)
        : k_(h.field()), w_(h.weights()), lead_(h.leading_exponent()) {
        Scalar inv = k_.inv(h.leading_coeff());
        for (const auto& [e, c] : h.terms())
            if (e != lead_) tail_.emplace_back(e, k_.neg(k_.mul(c, inv)));
    }

    /// The polynomial ring itself (no relation).
    QuotientRing(PrimeField k, WeightSystem w) : k_(k), w_(std::move(w)) {}

    const PrimeField& field() const { return k_; }
    const WeightSystem& weights() const { return w_; }
    const Exponents& lead() const { return lead_; }
    bool is_free() const { return lead_.empty(); }

    bool is_normal(const Exponents& m) const { return lead_.empty() || !divides(lead_, m); }

    /// Normal monomials of weighted degree t in graded-lex order.
    const std::vector<Exponents>& basis(int t) const {
        std::lock_guard<std::mutex> g(mu_);
        auto it = basis_.find(t);
        if (it != basis_.end()) return it->second;
        std::vector<Exponents> out;
        for (auto& m : monomials_of_degree(w_, t))
            if (is_normal(m)) out.push_back(std::move(m));
        return basis_.emplace(t, std::move(out)).first->second;
    }

    /// Normal form of a single monomial.
    SparseTerms normal_form(const Exponents& m) const {
        if (is_normal(m)) return {{m, 1}};
        std::lock_guard<std::mutex> g(mu_);
        return nf_locked(m);
    }

    SparseTerms normal_form(const Poly& g) const {
        std::map<Exponents, Scalar> acc;
        for (const auto& [e, c] : g.terms())
            for (const auto& [m, v] : normal_form(e)) acc[m] = k_.add(acc[m], k_.mul(c, v));
        SparseTerms out;
        for (auto& [m, v] : acc)
            if (v) out.emplace_back(m, v);
        return out;
    }

private:
    const SparseTerms& nf_locked(const Exponents& m) const {
        auto it = nf_.find(m);
        if (it != nf_.end()) return it->second;
        std::map<Exponents, Scalar> acc;
        Exponents q = m;
        for (std::size_t i = 0; i < q.size(); ++i) q[i] -= lead_[i];
        for (const auto& [t, c] : tail_) {
            Exponents x = t;
            for (std::size_t i = 0; i < x.size(); ++i) x[i] += q[i];
            if (is_normal(x)) {
                acc[x] = k_.add(acc[x], c);
            } else {
                SparseTerms sub = nf_locked(x);
                for (const auto& [y, v] : sub) acc[y] = k_.add(acc[y], k_.mul(c, v));
            }
        }
        SparseTerms out;
        for (auto& [y, v] : acc)
            if (v) out.emplace_back(y, v);
        return nf_.emplace(m, std::move(out)).first->second;
    }

    PrimeField k_;
    WeightSystem w_;
    Exponents lead_;
    SparseTerms tail_;
    mutable std::mutex mu_;
    mutable std::map<int, std::vector<Exponents>> basis_;
    mutable std::map<Exponents, SparseTerms> nf_;
};

enum class ValidationStatus { Ok, SmoothEverywhere };

/// A validated weighted-homogeneous hypersurface D = V(f) in affine n-space.
struct HypersurfaceData {
    Poly f;
    int n = 0;
    int d = 0;             // dim D = n - 1
    int deg_f = 0;
    int a_invariant = 0;   // deg f - sum of weights
    long tjurina = 0;      // dim R/(f, partials)
    int codim_sing = 0;    // = d for an isolated singularity
    ValidationStatus status = ValidationStatus::Ok;
    bool partials_vanish = false;

    std::shared_ptr<const QuotientRing> ring;        // R/(f)
    std::shared_ptr<const QuotientRing> ring_frob;   // R/(f^p)
    FineGrading grading;
    std::vector<Poly> partials;

    const PrimeField& field() const { return f.field(); }
    const WeightSystem& weights() const { return f.weights(); }
    Scalar p() const { return f.field().p(); }
    bool smooth() const { return status == ValidationStatus::SmoothEverywhere; }
};

struct NotHomogeneous : InputError {
    using InputError::InputError;
};
struct NotIsolatedSingularity : InputError {
    bool cap_reached = false;
    NotIsolatedSingularity(const std::string& m, bool cap) : InputError(m), cap_reached(cap) {}
};
struct DimensionTooSmall : InputError {
    using InputError::InputError;
};

/// dim_F_p of (R / (f, d_1 f, ..., d_n f))_t.
inline long jacobian_quotient_dim(const Poly& f, const std::vector<Poly>& partials, int t) {
    const auto& w = f.weights();
    const auto& k = f.field();
    auto mons = monomials_of_degree(w, t);
    if (mons.empty()) return 0;
    std::map<Exponents, std::size_t> index;
    for (std::size_t i = 0; i < mons.size(); ++i) index[mons[i]] = i;
    Echelon ideal(k, mons.size());
    auto add_multiples = [&](const Poly& g) {
        auto dg = g.degree();
        if (!dg || *dg > t) return;
        for (const auto& m : monomials_of_degree(w, t - *dg)) {
            Vec v(mons.size(), 0);
            for (const auto& [e, c] : g.terms()) {
                Exponents x = e;
                for (int i = 0; i < w.n(); ++i) x[i] += m[i];
                v[index.at(x)] = k.add(v[index.at(x)], c);
            }
            ideal.insert(std::move(v));
        }
    };
    add_multiples(f);
    for (const auto& g : partials) add_multiples(g);
    return static_cast<long>(mons.size() - ideal.rank());
}

/// Check admissibility of f and compute the numerical invariants.
inline HypersurfaceData validate_hypersurface(const Poly& f) {
    HypersurfaceData D{f, 0, 0, 0, 0, 0, 0, ValidationStatus::Ok, false, {}, {}, {}, {}};
    const auto& w = f.weights();
    D.n = w.n();
    if (f.is_zero()) throw NotHomogeneous("f is zero");
    if (!f.is_homogeneous()) throw NotHomogeneous("f is not weighted-homogeneous");
    D.deg_f = *f.degree();
    if (D.deg_f <= 0) throw NotHomogeneous("f must have positive degree");
    if (D.n < 3) throw DimensionTooSmall("need n >= 3 variables (dim D >= 2)");
    D.d = D.n - 1;
    D.a_invariant = D.deg_f - w.total();
    for (int i = 0; i < D.n; ++i) D.partials.push_back(f.partial(i));
    D.partials_vanish = std::all_of(D.partials.begin(), D.partials.end(), [](const Poly& g) { return g.is_zero(); });

    bool has_linear = false;
    for (const auto& [e, c] : f.terms())
        if (std::accumulate(e.begin(), e.end(), 0) == 1) has_linear = true;

    if (has_linear) {
        D.status = ValidationStatus::SmoothEverywhere;
        D.tjurina = 0;
        D.codim_sing = D.d + 1;
    } else {
        // Window criterion: max_w consecutive zero pieces certify finiteness.
        const int maxw = w.max_weight();
        const int cap = 4 * D.deg_f * maxw;
        int run = 0;
        long total = 0;
        bool finite = false;
        for (int t = 0; t <= cap; ++t) {
            long dim = jacobian_quotient_dim(f, D.partials, t);
            total += dim;
            run = dim == 0 ? run + 1 : 0;
            if (run >= maxw) {
                finite = true;
                break;
            }
        }
        if (!finite)
            throw NotIsolatedSingularity("NotIsolatedSingularity: Jacobian quotient not finite up to degree " +
                                             std::to_string(cap) + " (cap reached)",
                                         true);
        D.tjurina = total;
        D.codim_sing = D.d;
    }
    D.ring = std::make_shared<QuotientRing>(f);
    D.ring_frob = std::make_shared<QuotientRing>(f.frobenius());
    D.grading = FineGrading(f);
    return D;
}

} // namespace finj
