#pragma once

// Kahler differentials on affine space and their restrictions to D = V(f).

#include "finj/modwin.hpp"

#include <functional>
#include <random>
#include <string>

namespace finj {

enum class FormLevel { AmbientRestricted, OnD };

struct ContextMismatch : InputError {
    using InputError::InputError;
};

/// A differential form sum c * x^m dx_I with polynomial coefficients.
class Form {
public:
    using Key = std::pair<Exponents, WedgeMask>;

    Form(PrimeField k, WeightSystem w, int j, FormLevel level = FormLevel::AmbientRestricted)
        : k_(k), w_(std::move(w)), j_(j), level_(level) {}

    static Form from_poly(const Poly& g, int j = 0, WedgeMask I = 0) {
        Form out(g.field(), g.weights(), j);
        for (const auto& [e, c] : g.terms()) out.add(e, I, c);
        return out;
    }
    static Form basis(PrimeField k, WeightSystem w, const Exponents& m, WedgeMask I, Scalar c = 1) {
        Form out(k, w, wedge_degree(I));
        out.add(m, I, c);
        return out;
    }

    const PrimeField& field() const { return k_; }
    const WeightSystem& weights() const { return w_; }
    int j() const { return j_; }
    FormLevel level() const { return level_; }
    void set_level(FormLevel l) { level_ = l; }
    const std::map<Key, Scalar>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add(const Exponents& m, WedgeMask I, Scalar c) {
        c %= k_.p();
        if (!c) return;
        auto [it, ins] = terms_.try_emplace({m, I}, c);
        if (!ins) {
            it->second = k_.add(it->second, c);
            if (!it->second) terms_.erase(it);
        }
    }

    Form& operator+=(const Form& o) {
        check(o);
        for (const auto& [key, c] : o.terms_) add(key.first, key.second, c);
        return *this;
    }
    Form& operator-=(const Form& o) {
        check(o);
        for (const auto& [key, c] : o.terms_) add(key.first, key.second, k_.neg(c));
        return *this;
    }
    friend Form operator+(Form a, const Form& b) { return a += b; }
    friend Form operator-(Form a, const Form& b) { return a -= b; }

    Form scaled(Scalar s) const {
        Form out(k_, w_, j_, level_);
        for (const auto& [key, c] : terms_) out.add(key.first, key.second, k_.mul(c, s));
        return out;
    }

    Form times(const Poly& g) const {
        Form out(k_, w_, j_, level_);
        for (const auto& [key, c] : terms_)
            for (const auto& [e, v] : g.terms()) {
                Exponents m = key.first;
                for (int i = 0; i < w_.n(); ++i) m[i] += e[i];
                out.add(m, key.second, k_.mul(c, v));
            }
        return out;
    }

    /// Weighted degree (monomial degree plus weights of the dx's); nullopt if not homogeneous or zero.
    std::optional<int> degree() const {
        std::optional<int> d;
        for (const auto& [key, c] : terms_) {
            int x = w_.degree(key.first) + wedge_weight(w_, key.second);
            if (d && *d != x) return std::nullopt;
            d = x;
        }
        return d;
    }

    friend bool operator==(const Form& a, const Form& b) { return a.j_ == b.j_ && a.terms_ == b.terms_; }

    void check(const Form& o) const {
        if (!(k_ == o.k_) || !(w_ == o.w_)) throw ContextMismatch("forms live over different rings");
    }

private:
    PrimeField k_;
    WeightSystem w_;
    int j_;
    FormLevel level_;
    std::map<Key, Scalar> terms_;
};

inline Form wedge(const Form& a, const Form& b) {
    a.check(b);
    if (a.j() + b.j() > a.weights().n()) throw ContextMismatch("wedge degree exceeds n");
    const auto& k = a.field();
    Form out(k, a.weights(), a.j() + b.j(), a.level());
    for (const auto& [ka, ca] : a.terms())
        for (const auto& [kb, cb] : b.terms()) {
            int s = shuffle_sign(ka.second, kb.second);
            if (!s) continue;
            Exponents m = ka.first;
            for (std::size_t i = 0; i < m.size(); ++i) m[i] += kb.first[i];
            Scalar c = k.mul(ca, cb);
            out.add(m, ka.second | kb.second, s > 0 ? c : k.neg(c));
        }
    return out;
}

/// de Rham differential on forms with polynomial coefficients.
inline Form de_rham_d(const Form& w) {
    const auto& k = w.field();
    Form out(k, w.weights(), w.j() + 1, w.level());
    for (const auto& [key, c] : w.terms()) {
        const auto& [m, I] = key;
        for (int i = 0; i < w.weights().n(); ++i) {
            if (m[i] == 0 || ((I >> i) & 1u)) continue;
            Scalar coef = k.mul(c, k.reduce(m[i]));
            if (!coef) continue;
            Exponents mm = m;
            mm[i] -= 1;
            int s = shuffle_sign(1u << i, I);
            out.add(mm, I | (1u << i), s > 0 ? coef : k.neg(coef));
        }
    }
    return out;
}

inline Form d_of(const Poly& g) { return de_rham_d(Form::from_poly(g)); }

/// Coordinates of a form in a FormSpace after reducing coefficients modulo Q.
/// Terms that fall outside the space (other degree or class) are an error.
inline Vec vectorize(const Form& w, const QuotientRing& Q, const FormSpace& S) {
    Vec v(S.dim(), 0);
    const auto& k = Q.field();
    for (const auto& [key, c] : w.terms())
        for (const auto& [m, x] : Q.normal_form(key.first)) {
            long idx = S.find(m, key.second);
            if (idx < 0) throw InvariantError("form term outside the target piece");
            v[idx] = k.add(v[idx], k.mul(c, x));
        }
    return v;
}

inline Form form_of(const Vec& v, const FormSpace& S, const PrimeField& k, const WeightSystem& w, int j) {
    Form out(k, w, j);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i]) out.add(S.labels()[i].mono, S.labels()[i].summand, v[i]);
    return out;
}

/// Matrix of a linear map given on basis labels.
inline Matrix label_map_matrix(const FormSpace& src, const FormSpace& tgt, const QuotientRing& Q,
                               const std::function<Form(const BasisLabel&)>& on_label) {
    Matrix m(tgt.dim(), src.dim());
    for (std::size_t c = 0; c < src.dim(); ++c) m.set_column(c, vectorize(on_label(src.labels()[c]), Q, tgt));
    return m;
}

inline Form df_form(const HypersurfaceData& D) { return d_of(D.f); }

inline GradedPiece piece_of(const FormSpace& S, int u) { return {Degree(u), S.labels(), {}}; }

/// Matrix of (omega -> omega ^ df) from (Omega^{j-1}_X|_D)_e to (Omega^j_X|_D)_{e + deg f}.
inline GradedMapPiece wedge_df_map(int j, int e, const HypersurfaceData& D) {
    if (j < 1 || j > D.n) throw InputError("wedge_df_map: need 1 <= j <= n");
    FormSpace src(*D.ring, j - 1, e), tgt(*D.ring, j, e + D.deg_f);
    const Form df = df_form(D);
    Matrix m = label_map_matrix(src, tgt, *D.ring, [&](const BasisLabel& l) {
        return wedge(Form::basis(D.field(), D.weights(), l.mono, l.summand), df);
    });
    return {piece_of(src, e), piece_of(tgt, e + D.deg_f), std::move(m)};
}

/// Two forms on D agree iff their difference lies in the image of ^df.
inline bool equal_on_D(const Form& a, const Form& b, const HypersurfaceData& D) {
    Form diff = a - b;
    if (diff.is_zero()) return true;
    auto deg = diff.degree();
    if (!deg) throw InputError("equal_on_D: forms must be homogeneous");
    FormSpace S(*D.ring, a.j(), *deg);
    Vec v = vectorize(diff, *D.ring, S);
    if (a.j() == 0) return is_zero(v);
    auto phi = wedge_df_map(a.j(), *deg - D.deg_f, D);
    Echelon im(D.field(), S.dim());
    for (std::size_t c = 0; c < phi.matrix.cols; ++c) im.insert(phi.matrix.column(c));
    return im.contains(v);
}

struct ExactnessEntry {
    int degree = 0, node = 0;
    std::size_t kernel_dim = 0, image_dim = 0;
    bool exact = true;
};

struct ExactnessReport {
    int m = 0;
    std::vector<ExactnessEntry> entries;
    bool exact = true;
};

/// Exactness of 0 -> O_D -> Omega^1_X|_D -> ... -> Omega^m_X|_D (maps ^df)
/// at each node t < m, in every degree of the window.  Kernel and image are
/// compared as subspaces.
inline ExactnessReport koszul_exactness_check(const HypersurfaceData& D, int m, int lo, int hi) {
    if (m < 1 || m > D.codim_sing) throw InputError("koszul_exactness_check: need 1 <= m <= codim Sing(D)");
    ExactnessReport rep{m, {}, true};
    const auto& k = D.field();
    for (int u = lo; u <= hi; ++u)
        for (int t = 0; t < m; ++t) {
            auto out = wedge_df_map(t + 1, u, D);
            std::vector<Vec> cols;
            for (std::size_t c = 0; c < out.matrix.cols; ++c) cols.push_back(out.matrix.column(c));
            auto ker = kernel_basis(k, cols, out.matrix.rows);
            Echelon kerE = span(k, out.source.dim(), ker);
            Echelon imE(k, out.source.dim());
            if (t > 0) {
                auto in = wedge_df_map(t, u - D.deg_f, D);
                for (std::size_t c = 0; c < in.matrix.cols; ++c) imE.insert(in.matrix.column(c));
            }
            ExactnessEntry e{u, t, kerE.rank(), imE.rank(), true};
            e.exact = kerE.rank() == imE.rank() && kerE.contains_subspace(imE);
            if (!e.exact) rep.exact = false;
            rep.entries.push_back(e);
        }
    return rep;
}

/// Spanning set of (Omega^j(log E)(-E))_e for E = V(prod_{s in S} x_s), as
/// forms on affine space: (prod_{s in S \ J} x_s) dx_J ^ dx_I times monomials.
inline std::vector<Form> log_form_basis(const PrimeField& k, const WeightSystem& w, WedgeMask S, int j, int e) {
    std::vector<Form> out;
    const int n = w.n();
    for (WedgeMask K : wedge_sets(n, j)) {
        WedgeMask J = K & S;
        Exponents g(n, 0);
        for (int s : wedge_indices(S & ~J)) g[s] = 1;
        int base = w.degree(g) + wedge_weight(w, K);
        if (base > e) continue;
        for (const auto& m : monomials_of_degree(w, e - base)) {
            Exponents x = g;
            for (int i = 0; i < n; ++i) x[i] += m[i];
            out.push_back(Form::basis(k, w, x, K));
        }
    }
    return out;
}

/// The generators only (no monomial multiples), in canonical order.
inline std::vector<Form> log_form_generators(const PrimeField& k, const WeightSystem& w, WedgeMask S, int j) {
    std::vector<Form> out;
    for (WedgeMask K : wedge_sets(w.n(), j)) {
        Exponents g(w.n(), 0);
        for (int s : wedge_indices(S & ~(K & S))) g[s] = 1;
        out.push_back(Form::basis(k, w, g, K));
    }
    return out;
}

struct LogFormTrial {
    bool zero = true;
    std::string witness;  // first offending term when not zero
};

struct LogFormReport {
    std::string g;
    int k = 0;
    std::vector<LogFormTrial> trials;
    bool pass = true;
    std::string note = "identity checked over F_p; the unit u is inverted locally at the origin, so "
                       "zero in Omega^k|_{V(g)} means divisible by the monomial part of g";
};

/// Split g = u * x^a with u(0) != 0.
inline std::pair<Exponents, Poly> split_monomial_part(const Poly& g) {
    if (g.is_zero()) throw InputError("g must be nonzero");
    Exponents a(g.n(), 1 << 30);
    for (const auto& [e, c] : g.terms())
        for (int i = 0; i < g.n(); ++i) a[i] = std::min(a[i], e[i]);
    Poly u(g.field(), g.weights());
    for (const auto& [e, c] : g.terms()) {
        Exponents x = e;
        for (int i = 0; i < g.n(); ++i) x[i] -= a[i];
        u.add_term(x, c);
    }
    if (u.coeff(Exponents(g.n(), 0)) == 0) throw InputError("g must be a unit times a monomial");
    return {a, u};
}

inline Poly random_poly(const PrimeField& k, const WeightSystem& w, int max_total_degree, std::mt19937_64& rng) {
    Poly r(k, w);
    std::uniform_int_distribution<Scalar> coef(0, k.p() - 1);
    for (int t = 0; t <= max_total_degree; ++t)
        for (const auto& m : monomials_of_degree(WeightSystem::standard(w.n()), t)) r.add_term(m, coef(rng));
    return r;
}

/// Random omega in Omega^{k-1}(log E)(-E), checks omega ^ dg is zero in Omega^k|_{V(g)}.
inline LogFormReport log_form_check(const Poly& g, int k, int trials, std::uint64_t seed) {
    auto [a, u] = split_monomial_part(g);
    const auto& F = g.field();
    const auto& w = g.weights();
    if (k < 1 || k > w.n()) throw InputError("log_form_check: need 1 <= k <= n");
    WedgeMask S = 0;
    for (int i = 0; i < g.n(); ++i)
        if (a[i] > 0) S |= 1u << i;
    LogFormReport rep{to_string(g), k, {}, true};
    std::mt19937_64 rng(seed);
    const Form dg = d_of(g);
    const auto gens = log_form_generators(F, w, S, k - 1);
    for (int t = 0; t < trials; ++t) {
        Form omega(F, w, k - 1);
        for (const auto& gen : gens) omega += gen.times(random_poly(F, w, 2, rng));
        Form img = wedge(omega, dg);
        LogFormTrial tr;
        for (const auto& [key, c] : img.terms())
            if (!divides(a, key.first)) {
                tr.zero = false;
                tr.witness = to_string(BasisLabel{key.first, key.second});
                break;
            }
        if (!tr.zero) rep.pass = false;
        rep.trials.push_back(tr);
    }
    return rep;
}

} // namespace finj
