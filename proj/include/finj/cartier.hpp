#pragma once

// Frobenius pushforward: boundaries, cycles, G = F_*Omega / B, the inverse
// Cartier operator and the wedge-with-f^{p-1}df map.

#include "finj/forms.hpp"

#include <random>

namespace finj {

inline Exponents exp_add(Exponents a, const Exponents& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}
inline Exponents exp_sub(Exponents a, const Exponents& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}
inline Exponents exp_scale(Exponents a, int s) {
    for (auto& x : a) x *= s;
    return a;
}

/// Where forms live: the smooth ambient ring, Omega_X restricted modulo f^p
/// (the underlying forms of (F_*Omega_X)|_D), or forms on D.
enum class DeRhamLevel { Ambient, XModFp, OnD };

class DeRhamContext {
public:
    DeRhamContext(PrimeField k, WeightSystem w)
        : level_(DeRhamLevel::Ambient), own_(std::make_shared<QuotientRing>(k, w)), ring_(own_.get()) {}

    DeRhamContext(const HypersurfaceData& D, DeRhamLevel level) : level_(level), D_(&D), grading_(D.grading) {
        if (level == DeRhamLevel::Ambient) {
            own_ = std::make_shared<QuotientRing>(D.field(), D.weights());
            ring_ = own_.get();
            grading_ = FineGrading();
        } else {
            ring_ = level == DeRhamLevel::OnD ? D.ring.get() : D.ring_frob.get();
        }
    }

    DeRhamLevel level() const { return level_; }
    const QuotientRing& ring() const { return *ring_; }
    const FineGrading& grading() const { return grading_; }
    const HypersurfaceData* hypersurface() const { return D_; }
    const PrimeField& field() const { return ring_->field(); }
    const WeightSystem& weights() const { return ring_->weights(); }

    FormSpace space(int j, int u, const Exponents* cls = nullptr) const {
        return FormSpace(*ring_, j, u, cls ? &grading_ : nullptr, cls);
    }

    /// Class of the wedge-with-df source for target class cls.
    Exponents df_source_class(const Exponents& cls) const {
        return grading_.key(exp_sub(cls, D_->f.terms().begin()->first));
    }

    /// Relations presenting Omega^j at this level (images of ^df on D), in S coordinates.
    std::vector<Vec> relations(int j, int u, const Exponents* cls, const FormSpace& S) const {
        std::vector<Vec> out;
        if (level_ != DeRhamLevel::OnD || j == 0) return out;
        std::optional<Exponents> sc;
        if (cls) sc = df_source_class(*cls);
        FormSpace src = space(j - 1, u - D_->deg_f, sc ? &*sc : nullptr);
        const Form df = df_form(*D_);
        for (const auto& l : src.labels())
            out.push_back(vectorize(wedge(Form::basis(field(), weights(), l.mono, l.summand), df), *ring_, S));
        return out;
    }

    /// d applied to the basis of Omega^{j-1} in degree u, in S coordinates.
    std::vector<Vec> boundaries(int j, int u, const Exponents* cls, const FormSpace& S) const {
        std::vector<Vec> out;
        if (j == 0) return out;
        FormSpace src = space(j - 1, u, cls);
        for (const auto& l : src.labels()) {
            Vec v = vectorize(de_rham_d(Form::basis(field(), weights(), l.mono, l.summand)), *ring_, S);
            if (!is_zero(v)) out.push_back(std::move(v));
        }
        return out;
    }

    /// Matrix of d from Omega^j to Omega^{j+1} in degree u.
    Matrix d_matrix(const FormSpace& src, const FormSpace& tgt) const {
        return label_map_matrix(src, tgt, *ring_, [&](const BasisLabel& l) {
            return de_rham_d(Form::basis(field(), weights(), l.mono, l.summand));
        });
    }

    /// Vectors of S whose d lies in the relations of Omega^{j+1}.
    std::vector<Vec> cycles(int j, int u, const Exponents* cls, const FormSpace& S) const {
        FormSpace T = space(j + 1, u, cls);
        Matrix dm = d_matrix(S, T);
        auto rel = relations(j + 1, u, cls, T);
        std::vector<Vec> cols;
        for (std::size_t c = 0; c < S.dim(); ++c) cols.push_back(dm.column(c));
        for (auto& r : rel) cols.push_back(std::move(r));
        Echelon out(field(), S.dim());
        for (const auto& k : kernel_basis(field(), cols, T.dim()))
            out.insert(Vec(k.begin(), k.begin() + static_cast<std::ptrdiff_t>(S.dim())));
        return out.rows();
    }

private:
    DeRhamLevel level_;
    const HypersurfaceData* D_ = nullptr;
    std::shared_ptr<QuotientRing> own_;
    const QuotientRing* ring_ = nullptr;
    FineGrading grading_;
};

/// An element of F_*Omega^j: an underlying form with frob degree = degree / p.
struct FrobElement {
    Form underlying;
    Degree frob_degree;
};

inline FrobElement frob(const Form& w) {
    auto d = w.degree();
    return {w, Degree(d.value_or(0), static_cast<long>(w.field().p()))};
}

/// r . F_*w = F_*(r^p w).
inline FrobElement frob_act(const Poly& r, const FrobElement& x) {
    Form u = x.underlying.times(r.frobenius());
    return frob(u);
}

enum class BZG { B, Z, G };

struct BZGPiece {
    BZG which = BZG::B;
    int j = 0;
    Degree e;
    GradedPiece piece;
};

/// B or Z (as subspaces) or G (as the complement of B) inside (F_*Omega^j)_e.
inline BZGPiece bzg_piece(const DeRhamContext& ctx, BZG which, int j, Degree e) {
    const long p = ctx.field().p();
    BZGPiece out{which, j, e, {e, {}, {}}};
    if ((e.num() * p) % e.den() != 0) return out;
    const int u = static_cast<int>(e.num() * p / e.den());
    FormSpace S = ctx.space(j, u);
    GradedPiece amb{e, S.labels(), {}};
    Echelon rel = span(ctx.field(), S.dim(), ctx.relations(j, u, nullptr, S));
    Echelon sub(ctx.field(), S.dim());
    if (which == BZG::Z) {
        for (const auto& v : ctx.cycles(j, u, nullptr, S)) sub.insert(v);
    } else {
        for (const auto& v : ctx.boundaries(j, u, nullptr, S)) sub.insert(v);
        for (const auto& v : rel.rows()) sub.insert(v);
    }
    GradedPiece s{e, {}, {}};
    for (std::size_t r = 0; r < sub.rank(); ++r) {
        s.basis.push_back(S.labels()[sub.pivots()[r]]);
        s.embedding.push_back(sub.rows()[r]);
    }
    out.piece = which == BZG::G ? quotient_piece(ctx.field(), s, amb) : s;
    return out;
}

/// C^{-1} on a basis label x^b dx_I: x^{pb} (prod_{i in I} x_i)^{p-1} dx_I.
inline BasisLabel cartier_label(const BasisLabel& l, int p) {
    Exponents m = exp_scale(l.mono, p);
    for (int i : wedge_indices(l.summand)) m[i] += p - 1;
    return {m, l.summand};
}

/// Termwise C^{-1} on a form with polynomial coefficients (a representative of the class in G).
inline Form inverse_cartier(const Form& w) {
    const int p = static_cast<int>(w.field().p());
    Form out(w.field(), w.weights(), w.j(), w.level());
    for (const auto& [key, c] : w.terms()) {
        auto l = cartier_label({key.first, key.second}, p);
        out.add(l.mono, l.summand, c);
    }
    return out;
}

struct IsoFailure : InvariantError {
    using InvariantError::InvariantError;
};

struct CartierIsoEntry {
    int j = 0, degree = 0;
    std::size_t source_dim = 0, target_dim = 0, rank = 0;
    bool bijective = true;
};

struct CartierIsoReport {
    int n = 0;
    Scalar p = 0;
    std::vector<CartierIsoEntry> entries;
    bool pass = true;
};

/// Classes appearing among the labels of S.
inline std::vector<Exponents> classes_of(const FormSpace& S, const FineGrading& g) {
    std::set<Exponents> out;
    for (const auto& l : S.labels()) out.insert(FormSpace::class_of(g, l.mono, l.summand));
    return {out.begin(), out.end()};
}

/// C^{-1}: (Omega^j)_e -> (Z/B)_{pe} on F_p[x_0..x_{n-1}], degreewise bijectivity.
inline CartierIsoReport cartier_iso_check(int n, Scalar p, int lo, int hi) {
    PrimeField k(p);
    WeightSystem w = WeightSystem::standard(n);
    DeRhamContext ctx(k, w);
    CartierIsoReport rep{n, p, {}, true};
    for (int j = 0; j <= n; ++j)
        for (int u = lo; u <= hi; ++u) {
            CartierIsoEntry ent{j, u};
            FormSpace src = ctx.space(j, u);
            ent.source_dim = src.dim();
            FormSpace big = ctx.space(j, static_cast<int>(p) * u);
            // multidegree classes of the target; C^{-1} sends class b to p*b
            for (const auto& cls : classes_of(big, ctx.grading())) {
                FormSpace T = ctx.space(j, static_cast<int>(p) * u, &cls);
                auto sq = Subquotient::build(k, T.dim(), ctx.cycles(j, static_cast<int>(p) * u, &cls, T),
                                             ctx.boundaries(j, static_cast<int>(p) * u, &cls, T));
                ent.target_dim += sq.dim();
                std::vector<Vec> imgs;
                for (const auto& l : src.labels()) {
                    auto c = cartier_label(l, static_cast<int>(p));
                    if (FormSpace::class_of(ctx.grading(), c.mono, c.summand) != cls) continue;
                    Vec v(T.dim(), 0);
                    v[T.find(c.mono, c.summand)] = 1;
                    auto co = sq.coords(v);
                    if (!co) throw IsoFailure("C^{-1} image is not closed");
                    imgs.push_back(*co);
                }
                ent.rank += rank_of(k, imgs, sq.dim());
            }
            ent.bijective = ent.source_dim == ent.target_dim && ent.rank == ent.source_dim;
            if (!ent.bijective) rep.pass = false;
            rep.entries.push_back(ent);
        }
    return rep;
}

/// Representative of sigma(class of w) in (F_*Omega^j_X)|_D: w ^ f^{p-1} df reduced modulo f^p.
inline Form sigma_form(const Form& w, const HypersurfaceData& D) {
    Form t = Form::from_poly(D.f.pow(D.p() - 1)).scaled(1);
    Form g = wedge(t, df_form(D));
    return wedge(w, g);
}

/// Matrix of sigma: (G Omega^{j-1}_D)_e -> (G Omega^j_X|_D)_{e + deg f}, e = u/p, on ambient
/// coordinates (representatives; classes are taken modulo the B-subspaces).
inline GradedMapPiece sigma_map(int j, int u, const HypersurfaceData& D) {
    if (j < 1 || j > D.n) throw InputError("sigma_map: need 1 <= j <= n");
    DeRhamContext src(D, DeRhamLevel::OnD), tgt(D, DeRhamLevel::XModFp);
    const int p = static_cast<int>(D.p());
    FormSpace S = src.space(j - 1, u), T = tgt.space(j, u + p * D.deg_f);
    Matrix m = label_map_matrix(S, T, tgt.ring(), [&](const BasisLabel& l) {
        return sigma_form(Form::basis(D.field(), D.weights(), l.mono, l.summand), D);
    });
    return {{Degree(u, p), S.labels(), {}}, {Degree(u + p * D.deg_f, p), T.labels(), {}}, std::move(m)};
}

/// Coordinates of a form in a level's space together with the subspace it is compared modulo.
struct ClassSpace {
    FormSpace space;
    Echelon zero;  // B + relations
};

inline ClassSpace g_class_space(const DeRhamContext& ctx, int j, int u, const Exponents* cls = nullptr) {
    FormSpace S = ctx.space(j, u, cls);
    Echelon z(ctx.field(), S.dim());
    for (const auto& v : ctx.boundaries(j, u, cls, S)) z.insert(v);
    for (const auto& v : ctx.relations(j, u, cls, S)) z.insert(v);
    return {std::move(S), std::move(z)};
}

inline bool same_class(const Form& a, const Form& b, const DeRhamContext& ctx, const ClassSpace& cs) {
    Vec v = vectorize(a - b, ctx.ring(), cs.space);
    return cs.zero.contains(std::move(v));
}

/// Reduce a form with polynomial coefficients through the ring of a level (keeps it as a Form).
inline Form reduce_form(const Form& w, const QuotientRing& Q) {
    Form out(w.field(), w.weights(), w.j(), w.level());
    for (const auto& [key, c] : w.terms())
        for (const auto& [m, x] : Q.normal_form(key.first)) out.add(m, key.second, Q.field().mul(c, x));
    return out;
}

inline Form random_form(const FormSpace& S, const PrimeField& k, const WeightSystem& w, int j, std::mt19937_64& rng) {
    std::uniform_int_distribution<Scalar> coef(0, k.p() - 1);
    Form out(k, w, j);
    for (const auto& l : S.labels()) out.add(l.mono, l.summand, coef(rng));
    return out;
}

struct CommutationFailure : InvariantError {
    using InvariantError::InvariantError;
};

struct DiagramReport {
    int j = 0;
    int samples = 0;
    long checked = 0;
    long left_failures = 0, right_failures = 0, complex_failures = 0, b_failures = 0;
    bool pass = true;
};

/// Random checks of the two commuting squares, res o sigma = 0 and sigma(B) in B.
/// Degrees u are underlying degrees of the bottom row.
inline DiagramReport diagram_check(const HypersurfaceData& D, int j, int lo, int hi, int samples, std::uint64_t seed) {
    if (j < 1 || j > D.n) throw InputError("diagram_check: need 1 <= j <= n");
    DiagramReport rep{j, samples};
    DeRhamContext onD(D, DeRhamLevel::OnD), xfp(D, DeRhamLevel::XModFp);
    const auto& k = D.field();
    const auto& w = D.weights();
    const int p = static_cast<int>(D.p());
    std::mt19937_64 rng(seed);
    const Exponents fcls = D.f.terms().begin()->first;
    const auto& g = D.grading;
    for (int u = lo; u <= hi; ++u) {
        // left square, res o sigma, sigma(B): per class of Omega^{j-1}_D
        for (const auto& cls : classes_of(onD.space(j - 1, u), g)) {
            FormSpace Sd = onD.space(j - 1, u, &cls);
            const Exponents tc = g.key(exp_scale(exp_add(cls, fcls), p));
            ClassSpace top_mid = g_class_space(xfp, j, p * (u + D.deg_f), &tc);
            ClassSpace top_right_shift = g_class_space(onD, j, p * (u + D.deg_f), &tc);
            const Exponents bc = g.key(exp_scale(cls, p));
            std::optional<FormSpace> Bsrc;
            if (j >= 2) Bsrc = onD.space(j - 2, p * u, &bc);
            for (int s = 0; s < samples; ++s) {
                ++rep.checked;
                Form eta = random_form(Sd, k, w, j - 1, rng);
                Form a = sigma_form(inverse_cartier(eta), D);
                Form b = inverse_cartier(reduce_form(wedge(eta, df_form(D)), onD.ring()));
                if (!same_class(a, b, xfp, top_mid)) ++rep.left_failures;
                if (!same_class(a, Form(k, w, j), onD, top_right_shift)) ++rep.complex_failures;
                if (Bsrc && Bsrc->dim()) {
                    Form beta = de_rham_d(random_form(*Bsrc, k, w, j - 2, rng));
                    if (!same_class(sigma_form(beta, D), Form(k, w, j), xfp, top_mid)) ++rep.b_failures;
                }
            }
        }
        // right square: per class of Omega^j_X|_D
        for (const auto& cls : classes_of(onD.space(j, u), g)) {
            FormSpace Sx = onD.space(j, u, &cls);
            const Exponents tc = g.key(exp_scale(cls, p));
            ClassSpace top_right = g_class_space(onD, j, p * u, &tc);
            for (int s = 0; s < samples; ++s) {
                ++rep.checked;
                Form om = random_form(Sx, k, w, j, rng);
                Form a = reduce_form(reduce_form(inverse_cartier(om), xfp.ring()), onD.ring());
                Form b = inverse_cartier(om);
                if (!same_class(a, b, onD, top_right)) ++rep.right_failures;
            }
        }
    }
    rep.pass = rep.left_failures == 0 && rep.right_failures == 0 && rep.complex_failures == 0 && rep.b_failures == 0;
    return rep;
}

} // namespace finj
