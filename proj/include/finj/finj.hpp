#pragma once

// m-F-injectivity: injectivity of C^{-1} on H^{d-j}_m(Omega^j_D) for j <= m,
// plus the descent, socle-chain and K/theta checks.

#include "finj/localcoh.hpp"

namespace finj {

enum class Verdict { Injective, NotInjective, Undetermined };

inline std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::Injective: return "injective";
    case Verdict::NotInjective: return "not-injective";
    default: return "undetermined";
    }
}

struct DegreeResult {
    Degree degree;
    std::size_t source_dim = 0;
    std::optional<std::size_t> rank;  // empty when the target piece was out of budget
    std::optional<bool> injective;
};

struct LevelResult {
    int j = 0;
    std::vector<DegreeResult> degrees;
    Verdict verdict = Verdict::Undetermined;
    bool socle_injective = false;
    std::size_t socle_dim = 0;
    int source_N = 0, target_N = 0;
    bool ranks_deduced = false;  // injective on the socle, hence everywhere
    std::string note;

    bool injective() const { return verdict == Verdict::Injective; }
};

struct CheckOptions {
    int jobs = 1;
    int ncap = 0;
    std::size_t budget = kDefaultBudget;
    std::optional<std::pair<int, int>> window;  // source degree window override
    bool full_map = false;                      // compute every degree even when the socle decides
    bool degree_ranks = true;                   // per-degree ranks after a failed socle test
};

inline ModuleSpec source_spec(int j) { return {j == 0 ? ModuleKind::OD : ModuleKind::OmegaD, j, false}; }

/// Source window: around the a-invariant for the finite-length levels; for
/// j = 0 the degrees a - max_w .. a (the socle sits in degree a).
inline std::pair<int, int> level_window(const HypersurfaceData& D, int j, const CheckOptions& opt) {
    if (opt.window) return *opt.window;
    if (j == 0) return {D.a_invariant - D.weights().max_weight(), D.a_invariant};
    return default_window(D);
}

/// The stabilized source at the common stage N, re-read at that stage.
inline StabilizedLocalCoh restage(const KoszulEngine& E, const StabilizedLocalCoh& H, int N) {
    StabilizedLocalCoh out = H;
    out.N = N;
    out.pieces.clear();
    for (const auto& pc : H.pieces) {
        auto st = E.stage(H.i, N, pc.b, pc.chi);
        if (st->dim() != pc.dim()) throw InvariantError("stage dimension changed after stabilization");
        out.pieces.push_back({pc.b, pc.chi, st});
    }
    return out;
}

/// C^{-1} applied componentwise: a stage vector of the source to the target stage.
inline Vec cartier_on_stage(const KoszulEngine& src, const KoszulStage& a, const KoszulEngine& tgt,
                            const KoszulStage& b, const Vec& v) {
    const int p = static_cast<int>(src.module().field().p());
    const auto& ring = tgt.module().ctx().ring();
    const auto& k = src.module().field();
    Vec out(b.total, 0);
    for (std::size_t c = 0; c < a.comps.size(); ++c) {
        const auto& pa = *a.pieces[c];
        Vec part(v.begin() + static_cast<std::ptrdiff_t>(a.offsets[c]),
                 v.begin() + static_cast<std::ptrdiff_t>(a.offsets[c] + pa.sq.dim()));
        if (is_zero(part)) continue;
        Vec amb = pa.sq.lift(part);
        const auto& pb = *b.pieces[c];
        Vec img(pb.space.dim(), 0);
        for (std::size_t q = 0; q < amb.size(); ++q) {
            if (!amb[q]) continue;
            auto l = cartier_label(pa.space.labels()[q], p);
            for (const auto& [m, x] : ring.normal_form(l.mono)) {
                long idx = pb.space.find(m, l.summand);
                if (idx < 0) throw InvariantError("C^{-1} leaves the target piece");
                img[idx] = k.add(img[idx], k.mul(amb[q], x));
            }
        }
        auto co = pb.sq.coords(img);
        if (!co) throw InvariantError("C^{-1} image outside the target module");
        std::copy(co->begin(), co->end(), out.begin() + static_cast<std::ptrdiff_t>(b.offsets[c]));
    }
    return out;
}

/// Images of the given H-coordinate vectors of a source piece, in H coordinates of the target stage.
inline std::vector<Vec> cartier_images(const KoszulEngine& ES, const LocalCohPiece& pc, const KoszulEngine& ET,
                                       int N, const std::vector<Vec>& vs) {
    const int p = static_cast<int>(ES.module().field().p());
    const auto& k = ES.module().field();
    auto tst = ET.stage(pc.stage->i, N, p * pc.b, ET.module().grading().key(exp_scale(pc.chi, p)));
    std::vector<Vec> out;
    for (const auto& c : vs) {
        Vec v(pc.stage->total, 0);
        for (std::size_t q = 0; q < c.size(); ++q) axpy(k, v, pc.stage->H.basis_vector(q), c[q]);
        Vec img = cartier_on_stage(ES, *pc.stage, ET, *tst, v);
        auto co = tst->H.coords(img);
        if (!co) throw InvariantError("C^{-1} is not a chain map on the Koszul model");
        out.push_back(std::move(*co));
    }
    return out;
}

inline std::vector<Vec> unit_vectors(std::size_t n) {
    std::vector<Vec> out(n, Vec(n, 0));
    for (std::size_t q = 0; q < n; ++q) out[q][q] = 1;
    return out;
}

/// Injectivity of C^{-1}: H^{d-j}_m(Omega^j_D) -> H^{d-j}_m(G Omega^j_D).
/// The kernel is a submodule, so the socle decides; per-degree ranks are
/// computed only when needed (or when full_map is set).
inline LevelResult check_level(const HypersurfaceData& D, int j, const CheckOptions& opt = {}) {
    if (j < 0 || j > D.d - 2) throw RangeError("check_level: need 0 <= j <= d - 2");
    LevelResult res;
    res.j = j;
    const int i = D.d - j;
    const int p = static_cast<int>(D.p());
    const auto& k = D.field();
    const int ncap = opt.ncap ? opt.ncap : default_ncap(D);
    StabilizeOptions so;
    so.jobs = opt.jobs;
    so.finite_length = j > 0;
    try {
        GradedModule S(D, source_spec(j), opt.budget);
        GradedModule T(D, {ModuleKind::GD, j, true}, opt.budget);
        KoszulEngine ES(S, koszul_parameters(D)), ET(T, koszul_parameters(D));
        auto [lo, hi] = level_window(D, j, opt);
        auto HS = stabilize(ES, i, lo, hi, so, ncap);
        res.source_N = HS.N;
        auto target_cells = [&](const std::vector<const LocalCohPiece*>& pcs) {
            std::vector<std::pair<int, Exponents>> cells;
            for (auto* pc : pcs) cells.emplace_back(p * pc->b, T.grading().key(exp_scale(pc->chi, p)));
            return cells;
        };
        auto soc0 = socle(ES, HS);
        std::vector<const LocalCohPiece*> socle_pcs;
        for (auto& [pc, basis] : soc0.bases) socle_pcs.push_back(pc);
        int N = HS.N;
        if (!socle_pcs.empty()) {
            auto HT = stabilize(ET, i, 0, 0, so, ncap, target_cells(socle_pcs));
            res.target_N = HT.N;
            N = std::max(N, HT.N);
        }
        auto HSn = N == HS.N ? HS : restage(ES, HS, N);
        auto soc = socle(ES, HSn);
        res.socle_dim = soc.total;
        bool soc_inj = true;
        for (const auto& [pc, basis] : soc.bases) {
            auto imgs = cartier_images(ES, *pc, ET, N, basis);
            if (rank_of(k, imgs, imgs.empty() ? 0 : imgs[0].size()) != basis.size()) soc_inj = false;
        }
        res.socle_injective = soc_inj;
        res.verdict = soc_inj ? Verdict::Injective : Verdict::NotInjective;

        std::map<int, DegreeResult> per;
        for (const auto& pc : HSn.pieces) {
            auto& d = per.try_emplace(pc.b, DegreeResult{Degree(pc.b), 0, std::size_t{0}, std::nullopt}).first->second;
            d.source_dim += pc.dim();
        }
        if (!soc_inj && !opt.degree_ranks && !opt.full_map) {
            for (auto& [b, d] : per) d.rank.reset();
        } else if (soc_inj && !opt.full_map) {
            res.ranks_deduced = true;
            for (auto& [b, d] : per) {
                d.rank = d.source_dim;
                d.injective = true;
            }
        } else {
            // every cell, each against its own target stage
            std::vector<const LocalCohPiece*> all;
            for (const auto& pc : HSn.pieces) all.push_back(&pc);
            std::vector<std::optional<std::size_t>> ranks(all.size());
            std::vector<std::pair<int, Exponents>> cells = target_cells(all);
            for (std::size_t q = 0; q < all.size(); ++q) {
                try {
                    auto HT = stabilize(ET, i, 0, 0, so, ncap, {cells[q]});
                    int Nq = std::max(HT.N, HS.N);
                    auto src = Nq == N ? *all[q] : LocalCohPiece{all[q]->b, all[q]->chi, ES.stage(i, Nq, all[q]->b, all[q]->chi)};
                    if (src.dim() != all[q]->dim()) throw InvariantError("stage dimension changed after stabilization");
                    auto imgs = cartier_images(ES, src, ET, Nq, unit_vectors(src.dim()));
                    ranks[q] = rank_of(k, imgs, imgs.empty() ? 0 : imgs[0].size());
                } catch (const BudgetExceeded&) {
                } catch (const NoStabilization&) {
                }
                ET.clear_cache();
                T.clear_cache();
            }
            for (std::size_t q = 0; q < all.size(); ++q) {
                auto& d = per[all[q]->b];
                if (!d.rank) continue;
                if (ranks[q]) d.rank = *d.rank + *ranks[q];
                else d.rank.reset();
            }
            bool all_inj = true, any_unknown = false;
            for (auto& [b, d] : per) {
                if (d.rank) {
                    d.injective = *d.rank == d.source_dim;
                    all_inj = all_inj && *d.injective;
                } else {
                    any_unknown = true;
                }
            }
            if (soc_inj && !all_inj) throw InvariantError("injective on the socle but not degreewise");
            if (!soc_inj && all_inj && !any_unknown) throw InvariantError("degreewise injective but not on the socle");
        }
        for (auto& [b, d] : per) res.degrees.push_back(d);
    } catch (const BudgetExceeded& e) {
        res.verdict = Verdict::Undetermined;
        res.note = e.what();
    } catch (const NoStabilization& e) {
        res.verdict = Verdict::Undetermined;
        res.note = e.what();
    }
    return res;
}

struct FInjReport {
    HypersurfaceData data;
    int m = 0;
    bool codim_ok = false;
    std::vector<LevelResult> levels;
    bool vanishing_ok = true;
    Verdict verdict = Verdict::Undetermined;
    std::optional<int> failing_level;
    std::string note;
    int stabilization_N = 0;
};

/// Definition-level check: codimension clause plus levels 0..m.
inline FInjReport check_m_F_injective(const HypersurfaceData& D, int m, const CheckOptions& opt = {}) {
    if (m < 0) throw InputError("m must be >= 0");
    FInjReport rep{D, m, false, {}, true, Verdict::Undetermined, std::nullopt, "", 0};
    if (D.smooth()) {
        rep.codim_ok = true;
        for (int j = 0; j <= m; ++j) {
            LevelResult l;
            l.j = j;
            l.verdict = Verdict::Injective;
            l.socle_injective = true;
            l.note = "smooth: C^{-1} is an isomorphism";
            rep.levels.push_back(l);
        }
        rep.verdict = Verdict::Injective;
        return rep;
    }
    rep.codim_ok = 2 * m + 1 <= D.codim_sing;
    const int top = std::min(m, D.d - 2);
    bool undet = false, fail = false;
    for (int j = 0; j <= top; ++j) {
        rep.levels.push_back(check_level(D, j, opt));
        const auto& l = rep.levels.back();
        rep.stabilization_N = std::max({rep.stabilization_N, l.source_N, l.target_N});
        if (l.verdict == Verdict::Undetermined) undet = true;
        if (l.verdict == Verdict::NotInjective && !rep.failing_level) {
            fail = true;
            rep.failing_level = j;
        }
    }
    if (top >= 0) {
        SuiteOptions so;
        so.jobs = opt.jobs;
        so.ncap = opt.ncap;
        so.budget = opt.budget;
        so.include_bz = false;
        try {
            rep.vanishing_ok = vanishing_suite(D, top, so).pass;
        } catch (const std::exception& e) {
            rep.vanishing_ok = false;
            rep.note = e.what();
        }
    }
    if (m > D.d - 2) rep.note = "levels above d - 2 are not checked";
    if (!rep.codim_ok) {
        rep.verdict = Verdict::NotInjective;
        if (rep.note.empty()) rep.note = "codimension condition 2m + 1 <= codim Sing(D) fails";
    } else if (fail) {
        rep.verdict = Verdict::NotInjective;
    } else if (undet || !rep.vanishing_ok) {
        rep.verdict = Verdict::Undetermined;
    } else {
        rep.verdict = Verdict::Injective;
    }
    return rep;
}

/// Level 0 on the inverse-polynomial model: xi -> f^{p-1} xi^p on H^d_m(O_D).
struct FrobeniusOracleResult {
    std::map<int, std::pair<std::size_t, std::size_t>> per_degree;  // e -> (dim, rank)
    std::size_t socle_dim = 0;
    bool socle_injective = false;
    bool injective = false;
};

inline FrobeniusOracleResult frobenius_oracle(const HypersurfaceData& D, int lo, int hi) {
    InversePolyModel M(D);
    const auto& k = D.field();
    FrobeniusOracleResult out;
    bool inj = true;
    for (int e = lo; e <= hi; ++e) {
        auto basis = M.hd_basis(e);
        if (basis.empty()) continue;
        std::vector<Vec> imgs;
        for (const auto& xi : basis) imgs.push_back(M.frobenius(e, xi));
        std::size_t r = rank_of(k, imgs, imgs[0].size());
        out.per_degree[e] = {basis.size(), r};
        if (r != basis.size()) inj = false;
        // socle: killed by every variable
        std::vector<Vec> acts;
        std::size_t tot = 0;
        for (const auto& xi : basis) {
            Vec col;
            for (int v = 0; v < D.n; ++v) {
                Exponents ev(D.n, 0);
                ev[v] = 1;
                auto y = M.multiply(Poly::monomial(k, D.weights(), ev), e - D.deg_f, xi);
                col.insert(col.end(), y.begin(), y.end());
            }
            tot = col.size();
            acts.push_back(std::move(col));
        }
        auto ker = kernel_basis(k, acts, tot);
        for (const auto& c : ker) {
            Vec xi(basis[0].size(), 0);
            for (std::size_t q = 0; q < c.size(); ++q) axpy(k, xi, basis[q], c[q]);
            ++out.socle_dim;
            if (!is_zero(M.frobenius(e, xi))) out.socle_injective = true;
        }
    }
    out.injective = inj;
    return out;
}

struct DescentReport {
    int m = 0;
    std::vector<Verdict> levels;
    bool vacuous = false;    // level m not injective
    bool determined = true;  // false when a lower level could not be decided
};

struct DescentViolation : InvariantError {
    DescentViolation(int j, const std::string& degree)
        : InvariantError("descent violated at level " + std::to_string(j) + ", degree " + degree), j(j), degree(degree) {}
    int j;
    std::string degree;
};

/// Level m injective implies every lower level injective.
inline DescentReport descent_check(const HypersurfaceData& D, int m, const CheckOptions& opt = {}) {
    if (m < 0 || m > D.d - 2) throw RangeError("descent check: need 0 <= m <= d - 2");
    DescentReport rep{m, {}, false, true};
    CheckOptions o = opt;
    o.degree_ranks = false;
    std::vector<LevelResult> ls;
    for (int j = 0; j <= m; ++j) {
        ls.push_back(check_level(D, j, o));
        rep.levels.push_back(ls.back().verdict);
    }
    if (rep.levels[m] != Verdict::Injective) {
        rep.vacuous = true;
        rep.determined = rep.levels[m] == Verdict::NotInjective;
        return rep;
    }
    for (int j = 0; j < m; ++j) {
        if (rep.levels[j] == Verdict::Undetermined) rep.determined = false;
        if (rep.levels[j] != Verdict::NotInjective) continue;
        std::string deg = "socle";
        for (const auto& d : ls[j].degrees)
            if (d.injective && !*d.injective) {
                deg = d.degree.str();
                break;
            }
        throw DescentViolation(j, deg);
    }
    return rep;
}

struct SocleChainFailure : InvariantError {
    using InvariantError::InvariantError;
};

struct SocleChainReport {
    int j = 0;
    int source_degree = 0, target_degree = 0;
    std::size_t source_socle_dim = 0, target_socle_dim = 0;
    bool image_nonzero = false, image_in_socle = false;
    int N = 0;
    bool isomorphism = false;
};

/// Connecting map of 0 -> Omega^{j-1}_D(-deg f) -> Omega^j_X|_D -> Omega^j_D -> 0
/// on H_m, restricted to socles.
inline SocleChainReport socle_chain_check(const HypersurfaceData& D, int j, const CheckOptions& opt = {}) {
    if (j < 1 || j > D.d - 2) throw RangeError("socle_chain_check: need 1 <= j <= d - 2");
    SocleChainReport rep;
    rep.j = j;
    const int i = D.d - j;
    const auto& k = D.field();
    const int ncap = opt.ncap ? opt.ncap : default_ncap(D);
    GradedModule C(D, source_spec(j), opt.budget), A(D, source_spec(j - 1), opt.budget),
        M(D, {ModuleKind::OmegaXD, j, false}, opt.budget);
    auto params = koszul_parameters(D);
    KoszulEngine EC(C, params), EA(A, params), EM(M, params);
    StabilizeOptions so;
    so.jobs = opt.jobs;
    auto [lo, hi] = level_window(D, j, opt);
    auto HC = stabilize(EC, i, lo, hi, so, ncap);
    auto socC = socle(EC, HC);
    rep.source_socle_dim = socC.total;
    StabilizeOptions sa = so;
    sa.finite_length = j - 1 > 0;
    auto [alo, ahi] = level_window(D, j - 1, opt);
    auto HA = stabilize(EA, i + 1, alo, ahi, sa, ncap);
    auto socA = socle(EA, HA);
    rep.target_socle_dim = socA.total;
    if (socC.total != 1 || socA.total != 1) throw SocleChainFailure("socles are not one-dimensional");
    const LocalCohPiece& pc = *socC.bases[0].first;
    rep.source_degree = pc.b;
    const int b2 = pc.b - D.deg_f;
    const Exponents chi2 = A.grading().key(exp_sub(pc.chi, D.f.terms().begin()->first));
    rep.target_degree = b2;
    auto HA2 = stabilize(EA, i + 1, 0, 0, sa, ncap, {{b2, chi2}});
    const int N = std::max({HC.N, HA.N, HA2.N});
    rep.N = N;

    // socle generator at stage N
    StabilizedLocalCoh one = HC;
    one.N = N;
    one.pieces = {{pc.b, pc.chi, EC.stage(i, N, pc.b, pc.chi)}};
    auto soc = socle(EC, one);
    if (soc.total != 1) throw SocleChainFailure("socle changed between stages");
    const auto& st = *one.pieces[0].stage;
    Vec z(st.total, 0);
    for (std::size_t q = 0; q < soc.bases[0].second[0].size(); ++q)
        axpy(k, z, st.H.basis_vector(q), soc.bases[0].second[0][q]);

    // lift to Omega^j_X|_D, apply the Koszul differential there
    auto lm = EM.layout(i, N, pc.b, pc.chi);
    auto lm1 = EM.layout(i + 1, N, pc.b, pc.chi);
    Vec lifted(lm.total, 0);
    for (std::size_t c = 0; c < st.comps.size(); ++c) {
        const auto& pcC = *st.pieces[c];
        Vec part(z.begin() + static_cast<std::ptrdiff_t>(st.offsets[c]),
                 z.begin() + static_cast<std::ptrdiff_t>(st.offsets[c] + pcC.sq.dim()));
        Vec amb = pcC.sq.lift(part);
        if (amb.size() != lm.pieces[c]->sq.ambient_dim()) throw InvariantError("lift: ambient mismatch");
        auto co = lm.pieces[c]->sq.coords(amb);
        std::copy(co->begin(), co->end(), lifted.begin() + static_cast<std::ptrdiff_t>(lm.offsets[c]));
    }
    Vec y = apply(k, EM.differential(lm, lm1, N), lifted);

    // pull back through ^df into Omega^{j-1}_D at level i + 1
    auto sta = EA.stage(i + 1, N, b2, chi2);
    Vec w(sta->total, 0);
    const Form df = df_form(D);
    for (std::size_t c = 0; c < lm1.comps.size(); ++c) {
        const auto& pm = *lm1.pieces[c];
        const auto& pa = *sta->pieces[c];
        Vec part(y.begin() + static_cast<std::ptrdiff_t>(lm1.offsets[c]),
                 y.begin() + static_cast<std::ptrdiff_t>(lm1.offsets[c] + pm.sq.dim()));
        if (is_zero(part)) continue;
        std::vector<Vec> cols;
        for (const auto& l : pa.space.labels())
            cols.push_back(vectorize(wedge(Form::basis(k, D.weights(), l.mono, l.summand), df), M.ctx().ring(), pm.space));
        cols.push_back(part);
        Vec pre;
        for (const auto& kv : kernel_basis(k, cols, pm.space.dim()))
            if (kv.back()) {
                Scalar s = k.neg(k.inv(kv.back()));
                pre.assign(kv.begin(), kv.end() - 1);
                for (auto& x : pre) x = k.mul(x, s);
                break;
            }
        if (pre.empty()) throw SocleChainFailure("boundary not in the image of ^df");
        auto co = pa.sq.coords(pre);
        std::copy(co->begin(), co->end(), w.begin() + static_cast<std::ptrdiff_t>(sta->offsets[c]));
    }
    auto h = sta->H.coords(w);
    if (!h) throw SocleChainFailure("connecting map does not land in cycles");
    rep.image_nonzero = !is_zero(*h);
    rep.image_in_socle = true;
    for (int v = 0; v < D.n; ++v) {
        Exponents ev(D.n, 0);
        ev[v] = 1;
        auto nb = EA.stage(i + 1, N, b2 + D.weights()[v], A.grading().key(exp_add(chi2, ev)));
        if (!nb->dim()) continue;
        if (!is_zero(apply(k, EA.action(*sta, *nb, v), *h))) rep.image_in_socle = false;
    }
    rep.isomorphism = rep.image_nonzero && rep.image_in_socle;
    if (!rep.isomorphism) throw SocleChainFailure("connecting map is not an isomorphism on socles");
    return rep;
}

struct FactorizationFailure : InvariantError {
    using InvariantError::InvariantError;
};

struct KThetaReport {
    int j = 0;
    int samples = 0;
    long checked = 0;
    long outside_k = 0, mismatches = 0;
    std::map<int, std::size_t> k_dims;  // underlying degree of Omega^{j-1}_D -> dim K (mod B)
    bool pass = true;
};

/// theta(eta) = C^{-1}(eta ^ df) lies in K = ker(res) and equals sigma(C^{-1} eta) mod B.
inline KThetaReport K_theta_factorization_check(const HypersurfaceData& D, int j, int samples, std::uint64_t seed = 1,
                                                std::optional<std::pair<int, int>> window = std::nullopt) {
    if (j < 1 || j > D.d - 2) throw RangeError("K_theta_factorization_check: need 1 <= j <= d - 2");
    KThetaReport rep;
    rep.j = j;
    rep.samples = samples;
    const auto& k = D.field();
    const auto& wts = D.weights();
    const int p = static_cast<int>(D.p());
    auto [lo, hi] = window ? *window : std::pair<int, int>{0, D.deg_f};
    DeRhamContext onD(D, DeRhamLevel::OnD), xfp(D, DeRhamLevel::XModFp);
    std::mt19937_64 rng(seed);
    const Exponents fcls = D.f.terms().begin()->first;
    for (int u = lo; u <= hi; ++u) {
        FormSpace all = onD.space(j - 1, u);
        for (const auto& cls : classes_of(all, D.grading)) {
            FormSpace Sd = onD.space(j - 1, u, &cls);
            if (!Sd.dim()) continue;
            const int ut = p * (u + D.deg_f);
            const Exponents tc = D.grading.key(exp_scale(exp_add(cls, fcls), p));
            ClassSpace gx = g_class_space(xfp, j, ut, &tc);
            ClassSpace gd = g_class_space(onD, j, ut, &tc);
            // K: kernel of res on G Omega^j_X|_D, as a subspace of the ambient space (contains B)
            std::vector<Vec> cols;
            for (const auto& l : gx.space.labels()) {
                Vec v = vectorize(reduce_form(Form::basis(k, wts, l.mono, l.summand), onD.ring()), onD.ring(), gd.space);
                gd.zero.reduce(v);
                cols.push_back(std::move(v));
            }
            Echelon K(k, gx.space.dim());
            for (auto& v : kernel_basis(k, cols, gd.space.dim())) K.insert(std::move(v));
            for (const auto& r : gx.zero.rows()) K.insert(r);
            rep.k_dims[u] += K.rank() - gx.zero.rank();
            for (int s = 0; s <= samples; ++s) {
                ++rep.checked;
                Form eta = s == 0 ? Form(k, wts, j - 1) : random_form(Sd, k, wts, j - 1, rng);
                Form theta = reduce_form(inverse_cartier(reduce_form(wedge(eta, df_form(D)), onD.ring())), xfp.ring());
                Vec tv = vectorize(theta, xfp.ring(), gx.space);
                if (!K.contains(tv)) ++rep.outside_k;
                Form via = sigma_form(inverse_cartier(eta), D);
                if (!same_class(theta, via, xfp, gx)) ++rep.mismatches;
                if (s == 0 && !gx.zero.contains(tv)) ++rep.mismatches;
            }
        }
    }
    rep.pass = rep.outside_k == 0 && rep.mismatches == 0;
    if (!rep.pass)
        throw FactorizationFailure("theta factorization failed: " + std::to_string(rep.outside_k) + " outside K, " +
                                   std::to_string(rep.mismatches) + " mismatches");
    return rep;
}

} // namespace finj
