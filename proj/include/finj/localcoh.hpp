#pragma once

// Graded local cohomology at the origin as a limit of Koszul cohomology on
// (x_1^N, ..., x_r^N), socles, and the inverse-polynomial oracles.

#include "finj/cartier.hpp"

#include <atomic>
#include <memory>
#include <mutex>
#include <functional>
#include <thread>

namespace finj {

enum class ModuleKind { OD, OmegaXD, OmegaD, BD, ZD, GD, GXD, K, FreeR };

struct ModuleSpec {
    ModuleKind kind = ModuleKind::OD;
    int j = 0;
    bool twisted = false;  // F_* of the module (always on for B, Z, G, GXD, K)

    bool is_twisted() const {
        return twisted || kind == ModuleKind::BD || kind == ModuleKind::ZD || kind == ModuleKind::GD ||
               kind == ModuleKind::GXD || kind == ModuleKind::K;
    }
};

inline std::string to_string(const ModuleSpec& m) {
    static const char* names[] = {"O_D", "Omega_X|D", "Omega_D", "B_D", "Z_D", "G_D", "G_X|D", "K", "R"};
    std::string s = names[static_cast<int>(m.kind)];
    if (m.kind != ModuleKind::OD && m.kind != ModuleKind::FreeR) s += "^" + std::to_string(m.j);
    if (m.twisted && !(m.kind == ModuleKind::BD || m.kind == ModuleKind::ZD || m.kind == ModuleKind::GD ||
                       m.kind == ModuleKind::GXD || m.kind == ModuleKind::K))
        s = "F_*" + s;
    return s;
}

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoStabilization : std::runtime_error {
    int cap;
    NoStabilization(const std::string& m, int c) : std::runtime_error(m), cap(c) {}
};

inline constexpr std::size_t kDefaultBudget = 20000;

/// One graded piece (underlying degree u, fine class cls) of a module
/// presented as U/V inside a space of forms.
struct ModulePiece {
    int u = 0;
    Exponents cls;
    FormSpace space;
    Subquotient sq;
};

/// A graded module given piece by piece, with the action of monomials.
class GradedModule {
public:
    GradedModule(const HypersurfaceData& D, ModuleSpec spec, std::size_t budget = kDefaultBudget)
        : spec_(spec), budget_(budget), D_(&D),
          ctx_(D, (spec.kind == ModuleKind::GXD || spec.kind == ModuleKind::K) ? DeRhamLevel::XModFp
                                                                               : DeRhamLevel::OnD) {
        if (spec.kind == ModuleKind::FreeR) throw InputError("FreeR needs the ring constructor");
        if (spec.kind == ModuleKind::K) onD_ = std::make_unique<DeRhamContext>(D, DeRhamLevel::OnD);
    }

    GradedModule(PrimeField k, WeightSystem w, std::size_t budget = kDefaultBudget)
        : spec_{ModuleKind::FreeR, 0, false}, budget_(budget), ctx_(k, std::move(w)) {}

    const ModuleSpec& spec() const { return spec_; }
    int scale() const { return spec_.is_twisted() ? static_cast<int>(field().p()) : 1; }
    const DeRhamContext& ctx() const { return ctx_; }
    const PrimeField& field() const { return ctx_.field(); }
    const WeightSystem& weights() const { return ctx_.weights(); }
    const FineGrading& grading() const { return ctx_.grading(); }
    int form_degree() const { return spec_.kind == ModuleKind::OD || spec_.kind == ModuleKind::FreeR ? 0 : spec_.j; }

    std::shared_ptr<const ModulePiece> piece(int u, const Exponents& cls) const {
        {
            std::lock_guard<std::mutex> g(mu_);
            auto it = cache_.find({u, cls});
            if (it != cache_.end()) return it->second;
        }
        auto pc = build(u, cls);
        std::lock_guard<std::mutex> g(mu_);
        return cache_.emplace(std::make_pair(u, cls), std::move(pc)).first->second;
    }

    /// Classes occurring among the ambient labels in degree u.
    std::vector<Exponents> classes_at(int u) const { return classes_of(ctx_.space(form_degree(), u), grading()); }

    /// x^t * v for an ambient vector v of `from`, in ambient coordinates of `to`.
    Vec multiply(const ModulePiece& from, const ModulePiece& to, const Vec& v, const Exponents& t) const {
        Vec out(to.space.dim(), 0);
        const auto& k = field();
        for (std::size_t c = 0; c < v.size(); ++c) {
            if (!v[c]) continue;
            const auto& l = from.space.labels()[c];
            for (const auto& [m, x] : ctx_.ring().normal_form(exp_add(l.mono, t))) {
                long idx = to.space.find(m, l.summand);
                if (idx < 0) throw InvariantError("module action leaves the target piece");
                out[idx] = k.add(out[idx], k.mul(v[c], x));
            }
        }
        return out;
    }

    void clear_cache() const {
        std::lock_guard<std::mutex> g(mu_);
        cache_.clear();
    }

private:
    std::shared_ptr<ModulePiece> build(int u, const Exponents& cls) const {
        const int j = form_degree();
        FormSpace S = ctx_.space(j, u, &cls);
        if (S.dim() > budget_)
            throw BudgetExceeded("piece of " + to_string(spec_) + " in degree " + std::to_string(u) + " has dimension " +
                                 std::to_string(S.dim()) + " > budget " + std::to_string(budget_));
        const auto& k = field();
        auto pc = std::make_shared<ModulePiece>(ModulePiece{u, cls, S, Subquotient(k, S.dim())});
        switch (spec_.kind) {
        case ModuleKind::OD:
        case ModuleKind::OmegaXD:
        case ModuleKind::FreeR:
            pc->sq = Subquotient::full(k, S.dim(), {});
            break;
        case ModuleKind::OmegaD:
            pc->sq = Subquotient::full(k, S.dim(), ctx_.relations(j, u, &cls, S));
            break;
        case ModuleKind::BD: {
            auto rel = ctx_.relations(j, u, &cls, S);
            pc->sq = Subquotient::build(k, S.dim(), ctx_.boundaries(j, u, &cls, S), rel);
            break;
        }
        case ModuleKind::ZD:
            pc->sq = Subquotient::build(k, S.dim(), ctx_.cycles(j, u, &cls, S), ctx_.relations(j, u, &cls, S));
            break;
        case ModuleKind::GD: {
            auto v = ctx_.relations(j, u, &cls, S);
            for (auto& b : ctx_.boundaries(j, u, &cls, S)) v.push_back(std::move(b));
            pc->sq = Subquotient::full(k, S.dim(), v);
            break;
        }
        case ModuleKind::GXD:
            pc->sq = Subquotient::full(k, S.dim(), ctx_.boundaries(j, u, &cls, S));
            break;
        case ModuleKind::K: {
            // kernel of res: G Omega^j_X|_D -> G Omega^j_D
            FormSpace T = onD_->space(j, u, &cls);
            auto zero = onD_->relations(j, u, &cls, T);
            for (auto& b : onD_->boundaries(j, u, &cls, T)) zero.push_back(std::move(b));
            Matrix res = label_map_matrix(S, T, onD_->ring(), [&](const BasisLabel& l) {
                return Form::basis(k, weights(), l.mono, l.summand);
            });
            std::vector<Vec> cols;
            for (std::size_t c = 0; c < S.dim(); ++c) cols.push_back(res.column(c));
            for (auto& z : zero) cols.push_back(std::move(z));
            std::vector<Vec> gens;
            for (const auto& kv : kernel_basis(k, cols, T.dim()))
                gens.emplace_back(kv.begin(), kv.begin() + static_cast<std::ptrdiff_t>(S.dim()));
            pc->sq = Subquotient::build(k, S.dim(), gens, ctx_.boundaries(j, u, &cls, S));
            break;
        }
        }
        return pc;
    }

    ModuleSpec spec_;
    std::size_t budget_;
    const HypersurfaceData* D_ = nullptr;
    DeRhamContext ctx_;
    std::unique_ptr<DeRhamContext> onD_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<int, Exponents>, std::shared_ptr<const ModulePiece>> cache_;
};

/// Koszul parameters: x_0..x_{n-2} when the leading monomial of f is a pure
/// power of x_{n-1} (then O_D is finite over them), otherwise all variables.
inline std::vector<int> koszul_parameters(const HypersurfaceData& D) {
    const auto& lm = D.f.leading_exponent();
    bool pure = lm[D.n - 1] > 0;
    for (int i = 0; i + 1 < D.n; ++i)
        if (lm[i]) pure = false;
    std::vector<int> out;
    for (int i = 0; i < (pure ? D.n - 1 : D.n); ++i) out.push_back(i);
    return out;
}

inline std::vector<int> all_parameters(int n) {
    std::vector<int> out(n);
    std::iota(out.begin(), out.end(), 0);
    return out;
}

/// Cohomology of K(x^N; M) at one index, one degree b/s and one chain class.
/// Component T (a set of parameter positions) holds M in underlying degree
/// b + s*N*w_T and fine class chi + s*N*1_T.
struct KoszulStage {
    int N = 0, b = 0, i = 0;
    Exponents chi;
    std::vector<WedgeMask> comps;
    std::vector<std::shared_ptr<const ModulePiece>> pieces;
    std::vector<std::size_t> offsets;
    std::size_t total = 0;
    Subquotient H{PrimeField(2), 0};

    std::size_t dim() const { return H.dim(); }
};

class KoszulEngine {
public:
    KoszulEngine(const GradedModule& M, std::vector<int> params) : M_(M), P_(std::move(params)) {}

    const GradedModule& module() const { return M_; }
    const std::vector<int>& params() const { return P_; }
    int scale() const { return M_.scale(); }

    Exponents ones(WedgeMask T) const {
        Exponents e(M_.weights().n(), 0);
        for (int t : wedge_indices(T)) e[P_[t]] += 1;
        return e;
    }
    int weight(WedgeMask T) const {
        int s = 0;
        for (int t : wedge_indices(T)) s += M_.weights()[P_[t]];
        return s;
    }

    int comp_degree(int N, int b, WedgeMask T) const { return b + scale() * N * weight(T); }
    Exponents comp_class(int N, const Exponents& chi, WedgeMask T) const {
        return M_.grading().key(exp_add(chi, exp_scale(ones(T), scale() * N)));
    }

    struct Layout {
        std::vector<WedgeMask> comps;
        std::vector<std::shared_ptr<const ModulePiece>> pieces;
        std::vector<std::size_t> offsets;
        std::size_t total = 0;
    };

    Layout layout(int k, int N, int b, const Exponents& chi) const {
        Layout L;
        const int r = static_cast<int>(P_.size());
        if (k < 0 || k > r) return L;
        for (WedgeMask T : wedge_sets(r, k)) {
            L.comps.push_back(T);
            L.pieces.push_back(M_.piece(comp_degree(N, b, T), comp_class(N, chi, T)));
            L.offsets.push_back(L.total);
            L.total += L.pieces.back()->sq.dim();
        }
        return L;
    }

    /// Koszul differential from level k to k+1 in quotient coordinates, one column at a time.
    void differential_columns(const Layout& src, const Layout& tgt, int N,
                              const std::function<void(std::size_t, Vec&&)>& emit) const {
        const auto& k = M_.field();
        for (std::size_t a = 0; a < src.comps.size(); ++a) {
            const WedgeMask T = src.comps[a];
            const auto& pa = *src.pieces[a];
            for (std::size_t c = 0; c < pa.sq.dim(); ++c) {
                Vec col(tgt.total, 0);
                Vec lift = pa.sq.basis_vector(c);
                for (std::size_t bb = 0; bb < tgt.comps.size(); ++bb) {
                    const WedgeMask T2 = tgt.comps[bb];
                    if ((T2 & T) != T || wedge_degree(T2 ^ T) != 1) continue;
                    const int t = std::countr_zero(T2 ^ T);
                    const int sign = (std::popcount(T & ((1u << t) - 1)) % 2) ? -1 : 1;
                    Exponents mono(M_.weights().n(), 0);
                    mono[P_[t]] = scale() * N;
                    const auto& pb = *tgt.pieces[bb];
                    auto co = pb.sq.coords(M_.multiply(pa, pb, lift, mono));
                    if (!co) throw InvariantError("Koszul differential leaves the module");
                    for (std::size_t q = 0; q < co->size(); ++q)
                        if ((*co)[q]) col[tgt.offsets[bb] + q] = sign > 0 ? (*co)[q] : k.neg((*co)[q]);
                }
                emit(src.offsets[a] + c, std::move(col));
            }
        }
    }

    Matrix differential(const Layout& src, const Layout& tgt, int N) const {
        Matrix m(tgt.total, src.total);
        differential_columns(src, tgt, N, [&](std::size_t c, Vec&& v) { m.set_column(c, v); });
        return m;
    }

    std::shared_ptr<const KoszulStage> stage(int i, int N, int b, const Exponents& chi) const {
        auto key = std::make_tuple(i, N, b, chi);
        {
            std::lock_guard<std::mutex> g(mu_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
        }
        const auto& k = M_.field();
        auto st = std::make_shared<KoszulStage>();
        st->N = N;
        st->b = b;
        st->i = i;
        st->chi = chi;
        Layout mid = layout(i, N, b, chi);
        st->comps = mid.comps;
        st->pieces = mid.pieces;
        st->offsets = mid.offsets;
        st->total = mid.total;
        std::vector<Vec> cycles;
        Echelon bounds(k, mid.total);
        bool top = true;
        if (mid.total) {
            Layout up = layout(i + 1, N, b, chi);
            if (up.total) {
                top = false;
                std::vector<Vec> cols(mid.total);
                differential_columns(mid, up, N, [&](std::size_t c, Vec&& v) { cols[c] = std::move(v); });
                cycles = kernel_basis(k, cols, up.total);
            }
            Layout down = layout(i - 1, N, b, chi);
            if (down.total) {
                differential_columns(down, mid, N, [&](std::size_t, Vec&& v) { bounds.insert(std::move(v)); });
            }
        }
        st->H = top ? Subquotient::full(std::move(bounds)) : Subquotient::build(std::move(bounds), cycles);
        std::lock_guard<std::mutex> g(mu_);
        return cache_.emplace(key, std::move(st)).first->second;
    }

    /// Image of a stage vector (total coordinates) under multiplication by x^t
    /// applied componentwise (underlying exponents), into stage `to`.
    Vec push(const KoszulStage& from, const KoszulStage& to, const Vec& v,
             const std::function<Exponents(WedgeMask)>& mono) const {
        Vec out(to.total, 0);
        for (std::size_t a = 0; a < from.comps.size(); ++a) {
            const auto& pa = *from.pieces[a];
            Vec part(v.begin() + static_cast<std::ptrdiff_t>(from.offsets[a]),
                     v.begin() + static_cast<std::ptrdiff_t>(from.offsets[a] + pa.sq.dim()));
            if (is_zero(part)) continue;
            const auto& pb = *to.pieces[a];
            auto co = pb.sq.coords(M_.multiply(pa, pb, pa.sq.lift(part), mono(from.comps[a])));
            if (!co) throw InvariantError("module action leaves the module");
            std::copy(co->begin(), co->end(), out.begin() + static_cast<std::ptrdiff_t>(to.offsets[a]));
        }
        return out;
    }

    /// Matrix (H coordinates) of the transition N -> N+1 (multiplication by prod_{t in T} x_t).
    Matrix transition(const KoszulStage& a, const KoszulStage& b) const {
        Matrix m(b.dim(), a.dim());
        for (std::size_t c = 0; c < a.dim(); ++c) {
            Vec img = push(a, b, a.H.basis_vector(c), [&](WedgeMask T) { return exp_scale(ones(T), scale()); });
            auto co = b.H.coords(img);
            if (!co) throw InvariantError("transition does not preserve cycles");
            m.set_column(c, *co);
        }
        return m;
    }

    /// Matrix (H coordinates) of multiplication by the variable x_v (twisted: x_v^p).
    Matrix action(const KoszulStage& a, const KoszulStage& b, int v) const {
        Matrix m(b.dim(), a.dim());
        Exponents t(M_.weights().n(), 0);
        t[v] = scale();
        for (std::size_t c = 0; c < a.dim(); ++c) {
            Vec img = push(a, b, a.H.basis_vector(c), [&](WedgeMask) { return t; });
            auto co = b.H.coords(img);
            if (!co) throw InvariantError("action does not preserve cycles");
            m.set_column(c, *co);
        }
        return m;
    }

    /// Chain classes with a nonzero component at index i.
    std::vector<Exponents> chain_classes(int i, int N, int b) const {
        std::set<Exponents> out;
        const int r = static_cast<int>(P_.size());
        for (WedgeMask T : wedge_sets(r, i)) {
            Exponents sh = exp_scale(ones(T), scale() * N);
            for (const auto& c : M_.classes_at(comp_degree(N, b, T))) out.insert(M_.grading().key(exp_sub(c, sh)));
        }
        return {out.begin(), out.end()};
    }

    void clear_cache() const {
        std::lock_guard<std::mutex> g(mu_);
        cache_.clear();
    }

private:
    const GradedModule& M_;
    std::vector<int> P_;
    mutable std::mutex mu_;
    mutable std::map<std::tuple<int, int, int, Exponents>, std::shared_ptr<const KoszulStage>> cache_;
};

inline bool is_bijective(const PrimeField& k, const Matrix& m) {
    if (m.rows != m.cols) return false;
    std::vector<Vec> cols;
    for (std::size_t c = 0; c < m.cols; ++c) cols.push_back(m.column(c));
    return rank_of(k, cols, m.rows) == m.rows;
}

/// Runs fn(0..count-1) on up to `jobs` threads; rethrows the exception of the
/// lowest failing index.
inline void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errs(count);
    auto worker = [&] {
        for (std::size_t i; (i = next++) < count;) {
            try {
                fn(i);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(jobs, static_cast<int>(count)); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

struct StabilizeOptions {
    int ncap = 0;               // 0: default cap
    bool finite_length = true;  // widen the window and require zeros outside
    int jobs = 1;
    int max_extensions = 8;
};

inline int default_ncap(const HypersurfaceData& D) {
    return 8 + 2 * (std::abs(D.a_invariant) + D.weights().max_weight());
}

struct LocalCohPiece {
    int b = 0;
    Exponents chi;
    std::shared_ptr<const KoszulStage> stage;
    std::size_t dim() const { return stage ? stage->dim() : 0; }
};

/// H^i_m(M) on a window of degrees b/s, with the stabilization witness.
struct StabilizedLocalCoh {
    ModuleSpec spec;
    int i = 0, s = 1;
    int N = 0;
    int lo = 0, hi = 0;  // window in units of 1/s
    bool widened = false;
    std::vector<LocalCohPiece> pieces;  // nonzero pieces, sorted by (b, chi)

    std::map<int, std::size_t> dims() const {
        std::map<int, std::size_t> out;
        for (const auto& p : pieces) out[p.b] += p.dim();
        return out;
    }
    std::size_t total_dim() const {
        std::size_t t = 0;
        for (const auto& p : pieces) t += p.dim();
        return t;
    }
    const LocalCohPiece* find(int b, const Exponents& chi) const {
        for (const auto& p : pieces)
            if (p.b == b && p.chi == chi) return &p;
        return nullptr;
    }
};

/// Stabilize over the given (b, chi) cells, or over all cells of the window
/// when `cells` is empty.
inline StabilizedLocalCoh stabilize(const KoszulEngine& E, int i, int lo, int hi, const StabilizeOptions& opt,
                                    int ncap, std::vector<std::pair<int, Exponents>> cells = {}) {
    const auto& k = E.module().field();
    const int s = E.scale();
    const int maxw = E.module().weights().max_weight();
    StabilizedLocalCoh out{E.module().spec(), i, s, 0, lo, hi, false, {}};
    const bool enumerate = cells.empty();
    auto cells_for = [&](int b, int N) {
        std::set<Exponents> cs;
        for (int d = 0; d <= 1; ++d)
            for (auto& c : E.chain_classes(i, N + d, b)) cs.insert(c);
        std::vector<std::pair<int, Exponents>> v;
        for (auto& c : cs) v.emplace_back(b, c);
        return v;
    };
    int N = 1;
    int extensions = 0;
    while (true) {
        if (N + 1 > ncap) throw NoStabilization("no stabilization for H^" + std::to_string(i) + " of " +
                                                    to_string(E.module().spec()) + " below N = " + std::to_string(ncap),
                                                ncap);
        std::vector<std::pair<int, Exponents>> work = cells;
        if (enumerate) {
            work.clear();
            for (int b = out.lo; b <= out.hi; ++b)
                for (auto& c : cells_for(b, N)) work.push_back(c);
        }
        std::vector<char> ok(work.size(), 0);
        parallel_for(work.size(), opt.jobs, [&](std::size_t w) {
            auto [b, chi] = work[w];
            auto s0 = E.stage(i, N, b, chi);
            auto s1 = E.stage(i, N + 1, b, chi);
            if (s0->dim() != s1->dim()) return;
            ok[w] = is_bijective(k, E.transition(*s0, *s1));
        });
        if (std::find(ok.begin(), ok.end(), 0) != ok.end()) {
            ++N;
            continue;
        }
        out.N = N;
        out.pieces.clear();
        for (auto& [b, chi] : work) {
            auto st = E.stage(i, N, b, chi);
            if (st->dim()) out.pieces.push_back({b, chi, st});
        }
        std::sort(out.pieces.begin(), out.pieces.end(),
                  [](const LocalCohPiece& x, const LocalCohPiece& y) { return std::tie(x.b, x.chi) < std::tie(y.b, y.chi); });
        if (!opt.finite_length || !enumerate) return out;
        // widening: one max weight on each side must carry nothing
        std::vector<int> extra;
        for (int b = out.lo - s * maxw; b < out.lo; ++b) extra.push_back(b);
        for (int b = out.hi + 1; b <= out.hi + s * maxw; ++b) extra.push_back(b);
        std::vector<std::pair<int, Exponents>> ew;
        for (int b : extra)
            for (auto& c : cells_for(b, N)) ew.push_back(c);
        std::vector<char> zero(ew.size(), 1);
        parallel_for(ew.size(), opt.jobs, [&](std::size_t w) {
            auto [b, chi] = ew[w];
            zero[w] = E.stage(i, N, b, chi)->dim() == 0 && E.stage(i, N + 1, b, chi)->dim() == 0;
        });
        int newlo = out.lo, newhi = out.hi;
        for (std::size_t w = 0; w < ew.size(); ++w)
            if (!zero[w]) {
                newlo = std::min(newlo, ew[w].first);
                newhi = std::max(newhi, ew[w].first);
            }
        if (newlo == out.lo && newhi == out.hi) {
            out.widened = true;
            return out;
        }
        if (++extensions > opt.max_extensions)
            throw NoStabilization("window keeps growing for H^" + std::to_string(i) + " of " +
                                      to_string(E.module().spec()),
                                  ncap);
        out.lo = newlo;
        out.hi = newhi;
    }
}

/// Joint kernel of the x_v actions, per piece.
struct SocleReport {
    std::map<int, std::size_t> dims;  // per b
    std::size_t total = 0;
    std::vector<std::pair<const LocalCohPiece*, std::vector<Vec>>> bases;  // H coordinates
};

inline SocleReport socle(const KoszulEngine& E, const StabilizedLocalCoh& H) {
    const auto& k = E.module().field();
    const auto& w = E.module().weights();
    const int s = E.scale();
    SocleReport rep;
    for (const auto& pc : H.pieces) {
        std::vector<Vec> rows_all(pc.dim());
        std::vector<Vec> images(pc.dim());
        std::size_t tot = 0;
        std::vector<Matrix> acts;
        for (int v = 0; v < w.n(); ++v) {
            Exponents ev(w.n(), 0);
            ev[v] = s;
            auto tgt = E.stage(H.i, H.N, pc.b + s * w[v], E.module().grading().key(exp_add(pc.chi, ev)));
            if (!tgt->dim()) continue;
            acts.push_back(E.action(*pc.stage, *tgt, v));
            tot += tgt->dim();
        }
        for (std::size_t c = 0; c < pc.dim(); ++c) {
            Vec col;
            col.reserve(tot);
            for (const auto& m : acts) {
                auto cc = m.column(c);
                col.insert(col.end(), cc.begin(), cc.end());
            }
            images[c] = std::move(col);
        }
        auto ker = kernel_basis(k, images, tot);
        if (!ker.empty()) {
            rep.dims[pc.b] += ker.size();
            rep.total += ker.size();
            rep.bases.emplace_back(&pc, ker);
        }
    }
    return rep;
}

/// The inverse-polynomial model: H^n_m(R)_t spanned by x^{-a} with all a_i >= 1,
/// and H^d_m(O_D)_e = ker(f: H^n_m(R)_{e - deg f} -> H^n_m(R)_e).
class InversePolyModel {
public:
    explicit InversePolyModel(const HypersurfaceData& D) : D_(D) {}

    /// Inverse monomials (positive exponent vectors a) of degree t.
    const std::vector<Exponents>& monomials(int t) const { return table(t).mons; }

    /// g * xi for xi a vector over monomials(t); result over monomials(t + deg g).
    Vec multiply(const Poly& g, int t, const Vec& xi) const {
        const auto& src = monomials(t);
        int dg = *g.degree();
        const auto& tt = table(t + dg);
        const auto& tgt = tt.mons;
        const auto& idx = tt.idx;
        const auto& k = D_.field();
        Vec out(tgt.size(), 0);
        for (std::size_t q = 0; q < src.size(); ++q) {
            if (!xi[q]) continue;
            for (const auto& [e, c] : g.terms()) {
                Exponents a = exp_sub(src[q], e);
                if (std::any_of(a.begin(), a.end(), [](int x) { return x < 1; })) continue;
                auto& o = out[idx.at(a)];
                o = k.add(o, k.mul(c, xi[q]));
            }
        }
        return out;
    }

    /// Basis of H^d_m(O_D)_e as vectors over monomials(e - deg f).
    std::vector<Vec> hd_basis(int e) const {
        const int t = e - D_.deg_f;
        const auto& src = monomials(t);
        std::vector<Vec> imgs;
        for (std::size_t q = 0; q < src.size(); ++q) {
            Vec u(src.size(), 0);
            u[q] = 1;
            imgs.push_back(multiply(D_.f, t, u));
        }
        return kernel_basis(D_.field(), imgs, monomials(e).size());
    }

    /// xi -> f^{p-1} xi^p, from H^d_m(O_D)_e to H^d_m(O_D)_{pe}.
    Vec frobenius(int e, const Vec& xi) const {
        const int p = static_cast<int>(D_.p());
        const int t = e - D_.deg_f;
        const auto& src = monomials(t);
        const int tp = p * t;
        const auto& mt = table(tp);
        const auto& mid = mt.mons;
        const auto& idx = mt.idx;
        Vec up(mid.size(), 0);
        for (std::size_t q = 0; q < src.size(); ++q)
            if (xi[q]) up[idx.at(exp_scale(src[q], p))] = xi[q];
        return multiply(D_.f.pow(p - 1), tp, up);
    }

    const HypersurfaceData& data() const { return D_; }

private:
    struct Table {
        std::vector<Exponents> mons;
        std::map<Exponents, std::size_t> idx;
    };

    const Table& table(int t) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(t);
        if (it != cache_.end()) return *it->second;
        auto tb = std::make_unique<Table>();
        const auto& w = D_.weights();
        const int deg = -t - w.total();
        if (deg >= 0)
            for (auto m : monomials_of_degree(w, deg)) {
                for (auto& x : m) x += 1;
                tb->mons.push_back(std::move(m));
            }
        for (std::size_t q = 0; q < tb->mons.size(); ++q) tb->idx[tb->mons[q]] = q;
        return *cache_.emplace(t, std::move(tb)).first->second;
    }

    const HypersurfaceData& D_;
    mutable std::mutex mu_;
    mutable std::map<int, std::unique_ptr<Table>> cache_;
};

/// Per-degree dimensions of H^d_m(O_D) on the model.
inline std::map<int, std::size_t> inverse_poly_oracle(const HypersurfaceData& D, int lo, int hi) {
    InversePolyModel M(D);
    std::map<int, std::size_t> out;
    for (int e = lo; e <= hi; ++e) {
        auto b = M.hd_basis(e);
        if (!b.empty()) out[e] = b.size();
    }
    return out;
}

struct RangeError : InputError {
    using InputError::InputError;
};

/// Dimensions of H^{d-j}_m(Omega^j_D) per degree: ker(theta) on H^d_m(O_D),
/// theta(alpha) = (d_1 f alpha, ..., d_n f alpha), moved up by j deg f.
inline std::map<int, std::size_t> jacobian_kernel_oracle(const HypersurfaceData& D, int j, int lo, int hi) {
    if (j < 0 || j > D.d - 2) throw RangeError("jacobian_kernel_oracle: need 0 <= j <= d - 2");
    if (j == 0) return inverse_poly_oracle(D, lo, hi);
    InversePolyModel M(D);
    std::map<int, std::size_t> out;
    for (int e = lo; e <= hi; ++e) {
        const int t = e - j * D.deg_f;
        auto basis = M.hd_basis(t);
        if (basis.empty()) continue;
        std::vector<Vec> imgs;
        std::size_t tot = 0;
        for (const auto& a : basis) {
            Vec col;
            for (const auto& g : D.partials) {
                if (g.is_zero()) continue;
                auto v = M.multiply(g, t - D.deg_f, a);
                col.insert(col.end(), v.begin(), v.end());
            }
            tot = col.size();
            imgs.push_back(std::move(col));
        }
        // kernel in terms of the basis coefficients
        auto ker = kernel_basis(D.field(), imgs, tot);
        if (!ker.empty()) out[e] = ker.size();
    }
    return out;
}

inline int window_radius(const HypersurfaceData& D) { return D.n * D.weights().max_weight() + D.deg_f; }

/// Default window (integral degrees) for the local cohomology of the modules on D.
inline std::pair<int, int> default_window(const HypersurfaceData& D) {
    return {D.a_invariant - window_radius(D), D.a_invariant + window_radius(D)};
}

struct VanishingEntry {
    std::string module;
    int i = 0, j = 0;
    std::size_t total_dim = 0;
    int N = 0;
    bool ok = true;
    std::string error;
};

struct VanishingReport {
    std::vector<VanishingEntry> entries;
    std::vector<std::pair<int, std::size_t>> socle_dims;  // (j, dim)
    bool pass = true;
};

struct SuiteOptions {
    int jobs = 1;
    int ncap = 0;
    std::size_t budget = kDefaultBudget;
    bool include_bz = true;
};

/// Local cohomology H^i_m(M) over the given integral-degree window, via Noether parameters.
inline StabilizedLocalCoh local_cohomology(const HypersurfaceData& D, const GradedModule& M, int i, int lo, int hi,
                                           const StabilizeOptions& opt) {
    KoszulEngine E(M, koszul_parameters(D));
    const int s = M.scale();
    return stabilize(E, i, s * lo, s * hi, opt, opt.ncap ? opt.ncap : default_ncap(D));
}

/// Vanishing of H^i_m for i + j < d on Omega^j_D (and B, Z), socle dimension at i + j = d.
inline VanishingReport vanishing_suite(const HypersurfaceData& D, int m_max, const SuiteOptions& so = {}) {
    if (m_max > D.d - 2 || m_max < 0) throw RangeError("vanishing_suite: need 0 <= m_max <= d - 2");
    VanishingReport rep;
    StabilizeOptions opt;
    opt.jobs = so.jobs;
    opt.ncap = so.ncap;
    auto [lo, hi] = default_window(D);
    auto run = [&](ModuleSpec spec, int i, int j, int wlo, int whi) {
        VanishingEntry e{to_string(spec), i, j, 0, 0, true, ""};
        try {
            GradedModule M(D, spec, so.budget);
            auto H = local_cohomology(D, M, i, wlo, whi, opt);
            e.total_dim = H.total_dim();
            e.N = H.N;
            e.ok = e.total_dim == 0;
        } catch (const std::exception& ex) {
            e.ok = false;
            e.error = ex.what();
        }
        if (!e.ok) rep.pass = false;
        rep.entries.push_back(e);
    };
    for (int j = 0; j <= m_max; ++j) {
        ModuleSpec om{j == 0 ? ModuleKind::OD : ModuleKind::OmegaD, j, false};
        for (int i = 0; i + j < D.d; ++i) run(om, i, j, lo, hi);
        if (so.include_bz) {
            // twisted modules: sampled window around the expected support
            int tlo = D.a_invariant - D.weights().max_weight();
            int thi = D.a_invariant + j * D.deg_f + D.weights().max_weight();
            for (int i = 0; i + j < D.d; ++i) {
                if (j > 0) run({ModuleKind::BD, j, true}, i, j, tlo, thi);
                run({ModuleKind::ZD, j, true}, i, j, tlo, thi);
            }
        }
        // socle of the top one
        try {
            GradedModule M(D, om, so.budget);
            KoszulEngine E(M, koszul_parameters(D));
            StabilizeOptions o2 = opt;
            o2.finite_length = j > 0;
            int wlo = lo, whi = hi;
            if (j == 0) {
                wlo = D.a_invariant - D.weights().max_weight();
                whi = D.a_invariant;
            }
            auto H = stabilize(E, D.d - j, wlo, whi, o2, so.ncap ? so.ncap : default_ncap(D));
            auto S = socle(E, H);
            rep.socle_dims.emplace_back(j, S.total);
            if (S.total != 1) rep.pass = false;
        } catch (const std::exception& ex) {
            rep.socle_dims.emplace_back(j, 0);
            rep.pass = false;
        }
    }
    return rep;
}

} // namespace finj
