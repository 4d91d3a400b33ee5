#pragma once

// Verification suites shared by `finj verify` and the acceptance runner.

#include "finj/finj.hpp"
#include "finj/fixtures.hpp"

#include "json.hpp"

#include <functional>
#include <string>
#include <vector>

namespace finj::suites {

using json = nlohmann::ordered_json;

struct SuiteResult {
    std::string name;
    bool pass = true;
    json details = json::array();
};

struct SuiteOptionsCli {
    int jobs = 1;
    std::uint64_t seed = 20240917;
    int ncap = 0;
};

inline HypersurfaceData squares(Scalar p, int n) {
    return validate_hypersurface(parse_poly(sum_of_squares_text(n), PrimeField(p), WeightSystem::standard(n)));
}

inline std::string verdict_text(Verdict v) { return to_string(v); }

/// C^{-1}: Omega^j -> Z/B bijective per degree.
inline SuiteResult cartier_iso(const std::vector<int>& ns, const std::vector<Scalar>& ps, int maxdeg) {
    SuiteResult r{"cartier-iso"};
    for (int n : ns)
        for (Scalar p : ps) {
            auto rep = cartier_iso_check(n, p, 0, maxdeg);
            std::size_t bad = 0;
            for (const auto& e : rep.entries)
                if (!e.bijective) ++bad;
            r.pass = r.pass && rep.pass;
            r.details.push_back({{"n", n}, {"p", p}, {"entries", rep.entries.size()}, {"failures", bad}, {"pass", rep.pass}});
        }
    return r;
}

/// 0 -> O_D -> Omega^1_X|_D -> ... -> Omega^m_X|_D exact.
inline SuiteResult koszul(int lo = -2, int hi = 6) {
    SuiteResult r{"koszul"};
    for (auto [n, m] : {std::pair{3, 2}, std::pair{5, 4}}) {
        auto D = squares(3, n);
        auto rep = koszul_exactness_check(D, m, lo, hi);
        r.pass = r.pass && rep.exact;
        r.details.push_back({{"n", n}, {"m", m}, {"nodes", rep.entries.size()}, {"exact", rep.exact}});
    }
    return r;
}

/// Vanishing below the diagonal, one-dimensional socles, B and Z vanishing.
inline SuiteResult vanishing(const SuiteOptionsCli& o, bool include_bz, const std::string& name) {
    SuiteResult r{name};
    for (const char* fx : {"quadric-3", "quadric-5"}) {
        auto D = fixture(fx).data();
        SuiteOptions so;
        so.jobs = o.jobs;
        so.ncap = o.ncap;
        so.include_bz = include_bz;
        auto rep = vanishing_suite(D, D.d - 2, so);
        json entries = json::array();
        for (const auto& e : rep.entries) {
            entries.push_back({{"module", e.module}, {"i", e.i}, {"dim", e.total_dim}, {"N", e.N}, {"ok", e.ok},
                               {"error", e.error}});
        }
        json socles = json::array();
        for (auto [j, d] : rep.socle_dims) socles.push_back({{"j", j}, {"dim", d}});
        r.pass = r.pass && rep.pass;
        r.details.push_back({{"fixture", fx}, {"entries", entries}, {"socles", socles}, {"pass", rep.pass}});
    }
    return r;
}

/// Koszul-limit dimensions equal the Jacobian-kernel and inverse-polynomial oracles.
inline SuiteResult oracle(const SuiteOptionsCli& o) {
    SuiteResult r{"oracle"};
    for (const auto& fx : default_fixtures()) {
        auto D = fx.data();
        for (int j = 0; j <= D.d - 2; ++j) {
            auto [lo, hi] = level_window(D, j, {});
            GradedModule M(D, source_spec(j));
            StabilizeOptions so;
            so.finite_length = j > 0;
            so.jobs = o.jobs;
            so.ncap = o.ncap;
            auto H = local_cohomology(D, M, D.d - j, lo, hi, so);
            bool eq = H.dims() == jacobian_kernel_oracle(D, j, lo, hi);
            if (j == 0) eq = eq && H.dims() == inverse_poly_oracle(D, lo, hi);
            r.pass = r.pass && eq;
            r.details.push_back({{"fixture", fx.name}, {"j", j}, {"total_dim", H.total_dim()}, {"N", H.N}, {"equal", eq}});
        }
    }
    return r;
}

/// res o sigma = 0, both squares commute, sigma(B) in B; random forms.
inline SuiteResult diagram(const SuiteOptionsCli& o, int samples = 100) {
    SuiteResult r{"diagram"};
    for (int n : {3, 5})
        for (Scalar p : {3u, 5u}) {
            auto D = squares(p, n);
            for (int j = 1; j <= D.d - 1; ++j) {
                auto rep = diagram_check(D, j, 0, D.deg_f, samples, o.seed + static_cast<std::uint64_t>(100 * n + 10 * p + j));
                r.pass = r.pass && rep.pass;
                r.details.push_back({{"n", n}, {"p", p}, {"j", j}, {"checked", rep.checked},
                                     {"left", rep.left_failures}, {"right", rep.right_failures},
                                     {"complex", rep.complex_failures}, {"boundaries", rep.b_failures}, {"pass", rep.pass}});
            }
        }
    return r;
}

/// omega ^ dg vanishes on V(g) for logarithmic omega.
inline SuiteResult log_forms(const SuiteOptionsCli& o, const std::vector<std::string>& gs, const std::vector<Scalar>& ps,
                             int trials = 50) {
    SuiteResult r{"log-forms"};
    for (const auto& gtext : gs)
        for (Scalar p : ps) {
            int n = 1;
            for (std::size_t q = 0; q + 1 < gtext.size(); ++q)
                if (gtext[q] == 'x' && std::isdigit(static_cast<unsigned char>(gtext[q + 1])))
                    n = std::max(n, std::atoi(gtext.c_str() + q + 1) + 1);
            auto g = parse_poly(gtext, PrimeField(p), WeightSystem::standard(n));
            for (int k = 1; k <= 3 && k <= n; ++k) {
                auto rep = log_form_check(g, k, trials, o.seed + static_cast<std::uint64_t>(k));
                std::string witness;
                for (const auto& t : rep.trials)
                    if (!t.zero) {
                        witness = t.witness;
                        break;
                    }
                r.pass = r.pass && rep.pass;
                r.details.push_back({{"g", gtext}, {"p", p}, {"k", k}, {"trials", rep.trials.size()}, {"pass", rep.pass},
                                     {"witness", witness}});
            }
        }
    return r;
}

/// Level m injective implies the lower levels injective.
inline SuiteResult descent(const SuiteOptionsCli& o) {
    SuiteResult r{"descent"};
    struct Case {
        std::string poly;
        int n;
        Scalar p;
    };
    std::vector<Case> cases = {{sum_of_squares_text(5), 5, 3}, {sum_of_squares_text(5), 5, 5}, {sum_of_squares_text(5), 5, 7},
                               {fermat_text(5, 3), 5, 5}, {fermat_text(5, 3), 5, 7}};
    for (const auto& c : cases) {
        auto D = validate_hypersurface(parse_poly(c.poly, PrimeField(c.p), WeightSystem::standard(c.n)));
        CheckOptions co;
        co.jobs = o.jobs;
        co.ncap = o.ncap;
        json row = {{"poly", c.poly}, {"p", c.p}, {"m", 1}};
        try {
            auto rep = descent_check(D, 1, co);
            json lv = json::array();
            for (auto v : rep.levels) lv.push_back(verdict_text(v));
            row["levels"] = lv;
            row["vacuous"] = rep.vacuous;
            row["determined"] = rep.determined;
            row["pass"] = rep.determined;
            r.pass = r.pass && rep.determined;
        } catch (const DescentViolation& e) {
            row["violation"] = {{"j", e.j}, {"degree", e.degree}};
            row["pass"] = false;
            r.pass = false;
        }
        r.details.push_back(row);
    }
    return r;
}

/// Connecting maps on socles, and theta through K.
inline SuiteResult socle_chain(const SuiteOptionsCli& o) {
    SuiteResult r{"socle-chain"};
    CheckOptions co;
    co.jobs = o.jobs;
    co.ncap = o.ncap;
    for (int n : {4, 5}) {
        auto D = squares(3, n);
        for (int j = 1; j <= D.d - 2; ++j) {
            json row = {{"n", n}, {"j", j}};
            try {
                auto rep = socle_chain_check(D, j, co);
                row["source_degree"] = rep.source_degree;
                row["target_degree"] = rep.target_degree;
                row["pass"] = rep.isomorphism;
            } catch (const SocleChainFailure& e) {
                row["pass"] = false;
                row["error"] = e.what();
                r.pass = false;
            }
            r.details.push_back(row);
        }
    }
    return r;
}

inline SuiteResult k_theta(const SuiteOptionsCli& o, int samples = 100) {
    SuiteResult r{"k-theta"};
    for (int n : {4, 5}) {
        auto D = squares(3, n);
        for (int j = 1; j <= D.d - 2; ++j) {
            json row = {{"n", n}, {"j", j}};
            try {
                auto rep = K_theta_factorization_check(D, j, n == 4 ? samples : samples / 10, o.seed + static_cast<std::uint64_t>(j));
                row["checked"] = rep.checked;
                row["pass"] = rep.pass;
            } catch (const FactorizationFailure& e) {
                row["pass"] = false;
                row["error"] = e.what();
                r.pass = false;
            }
            r.details.push_back(row);
        }
    }
    return r;
}

/// check_level(D, 0) against the Frobenius action on the inverse-polynomial model.
inline SuiteResult level0(const SuiteOptionsCli& o) {
    SuiteResult r{"level0"};
    for (const auto& fx : default_fixtures()) {
        auto D = fx.data();
        CheckOptions co;
        co.jobs = o.jobs;
        co.ncap = o.ncap;
        auto L = check_level(D, 0, co);
        auto fo = frobenius_oracle(D, D.a_invariant - D.weights().max_weight(), D.a_invariant);
        bool agree = L.verdict != Verdict::Undetermined && L.injective() == fo.injective &&
                     fo.injective == fo.socle_injective;
        r.pass = r.pass && agree;
        r.details.push_back({{"fixture", fx.name}, {"engine", verdict_text(L.verdict)}, {"oracle", fo.injective},
                             {"agree", agree}});
    }
    return r;
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"cartier-iso", "koszul",      "vanishing", "bz",      "oracle", "diagram",
                                                   "log-forms",   "descent",     "socle-chain", "k-theta", "level0"};
    return names;
}

inline const std::vector<std::string>& default_log_polys() {
    static const std::vector<std::string> gs = {"x1^2*x2^3", "x1*x2*x3", "(1+x3)*x1^2*x2"};
    return gs;
}

inline SuiteResult run_named(const std::string& name, const SuiteOptionsCli& o) {
    if (name == "cartier-iso") return cartier_iso({1, 2, 3}, {2, 3, 5}, 6);
    if (name == "koszul") return koszul();
    if (name == "vanishing") return vanishing(o, false, "vanishing");
    if (name == "bz") return vanishing(o, true, "bz");
    if (name == "oracle") return oracle(o);
    if (name == "diagram") return diagram(o);
    if (name == "log-forms") return log_forms(o, default_log_polys(), {3, 5});
    if (name == "descent") return descent(o);
    if (name == "socle-chain") return socle_chain(o);
    if (name == "k-theta") return k_theta(o);
    if (name == "level0") return level0(o);
    throw InputError("unknown suite: " + name);
}

inline json to_json(const SuiteResult& r) { return {{"suite", r.name}, {"pass", r.pass}, {"details", r.details}}; }

} // namespace finj::suites
