#include "CLI11.hpp"
#include "suites.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

using namespace finj;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";

enum Exit { kOk = 0, kInvalid = 2, kUndetermined = 3, kInvariant = 4 };

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) throw InputError("empty entry in list '" + s + "'");
        std::size_t used = 0;
        int v = std::stoi(item, &used);
        if (used != item.size()) throw InputError("not an integer: '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw InputError("empty list");
    return out;
}

std::pair<int, int> parse_window(const std::string& s) {
    auto c = s.find(':');
    if (c == std::string::npos) throw InputError("window must be lo:hi");
    int lo = std::stoi(s.substr(0, c)), hi = std::stoi(s.substr(c + 1));
    if (lo > hi) throw InputError("window is empty");
    return {lo, hi};
}

int max_var_index(const std::string& poly) {
    int n = -1;
    for (std::size_t q = 0; q + 1 < poly.size(); ++q)
        if (poly[q] == 'x' && std::isdigit(static_cast<unsigned char>(poly[q + 1])))
            n = std::max(n, std::atoi(poly.c_str() + q + 1));
    return n;
}

std::vector<int> resolve_weights(const std::string& text, const std::string& poly) {
    if (!text.empty()) return parse_int_list(text);
    int n = max_var_index(poly) + 1;
    if (n <= 0) throw InputError("polynomial has no variables");
    return std::vector<int>(static_cast<std::size_t>(n), 1);
}

Scalar checked_prime(long p) {
    if (p < 2 || p > (1L << 31)) throw InputError("p out of range");
    for (long q = 2; q * q <= p; ++q)
        if (p % q == 0) throw InputError("p not prime");
    return static_cast<Scalar>(p);
}

std::string error_type(const std::exception& e) {
    if (dynamic_cast<const NotHomogeneous*>(&e)) return "NotHomogeneous";
    if (dynamic_cast<const NotIsolatedSingularity*>(&e)) return "NotIsolatedSingularity";
    if (dynamic_cast<const DimensionTooSmall*>(&e)) return "DimensionTooSmall";
    if (dynamic_cast<const RangeError*>(&e)) return "RangeError";
    if (dynamic_cast<const InputError*>(&e)) return "InputError";
    if (dynamic_cast<const NoStabilization*>(&e)) return "NoStabilization";
    if (dynamic_cast<const BudgetExceeded*>(&e)) return "BudgetExceeded";
    if (dynamic_cast<const InvariantError*>(&e)) return "InvariantError";
    return "InternalError";
}

int exit_for(const std::exception& e) {
    if (dynamic_cast<const InputError*>(&e) || dynamic_cast<const std::invalid_argument*>(&e) ||
        dynamic_cast<const std::out_of_range*>(&e))
        return kInvalid;
    if (dynamic_cast<const NoStabilization*>(&e) || dynamic_cast<const BudgetExceeded*>(&e)) return kUndetermined;
    return kInvariant;
}

json level_json(const LevelResult& L) {
    json degs = json::array();
    for (const auto& d : L.degrees) {
        json row = {{"degree", d.degree.is_integral() ? json(d.degree.num()) : json(d.degree.str())}, {"source_dim", d.source_dim}};
        row["rank"] = d.rank ? json(*d.rank) : json(nullptr);
        row["injective"] = d.injective ? json(*d.injective) : json(nullptr);
        degs.push_back(row);
    }
    json out = {{"j", L.j}, {"degrees", degs}};
    out["injective"] = L.verdict == Verdict::Undetermined ? json(nullptr) : json(L.injective());
    out["socle_injective"] = L.socle_injective;
    return out;
}

void emit(const json& j, const std::string& path) {
    std::string text = j.dump(2) + "\n";
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write " + path);
    f << text;
}

std::uint64_t seed_from(const std::string& flag) {
    if (!flag.empty()) return std::stoull(flag);
    if (const char* e = std::getenv("FINJ_SEED")) return std::stoull(e);
    return finj::suites::SuiteOptionsCli{}.seed;
}

struct CheckArgs {
    long p = 0;
    std::string weights, poly, window, json_path;
    int m = 0, ncap = 0, jobs = 1;
    std::string seed;
};

int run_check(const CheckArgs& a) {
    json out;
    out["input"] = {{"p", a.p}, {"weights", nullptr}, {"poly", a.poly}, {"m", a.m}};
    out["validation"] = nullptr;
    out["levels"] = json::array();
    out["verdict"] = nullptr;
    out["witnesses"] = {{"stabilization_N", nullptr}};
    out["error"] = nullptr;
    out["version"] = kVersion;
    int code = kOk;
    try {
        seed_from(a.seed);
        auto w = resolve_weights(a.weights, a.poly);
        out["input"]["weights"] = w;
        if (a.m < 0) throw InputError("m must be >= 0");
        Scalar p = checked_prime(a.p);
        auto f = parse_poly(a.poly, PrimeField(p), WeightSystem(w));
        bool degenerate = true;
        for (int i = 0; i < static_cast<int>(w.size()); ++i)
            if (!f.partial(i).is_zero()) degenerate = false;
        if (degenerate) std::cerr << "warning: every partial derivative of f vanishes identically mod " << p << "\n";
        auto D = validate_hypersurface(f);
        CheckOptions co;
        co.jobs = a.jobs;
        co.ncap = a.ncap;
        if (!a.window.empty()) co.window = parse_window(a.window);
        auto rep = check_m_F_injective(D, a.m, co);
        out["validation"] = {{"d", D.d}, {"a_invariant", D.a_invariant}, {"tjurina", D.tjurina}, {"codim_ok", rep.codim_ok}};
        for (const auto& L : rep.levels) out["levels"].push_back(level_json(L));
        out["verdict"] = to_string(rep.verdict);
        out["witnesses"]["stabilization_N"] = rep.stabilization_N;
        if (rep.verdict == Verdict::Undetermined) code = kUndetermined;
    } catch (const std::exception& e) {
        out["error"] = {{"type", error_type(e)}, {"message", e.what()}};
        code = exit_for(e);
    }
    emit(out, a.json_path);
    return code;
}

struct SurveyArgs {
    std::string family, file, primes, csv_path;
    int n = 3, a = 3, m = 0, jobs = 1, ncap = 0;
    bool timing = false;
};

struct SurveyInput {
    std::string poly;
    std::vector<int> weights;
    std::string params;
};

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_plain(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
    return s;
}

std::vector<SurveyInput> survey_inputs(const SurveyArgs& a) {
    std::vector<SurveyInput> in;
    if (a.family == "fermat") {
        if (a.n < 1 || a.a < 1) throw InputError("fermat family needs n >= 1 and a >= 1");
        in.push_back({fermat_text(a.n, a.a), std::vector<int>(static_cast<std::size_t>(a.n), 1),
                      "n=" + std::to_string(a.n) + " a=" + std::to_string(a.a)});
    } else if (a.family == "squares") {
        if (a.n < 1) throw InputError("squares family needs n >= 1");
        in.push_back({sum_of_squares_text(a.n), std::vector<int>(static_cast<std::size_t>(a.n), 1),
                      "n=" + std::to_string(a.n)});
    } else if (a.family == "file") {
        std::ifstream f(a.file);
        if (!f) throw InputError("cannot read " + a.file);
        std::string line;
        while (std::getline(f, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            SurveyInput s;
            auto bar = line.find('|');
            if (bar != std::string::npos) {
                s.poly = line.substr(bar + 1);
                s.weights = parse_int_list(line.substr(0, bar));
            } else {
                s.poly = line;
            }
            s.params = "file";
            in.push_back(s);
        }
        if (in.empty()) throw InputError("no polynomials in " + a.file);
    } else {
        throw InputError("unknown family '" + a.family + "'");
    }
    return in;
}

int run_survey(const SurveyArgs& a) {
    std::vector<SurveyInput> inputs;
    std::vector<int> primes;
    try {
        inputs = survey_inputs(a);
        primes = parse_int_list(a.primes);
        if (a.m < 0) throw InputError("m must be >= 0");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    }
    struct Row {
        std::string poly, params;
        long p = 0;
        int n = 0, d = 0;
        long tjurina = 0;
        std::string codim_ok, verdict;
        std::vector<std::string> levels;
        std::string error;
        double ms = 0;
    };
    std::vector<Row> rows;
    for (const auto& in : inputs)
        for (int p : primes) {
            Row row;
            row.poly = in.poly;
            row.params = in.params;
            row.p = p;
            rows.push_back(row);
        }
    std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
        return std::tie(x.poly, x.params, x.p) < std::tie(y.poly, y.params, y.p);
    });
    std::map<std::string, std::vector<int>> weights;
    for (const auto& in : inputs) weights[in.poly] = in.weights;

    parallel_for(rows.size(), a.jobs, [&](std::size_t r) {
        Row& row = rows[r];
        auto t0 = std::chrono::steady_clock::now();
        try {
            auto w = weights[row.poly].empty() ? resolve_weights("", row.poly) : weights[row.poly];
            row.n = static_cast<int>(w.size());
            auto D = validate_hypersurface(parse_poly(row.poly, PrimeField(checked_prime(row.p)), WeightSystem(w)));
            row.d = D.d;
            row.tjurina = D.tjurina;
            CheckOptions co;
            co.ncap = a.ncap;
            auto rep = check_m_F_injective(D, a.m, co);
            row.codim_ok = rep.codim_ok ? "true" : "false";
            for (const auto& L : rep.levels) row.levels.push_back(to_string(L.verdict));
            row.verdict = to_string(rep.verdict);
        } catch (const std::exception& e) {
            std::string t = error_type(e), msg = e.what();
            row.error = msg.rfind(t, 0) == 0 ? msg : t + ": " + msg;
        }
        row.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    });

    std::ostringstream os;
    os << "p,n,family,params,poly,d,tjurina,codim_ok";
    for (int j = 0; j <= a.m; ++j) os << ",level" << j;
    os << ",verdict,error";
    if (a.timing) os << ",wall_ms";
    os << "\n";
    for (const auto& row : rows) {
        os << row.p << ',' << row.n << ',' << a.family << ',' << csv_plain(row.params) << ',' << csv_quote(row.poly) << ',';
        if (row.error.empty())
            os << row.d << ',' << row.tjurina << ',' << row.codim_ok;
        else
            os << ",,";
        for (int j = 0; j <= a.m; ++j)
            os << ',' << (static_cast<std::size_t>(j) < row.levels.size() ? row.levels[static_cast<std::size_t>(j)] : "");
        os << ',' << row.verdict << ',' << csv_plain(row.error);
        if (a.timing) os << ',' << static_cast<long>(row.ms);
        os << "\n";
    }
    if (a.csv_path.empty() || a.csv_path == "-") {
        std::cout << os.str();
    } else {
        std::ofstream f(a.csv_path, std::ios::binary);
        if (!f) {
            std::cerr << "error: cannot write " << a.csv_path << "\n";
            return kInvalid;
        }
        f << os.str();
    }
    return kOk;
}

struct VerifyArgs {
    std::string suite = "all", fixtures = "default", json_path, seed, g;
    std::vector<int> n, p;
    int maxdeg = 6, jobs = 1, ncap = 0;
};

int run_verify(const VerifyArgs& a) {
    namespace S = finj::suites;
    S::SuiteOptionsCli o;
    std::vector<std::string> names;
    try {
        o.seed = seed_from(a.seed);
        o.jobs = a.jobs;
        o.ncap = a.ncap;
        if (a.fixtures != "default") throw InputError("only the default fixture set is shipped");
        if (a.suite == "all")
            names = S::suite_names();
        else
            names = {a.suite};
        for (const auto& nm : names)
            if (std::find(S::suite_names().begin(), S::suite_names().end(), nm) == S::suite_names().end())
                throw InputError("unknown suite: " + nm);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    }
    json out = {{"suites", json::array()}, {"pass", true}, {"version", kVersion}};
    bool all = true;
    for (const auto& nm : names) {
        S::SuiteResult r;
        try {
            if (nm == "cartier-iso" && (!a.n.empty() || !a.p.empty())) {
                r = S::cartier_iso(a.n.empty() ? std::vector<int>{1, 2, 3} : a.n,
                                   a.p.empty() ? std::vector<Scalar>{2, 3, 5} : std::vector<Scalar>(a.p.begin(), a.p.end()),
                                   a.maxdeg);
            } else if (nm == "cartier-iso") {
                r = S::cartier_iso({1, 2, 3}, {2, 3, 5}, a.maxdeg);
            } else if (nm == "log-forms" && (!a.g.empty() || !a.p.empty())) {
                r = S::log_forms(o, a.g.empty() ? S::default_log_polys() : std::vector<std::string>{a.g},
                                 a.p.empty() ? std::vector<Scalar>{3, 5} : std::vector<Scalar>(a.p.begin(), a.p.end()));
            } else {
                r = S::run_named(nm, o);
            }
        } catch (const std::exception& e) {
            r.name = nm;
            r.pass = false;
            r.details = json::array({{{"error", std::string(e.what())}, {"type", error_type(e)}}});
        }
        all = all && r.pass;
        out["suites"].push_back(S::to_json(r));
    }
    out["pass"] = all;
    try {
        emit(out, a.json_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    }
    return all ? kOk : kInvariant;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Splices `--key value` pairs from a --config file after the subcommand,
// skipping keys that are also given as flags.
std::vector<std::string> with_config(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    std::string path;
    std::set<std::string> given;
    for (std::size_t q = 1; q < args.size(); ++q) {
        if (args[q].rfind("--", 0) != 0) continue;
        auto eq = args[q].find('=');
        std::string key = args[q].substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
        given.insert(key);
        if (key == "config") path = eq != std::string::npos ? args[q].substr(eq + 1) : (q + 1 < args.size() ? args[q + 1] : "");
    }
    if (path.empty()) return args;
    std::ifstream f(path);
    if (!f) throw InputError("cannot read config file " + path);
    std::vector<std::string> extra;
    std::string line;
    while (std::getline(f, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError("config line without '=': " + line);
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (key.empty() || key == "config" || given.count(key)) continue;
        if (value == "true") {
            extra.push_back("--" + key);
        } else if (value != "false") {
            extra.push_back("--" + key);
            extra.push_back(value);
        }
    }
    std::size_t at = 1;
    while (at < args.size() && args[at].rfind("-", 0) == 0) ++at;
    if (at < args.size()) ++at;
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), extra.begin(), extra.end());
    return args;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact F_p checks of m-F-injectivity for weighted-homogeneous hypersurfaces"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CheckArgs ca;
    auto* check = app.add_subcommand("check", "decide m-F-injectivity of one hypersurface");
    check->add_option("--p", ca.p, "prime")->required();
    check->add_option("--weights", ca.weights, "comma separated weights (default all 1)");
    check->add_option("--poly", ca.poly, "polynomial in x0, x1, ...")->required();
    check->add_option("--m", ca.m, "level m");
    check->add_option("--json", ca.json_path, "output path (default stdout)");
    check->add_option("--ncap", ca.ncap, "stabilization cap");
    check->add_option("--window", ca.window, "source degree window lo:hi");
    check->add_option("--jobs", ca.jobs, "worker threads")->check(CLI::PositiveNumber);
    check->add_option("--seed", ca.seed, "random seed (also FINJ_SEED)");

    SurveyArgs sa;
    auto* survey = app.add_subcommand("survey", "batch run over a polynomial family and primes");
    survey->add_option("--family", sa.family, "fermat | squares | file")->required();
    survey->add_option("--n", sa.n, "number of variables");
    survey->add_option("--a", sa.a, "fermat exponent");
    survey->add_option("--file", sa.file, "one polynomial per line, optionally 'w0,w1,...|poly'");
    survey->add_option("--primes", sa.primes, "comma separated primes")->required();
    survey->add_option("--m", sa.m, "level m");
    survey->add_option("--csv", sa.csv_path, "output path (default stdout)");
    survey->add_option("--jobs", sa.jobs, "worker threads")->check(CLI::PositiveNumber);
    survey->add_option("--ncap", sa.ncap, "stabilization cap");
    survey->add_flag("--timing", sa.timing, "append a wall time column");
    std::string survey_seed;
    survey->add_option("--seed", survey_seed, "random seed (also FINJ_SEED)");

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "run invariant suites");
    verify->add_option("--suite", va.suite, "suite name or all");
    verify->add_option("--fixtures", va.fixtures, "fixture set");
    verify->add_option("--json", va.json_path, "output path (default stdout)");
    verify->add_option("--n", va.n, "cartier-iso: variable counts")->delimiter(',');
    verify->add_option("--p", va.p, "primes")->delimiter(',');
    verify->add_option("--maxdeg", va.maxdeg, "cartier-iso: top degree");
    verify->add_option("--g", va.g, "log-forms: polynomial g");
    verify->add_option("--jobs", va.jobs, "worker threads")->check(CLI::PositiveNumber);
    verify->add_option("--ncap", va.ncap, "stabilization cap");
    verify->add_option("--seed", va.seed, "random seed (also FINJ_SEED)");

    std::string config_path;
    for (auto* sub : {check, survey, verify}) sub->add_option("--config", config_path, "flat key=value file; flags override it");
    std::vector<std::string> args;
    try {
        args = with_config(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    }
    try {
        std::vector<const char*> av;
        for (const auto& a : args) av.push_back(a.c_str());
        app.parse(static_cast<int>(av.size()), const_cast<char**>(av.data()));
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kInvalid;
    }
    if (*check) return run_check(ca);
    if (*survey) return run_survey(sa);
    return run_verify(va);
}
