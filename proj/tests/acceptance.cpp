// Acceptance runner: one PASS/FAIL line per criterion.
// usage: finj_acceptance <path to finj binary>

#include "suites.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <iostream>

using namespace finj;
namespace S = finj::suites;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string run_capture(const std::string& cmd, int& status) {
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        status = -1;
        return out;
    }
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    int rc = pclose(pipe);
    status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return out;
}

Outcome from_suite(const S::SuiteResult& r) { return {r.pass, r.pass ? "" : r.details.dump()}; }

Outcome vanishing_part(const S::SuiteResult& r, bool bz) {
    Outcome o{true, ""};
    for (const auto& fx : r.details) {
        for (const auto& e : fx["entries"]) {
            const std::string mod = e["module"];
            bool is_bz = mod.rfind("B_", 0) == 0 || mod.rfind("Z_", 0) == 0;
            if (is_bz != bz) continue;
            if (!e["ok"].get<bool>()) {
                o.pass = false;
                o.detail += std::string(fx["fixture"]) + " " + mod + " i=" + std::to_string(e["i"].get<int>()) + "; ";
            }
        }
        if (!bz)
            for (const auto& s : fx["socles"])
                if (s["dim"].get<std::size_t>() != 1) {
                    o.pass = false;
                    o.detail += std::string(fx["fixture"]) + " socle j=" + std::to_string(s["j"].get<int>()) + "; ";
                }
    }
    return o;
}

Outcome determinism(const std::string& cli) {
    const std::vector<std::string> base = {
        "check --p 3 --weights 1,1,1,1,1 --poly \"x0^2+x1^2+x2^2+x3^2+x4^2\" --m 1",
        "check --p 7 --weights 15,10,6 --poly \"x0^2 + x1^3 + x2^5\" --m 0",
        "survey --family fermat --n 3 --a 3 --primes 5,7,11,13 --m 0",
        "survey --family squares --n 5 --primes 3,5 --m 1",
    };
    Outcome o{true, ""};
    for (const auto& b : base) {
        std::vector<std::string> outs;
        for (const char* jobs : {"1", "1", "8"}) {
            int st = 0;
            outs.push_back(run_capture("'" + cli + "' " + b + " --jobs " + jobs + " 2>/dev/null", st));
            if (st != 0) {
                o.pass = false;
                o.detail += "exit " + std::to_string(st) + " for: " + b + "; ";
            }
        }
        if (outs[0].empty() || outs[0] != outs[1] || outs[0] != outs[2]) {
            o.pass = false;
            o.detail += "output differs for: " + b + "; ";
        }
    }
    return o;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: finj_acceptance <finj binary>\n";
        return 2;
    }
    const std::string cli = argv[1];
    S::SuiteOptionsCli opt;
    bool all = true;
    S::SuiteResult vz;
    bool vz_done = false;
    auto vanishing_run = [&]() -> const S::SuiteResult& {
        if (!vz_done) {
            vz = S::vanishing(opt, true, "bz");
            vz_done = true;
        }
        return vz;
    };

    struct Criterion {
        int id;
        std::string name;
        double limit_s;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> cs = {
        {1, "cartier isomorphism", 30, [] { return from_suite(S::cartier_iso({1, 2, 3}, {2, 3, 5}, 6)); }},
        {2, "koszul exactness", 60, [] { return from_suite(S::koszul(-2, 6)); }},
        {3, "local cohomology vanishing and socles", 300, [&] { return vanishing_part(vanishing_run(), false); }},
        {4, "oracle equivalence", 300, [&] { return from_suite(S::oracle(opt)); }},
        {5, "commuting diagram", 120, [&] { return from_suite(S::diagram(opt, 100)); }},
        {6, "log forms", 60, [&] { return from_suite(S::log_forms(opt, S::default_log_polys(), {3, 5}, 50)); }},
        {7, "descent", 600, [&] { return from_suite(S::descent(opt)); }},
        {8, "socle chain and K/theta", 180,
         [&] {
             auto a = from_suite(S::socle_chain(opt));
             auto b = from_suite(S::k_theta(opt, 100));
             return Outcome{a.pass && b.pass, a.detail + b.detail};
         }},
        {9, "B and Z vanishing", 300, [&] { return vanishing_part(vanishing_run(), true); }},
        {10, "level-0 cross-check", 60, [&] { return from_suite(S::level0(opt)); }},
        {11, "determinism", 120, [&] { return determinism(cli); }},
    };

    for (const auto& c : cs) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        // the shared vanishing run is charged to criterion 3
        bool in_time = secs <= c.limit_s;
        bool ok = o.pass && in_time;
        all = all && ok;
        std::printf("%s criterion %d (%s) %.1fs%s%s\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                    in_time ? "" : " over time limit", o.detail.empty() ? "" : (" : " + o.detail).c_str());
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
