#pragma once

#include "report.hpp"
#include "rational.hpp"

namespace qlax {

struct RunConfig {
    int N = 2;
    int window = 2;  // point window M_pt
    int depth = 0;   // operator truncation depth, 0 = derived per check
    int degcap = 3;
    int hprec = 6;  // h-series budget for the limit suite
    std::string mode = "exact";  // exact | numeric
    Rat q0 = Rat(3, 2);
    uint64_t seed = 12345;
    bool emit_ms = true;

    // command-layer fields
    std::string command = "verify";
    std::string suite = "all";
    std::string format = "text";
    int n = 1;
    std::string arg;  // free-form argument (operator text, bracket spec, ...)

    nlohmann::json to_json() const;
};

// Deterministic split-mix generator, committed to in the reports.
struct Rng {
    uint64_t s;
    explicit Rng(uint64_t seed) : s(seed) {}
    uint64_t next() {
        s += 0x9e3779b97f4a7c15ull;
        uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    long range(long lo, long hi) {  // inclusive
        return lo + static_cast<long>(next() % static_cast<uint64_t>(hi - lo + 1));
    }
    Rat rat() {
        long num = range(-6, 6);
        long den = range(1, 3);
        return Rat(num, den);
    }
    Rat nonzero_rat() {
        Rat r = rat();
        return r == 0 ? Rat(1) : r;
    }
};

Report verify_poisson(const RunConfig& cfg);
Report verify_kdv(const RunConfig& cfg);
Report verify_mkdv(const RunConfig& cfg);
Report verify_toda(const RunConfig& cfg);
Report verify_limits(const RunConfig& cfg);  // always exact arithmetic
Report run_suite(const RunConfig& cfg);      // dispatches, including "all"

}  // namespace qlax
