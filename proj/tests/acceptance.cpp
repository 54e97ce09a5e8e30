// One pass/fail line per acceptance criterion; exit status 1 if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "qteich/suites.hpp"

using namespace qteich;

namespace {

struct Criterion {
    int number;
    std::string title;
    Suite suite;
    std::vector<std::string> only;
    double time_limit;  // seconds
};

bool run(const Criterion& c) {
    SuiteConfig cfg;
    cfg.suite = c.suite;
    cfg.b = 1.0;
    cfg.seed = 7;
    cfg.only = c.only;
    const auto t0 = std::chrono::steady_clock::now();
    const auto records = run_suite(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = !records.empty() && secs < c.time_limit;
    for (const auto& r : records) ok = ok && r.pass;
    std::printf("[%s] %2d %s: %zu checks, %.1f s (limit %.0f s)\n", ok ? "PASS" : "FAIL", c.number, c.title.c_str(),
                records.size(), secs, c.time_limit);
    for (const auto& r : records)
        if (!r.pass || !ok)
            std::printf("       %-4s %-44s residual %.3e  tolerance %.1e%s%s\n", r.pass ? "ok" : "FAIL",
                        r.check_id.c_str(), r.residual, r.tolerance, r.params.count("error") ? "  " : "",
                        r.params.count("error") ? r.params.at("error").c_str() : "");
    std::fflush(stdout);
    return ok;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "dilogarithm identities on 100 strip points", Suite::Qdilog,
         {"qdilog.inversion", "qdilog.shift", "qdilog.unitarity", "qdilog.duality"}, 30},
        {2, "integral and product evaluation agree", Suite::Qdilog, {"qdilog.strategy_agreement"}, 30},
        {3, "Fourier integral closed forms and quadrature", Suite::Ramanujan, {}, 120},
        {4, "basic system and pentagon on the lattice", Suite::All, {"system.", "pentagon."}, 120},
        {5, "Yang-Baxter on six factors", Suite::YangBaxter, {"yangbaxter.residual", "yangbaxter.refinement"}, 300},
        {6, "eigenfunction equation and kernel symmetry", Suite::Spectral,
         {"spectral.eigen", "spectral.kernel_symmetry", "spectral.shift_direction"}, 60},
        {7, "completeness and weak orthogonality", Suite::Spectral,
         {"spectral.completeness", "spectral.weak_orthogonality"}, 300},
        {8, "lattice length spectrum and twist phase", Suite::Spectral, {"spectral.lattice"}, 180},
        {9, "groupoid relations and canned words", Suite::Groupoid, {}, 10},
        {10, "compiled twist and braiding words", Suite::Dehn, {}, 300},
        {11, "quantum group relations", Suite::Qgroup, {}, 300},
    };
    int failed = 0;
    for (const auto& c : criteria) failed += !run(c);
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
