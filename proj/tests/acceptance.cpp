// Acceptance runner: one PASS/FAIL line per criterion. Criteria 1-10 gate the
// exit status; criterion 11 is reported but does not gate.

#include "dnolab/verify.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>

using namespace dnolab;

namespace {

struct Criterion {
    int id;
    const char* title;
    double time_limit;  // seconds
    bool gating;
    std::function<std::vector<Check>()> run;
};

std::string summarize(const std::vector<Check>& checks) {
    std::string s;
    for (const auto& c : checks) {
        if (!s.empty()) s += "; ";
        s += c.name + (c.passed ? " ok " : " FAILED ") + format_double(c.measured);
        if (!c.detail.empty()) s += " (" + c.detail + ")";
    }
    return s;
}

template <class T>
void append(std::vector<Check>& out, const std::vector<T>& more) {
    out.insert(out.end(), more.begin(), more.end());
}

}  // namespace

int main() {
    const RunConfig cfg = parse_config_text("");  // ball, n = 2, q = 1, default tolerances
    const BoundaryChart ball_chart = detail::chart_from(cfg);

    const std::vector<Criterion> criteria = {
        {1, "sign identity, exhaustive n<=5 q<=3", 1, true, [] { return verify_forms(5, 3); }},
        {2, "residue engine vs quadrature and restriction constants", 5, true, [&] { return verify_residues(cfg); }},
        {3, "zero-order coefficients from residues, exact", 1, true, [] { return verify_lambda0(); }},
        {4, "flat-model oracle DNO equals |Xi|", 10, true, [] { return verify_ode_flat(2, 1e-6); }},
        {5, "order -1 remainder and quadratic-root closed form", 30, true,
         [] {
             std::vector<Check> out;
             for (const auto& c : verify_ode_closed_forms(1e-8))
                 if (c.name == "quadratic_root") out.push_back(c);
             append(out, verify_ode_remainder(0.4, 0.65));
             return out;
         }},
        {6, "phi-cancellation on pure and oblique rays", 5, true, [&] { return verify_cancellation(cfg); }},
        {7, "microlocal partition of unity", 5, true, [] { return verify_microlocal(2, 10000); }},
        {8, "assembled operator vs direct square on the ball", 60, true,
         [&] { return verify_crosscheck_chart(ball_chart, 1, 5, 1e-4, 1e-10, 1e-5); }},
        {9, "Kohn-Laplacian comparison", 10, true,
         [&] {
             auto out = verify_kohn_flat(2);
             append(out, verify_kohn_chart(ball_chart, 1, 0.6, 1e-8));
             return out;
         }},
        {10, "non-ellipticity signature on the transverse rays", 1, true,
         [&] { return verify_nonelliptic(ball_chart, 1, {4, 8, 16, 32}); }},
        {11, "xx-term gain on the periodic strip (stretch)", 300, false, [] { return verify_strip_gain(2.0, 0.1); }},
    };

    bool gate = true;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<Check> checks;
        std::string error;
        try {
            checks = c.run();
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool ok = error.empty() && !checks.empty() && secs <= c.time_limit;
        for (const auto& k : checks) ok = ok && k.passed;
        char timing[64];
        std::snprintf(timing, sizeof timing, "%.3fs/%gs", secs, c.time_limit);
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << c.id << (c.gating ? "" : " (non-gating)") << ": "
                  << c.title << " [" << timing << "] "
                  << (error.empty() ? summarize(checks) : "error: " + error) << std::endl;
        if (c.gating) gate = gate && ok;
    }
    std::cout << (gate ? "acceptance: all gating criteria pass" : "acceptance: gating failure") << std::endl;
    return gate ? 0 : 1;
}
