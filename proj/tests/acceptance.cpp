#include "padic/verify.hpp"

#include <cstdio>

int main() {
    int failed = 0;
    for (int id = 1; id <= padic::verify::kCriterionCount; ++id) {
        const auto r = padic::verify::run_criterion(id);
        std::size_t ok = 0;
        for (const auto& c : r.checks) {
            ok += c.passed;
        }
        std::printf("criterion %2d: %s  %s (%zu/%zu checks)\n", id, r.passed() ? "PASS" : "FAIL", r.title.c_str(), ok,
                    r.checks.size());
        for (const auto& c : r.checks) {
            if (!c.passed) {
                std::printf("    failed: %s: %s\n", c.name.c_str(), c.detail.c_str());
            }
        }
        failed += !r.passed();
    }
    std::fflush(stdout);
    return failed == 0 ? 0 : 1;
}
