#pragma once

#include <string>
#include <vector>

namespace padic::verify {

struct CheckResult {
    std::string name;
    bool passed;
    std::string detail;
};

struct CriterionReport {
    int id;
    std::string title;
    std::vector<CheckResult> checks;

    bool passed() const;
};

constexpr int kCriterionCount = 11;

CriterionReport run_criterion(int id);

/// operator, kernel, semigroup, solver, explicit, all
std::vector<int> suite_criteria(const std::string& suite);
std::vector<std::string> suite_names();

} // namespace padic::verify
