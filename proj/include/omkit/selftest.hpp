#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace omkit {

struct AcceptanceCheck {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string summary;                // one line, measured vs expected
    std::vector<std::string> details;   // sub-checks, each prefixed PASS/FAIL
};

inline constexpr int kAcceptanceCriteria = 10;

// Runs one acceptance criterion (1..10). Never throws: a library error is
// reported as a failed check.
[[nodiscard]] AcceptanceCheck run_acceptance_check(int id);

// Runs every criterion, printing one PASS/FAIL line per criterion followed by
// indented sub-check lines. Returns the number of failed criteria.
int run_acceptance_suite(std::ostream& out);

} // namespace omkit
