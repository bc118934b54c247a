#pragma once

#include <string>
#include <vector>

namespace cavrec {

struct CriterionResult {
    int id = 0;
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    // How measured is compared with tolerance, e.g. "<" or ">=".
    std::string relation = "<";
    bool pass = false;
    std::string detail;
};

struct AcceptanceOptions {
    // Flip the sign of chi_s in the reconstruction pipeline (fault injection).
    bool corrupt_chi_sign = false;
    unsigned threads = 1;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {});

// One line per criterion plus a summary line. Contains no timing or dates.
std::string format_report(const std::vector<CriterionResult>& results);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace cavrec
