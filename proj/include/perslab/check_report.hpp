#pragma once

#include <string>
#include <vector>

namespace perslab {

enum class CheckKind { Analytic, Statistical };

inline const char* to_string(CheckKind k) {
    return k == CheckKind::Analytic ? "analytic" : "statistical";
}

struct CheckReport {
    std::string name;
    bool passed = false;
    std::vector<double> measured;
    double threshold = 0.0;
    std::string details;
    CheckKind kind = CheckKind::Analytic;
};

} // namespace perslab
