#pragma once

#include <string>
#include <vector>

namespace vpb {

enum class ClauseStatus { pass, deviates, fail };

struct ConditionClause {
    std::string name;
    ClauseStatus status = ClauseStatus::fail;
    double measured = 0.0;
    std::string note;

    bool passed() const { return status == ClauseStatus::pass; }
};

struct ConditionReport {
    std::vector<ConditionClause> clauses;

    bool all_pass() const {
        for (const auto& c : clauses)
            if (c.status != ClauseStatus::pass) return false;
        return true;
    }
    // deviations are documented, failures are disqualifying
    bool no_failures() const {
        for (const auto& c : clauses)
            if (c.status == ClauseStatus::fail) return false;
        return true;
    }
    const ConditionClause* find(const std::string& name) const {
        for (const auto& c : clauses)
            if (c.name == name) return &c;
        return nullptr;
    }
};

inline const char* to_string(ClauseStatus s) {
    switch (s) {
        case ClauseStatus::pass: return "pass";
        case ClauseStatus::deviates: return "deviates";
        default: return "fail";
    }
}

}  // namespace vpb
