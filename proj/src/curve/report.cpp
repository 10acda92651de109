#include <cmath>
#include <cstdio>

#include "json.hpp"

#include "bacoord/curve/validation.hpp"

namespace bacoord {

const char* to_string(CheckStatus s) noexcept {
    switch (s) {
        case CheckStatus::Pass:
            return "pass";
        case CheckStatus::Fail:
            return "fail";
        case CheckStatus::Warn:
            return "warn";
        case CheckStatus::NotApplicable:
            return "n/a";
    }
    return "?";
}

void ValidationReport::add(std::string rule, bool ok, std::string detail, double residual) {
    entries.push_back({std::move(rule), ok ? CheckStatus::Pass : CheckStatus::Fail, std::move(detail), residual});
}

void ValidationReport::append(const ValidationReport& other) {
    entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

bool ValidationReport::passed() const noexcept { return first_failure() == nullptr; }

const CheckEntry* ValidationReport::find(const std::string& rule) const noexcept {
    for (const auto& e : entries)
        if (e.rule == rule) return &e;
    return nullptr;
}

const CheckEntry* ValidationReport::first_failure() const noexcept {
    for (const auto& e : entries)
        if (e.status == CheckStatus::Fail) return &e;
    return nullptr;
}

std::string ValidationReport::to_json(int indent) const {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& e : entries) {
        nlohmann::ordered_json j;
        j["rule"] = e.rule;
        j["status"] = to_string(e.status);
        j["detail"] = e.detail;
        if (std::isfinite(e.residual)) j["residual"] = e.residual;
        else j["residual"] = nullptr;
        out.push_back(j);
    }
    return out.dump(indent) + "\n";
}

std::string ValidationReport::to_text() const {
    std::string out;
    char buf[64];
    for (const auto& e : entries) {
        out += "[";
        out += to_string(e.status);
        out += "] ";
        out += e.rule;
        if (std::isfinite(e.residual)) {
            std::snprintf(buf, sizeof buf, "  (residual %.3e)", e.residual);
            out += buf;
        }
        if (!e.detail.empty()) out += "  " + e.detail;
        out += "\n";
    }
    return out;
}

}  // namespace bacoord
