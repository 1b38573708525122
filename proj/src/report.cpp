#include "clsi/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace clsi {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void Report::put(const std::string& key, double value) {
    params.push_back({key, format_double(value)});
}

void Report::put(const std::string& key, const std::string& value) {
    params.push_back({key, value});
}

std::string Report::to_text() const {
    std::ostringstream os;
    os << "check: " << check << "\n";
    for (const auto& kv : params) os << kv.key << ": " << kv.value << "\n";
    if (!std::isnan(extremal)) os << "extremal: " << format_double(extremal) << "\n";
    if (!witness.empty()) os << "witness: " << witness << "\n";
    if (!note.empty()) os << "note: " << note << "\n";
    os << "verdict: " << to_string(verdict) << "\n";
    return os.str();
}

void InequalityReport::put(const std::string& key, double value) {
    constants.push_back({key, format_double(value)});
}

void InequalityReport::put(const std::string& key, const std::string& value) {
    constants.push_back({key, value});
}

std::string InequalityReport::to_text() const {
    std::ostringstream os;
    os << "check: " << check << "\n";
    for (const auto& kv : constants) os << kv.key << ": " << kv.value << "\n";
    os << "worst_ratio: " << format_double(worst_ratio) << "\n";
    os << "worst_witness: " << worst_witness << "\n";
    os << "lhs_at_worst: " << format_double(lhs) << "\n";
    os << "rhs_at_worst: " << format_double(rhs) << "\n";
    if (!caveat.empty()) os << "caveat: " << caveat << "\n";
    os << "verdict: " << to_string(verdict) << "\n";
    return os.str();
}

std::string InequalityReport::ratio_table_csv() const {
    std::ostringstream os;
    os << "function,ratio\n";
    for (size_t i = 0; i < ratios.size(); ++i) {
        os << (i < labels.size() ? labels[i] : "fn" + std::to_string(i)) << ","
           << format_double(ratios[i]) << "\n";
    }
    return os.str();
}

}  // namespace clsi
