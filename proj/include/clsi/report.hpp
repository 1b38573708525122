#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace clsi {

// Raised when a defining integral or sum has no finite value.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised on malformed specs, files, or argument combinations.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when an infimum is attained at the edge of a finite grid whose
// extension rule promises more domain (insufficient padding).
struct EdgeAttainedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Verdict { Pass, Fail, Inconclusive };

std::string to_string(Verdict v);

struct KV {
    std::string key;
    std::string value;
};

std::string format_double(double v);

// Structured verdict emitted by every checker: pass/fail, extremal
// constant, witness input, numerical parameters.
struct Report {
    std::string check;
    Verdict verdict = Verdict::Pass;
    double extremal = std::numeric_limits<double>::quiet_NaN();
    std::string witness;
    std::string note;
    std::vector<KV> params;

    void put(const std::string& key, double value);
    void put(const std::string& key, const std::string& value);
    bool passed() const { return verdict == Verdict::Pass; }
    std::string to_text() const;
};

// Report specialized to family-sweep inequality checks.
struct InequalityReport {
    std::string check;
    Verdict verdict = Verdict::Pass;
    double lhs = 0.0;   // at the worst witness
    double rhs = 0.0;
    double worst_ratio = 0.0;
    std::string worst_witness;
    std::vector<KV> constants;
    std::vector<double> ratios;          // one entry per test function
    std::vector<std::string> labels;     // matching function ids
    std::string caveat;

    void put(const std::string& key, double value);
    void put(const std::string& key, const std::string& value);
    bool passed() const { return verdict == Verdict::Pass; }
    std::string to_text() const;
    std::string ratio_table_csv() const;
};

// Numerical comparison policy used by the inequality checkers.
struct Tolerance {
    double abs = 1e-12;
    double rel = 1e-7;
    int grid = 0;  // grid resolution hint for sweeps; 0 keeps defaults

    bool leq(double lhs, double rhs) const {
        return lhs <= rhs + abs + rel * std::abs(rhs);
    }
};

}  // namespace clsi
