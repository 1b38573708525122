#pragma once

#include <string>
#include <vector>

#include "clsi/costs.hpp"
#include "clsi/measures.hpp"

namespace clsi {

// Token-stream dialect shared by spec files and the command line:
//   atom <x> <w>              (repeatable)
//   gridcdf <path>            (two-column table: node, cdf value)
//   family <tag> <params...>  (symmetric-exponential | gaussian m s |
//                              uniform a b | two-point x0 x1 [w0])
//   cost quadratic <t0> | cost hp <p> | cost thetaD <D> | cost table <path>
// `#` begins a comment (files only).

struct CostSpec {
    enum class Kind { Quadratic, Hp, ThetaD, Table };
    Kind kind = Kind::Quadratic;
    double param = 1.0;  // t0, p, or D
    std::string table_path;

    CostFunction as_h() const;      // role H (conjugate side for thetaD)
    CostFunction as_theta() const;  // role theta
    std::string describe() const;
};

// Parses measure directives starting at pos; consumes the tokens it uses.
Measure1D parse_measure_tokens(const std::vector<std::string>& tokens, size_t& pos);
CostSpec parse_cost_tokens(const std::vector<std::string>& tokens, size_t& pos);

Measure1D parse_measure_file(const std::string& path);
GridFunction parse_function_table(const std::string& path);
GridFunction parse_two_column_table(const std::string& path);

}  // namespace clsi
