#include "clsi/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace clsi {

namespace {

double parse_number(const std::string& tok, const std::string& what) {
    try {
        size_t used = 0;
        double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("expected a number for " + what + ", got '" + tok + "'");
    }
}

std::vector<std::string> tokenize_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) tokens.push_back(tok);
    }
    return tokens;
}

}  // namespace

CostFunction CostSpec::as_h() const {
    switch (kind) {
        case Kind::Quadratic: return make_quadratic_cost(param, CostRole::H);
        case Kind::Hp: return make_hp_cost(param);
        case Kind::ThetaD: return make_theta_d(param).closed_conjugate();
        case Kind::Table:
            return make_table_cost(parse_two_column_table(table_path), CostRole::H);
    }
    throw ConfigError("cost spec: unknown kind");
}

CostFunction CostSpec::as_theta() const {
    switch (kind) {
        case Kind::Quadratic: return make_quadratic_cost(param, CostRole::Theta);
        case Kind::Hp: return make_hp_cost(param).closed_conjugate();
        case Kind::ThetaD: return make_theta_d(param);
        case Kind::Table: {
            // table costs are H-role by default; the theta side comes from
            // the sweep conjugate on a slope-bracketed grid
            CostFunction h = make_table_cost(parse_two_column_table(table_path), CostRole::H);
            const GridFunction* tab = h.table();
            double smax = tab->segment_slope(tab->size() - 2);
            auto pair = legendre(h, linear_grid(-smax, smax, 2001));
            return pair.dual;
        }
    }
    throw ConfigError("cost spec: unknown kind");
}

std::string CostSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Quadratic: os << "quadratic " << format_double(param); break;
        case Kind::Hp: os << "hp " << format_double(param); break;
        case Kind::ThetaD: os << "thetaD " << format_double(param); break;
        case Kind::Table: os << "table " << table_path; break;
    }
    return os.str();
}

Measure1D parse_measure_tokens(const std::vector<std::string>& tokens, size_t& pos) {
    std::vector<double> atom_x, atom_w;
    while (pos < tokens.size()) {
        const std::string& t = tokens[pos];
        if (t == "atom") {
            if (pos + 2 >= tokens.size()) throw ConfigError("atom needs <x> <w>");
            atom_x.push_back(parse_number(tokens[pos + 1], "atom position"));
            atom_w.push_back(parse_number(tokens[pos + 2], "atom weight"));
            pos += 3;
        } else if (t == "gridcdf") {
            if (!atom_x.empty()) throw ConfigError("cannot mix atom and gridcdf directives");
            if (pos + 1 >= tokens.size()) throw ConfigError("gridcdf needs <path>");
            GridFunction tab = parse_two_column_table(tokens[pos + 1]);
            pos += 2;
            std::vector<double> xs(tab.nodes().begin(), tab.nodes().end());
            std::vector<double> fs(tab.values().begin(), tab.values().end());
            return Measure1D::grid_cdf(std::move(xs), std::move(fs));
        } else if (t == "family") {
            if (!atom_x.empty()) throw ConfigError("cannot mix atom and family directives");
            if (pos + 1 >= tokens.size()) throw ConfigError("family needs <tag> [params]");
            const std::string tag = tokens[pos + 1];
            pos += 2;
            auto need = [&](int k) {
                if (pos + static_cast<size_t>(k) > tokens.size())
                    throw ConfigError("family " + tag + ": missing parameters");
            };
            if (tag == "symmetric-exponential") return Measure1D::symmetric_exponential();
            if (tag == "gaussian") {
                need(2);
                double m = parse_number(tokens[pos], "gaussian mean");
                double s = parse_number(tokens[pos + 1], "gaussian sigma");
                pos += 2;
                return Measure1D::gaussian(m, s);
            }
            if (tag == "uniform") {
                need(2);
                double a = parse_number(tokens[pos], "uniform lower end");
                double b = parse_number(tokens[pos + 1], "uniform upper end");
                pos += 2;
                return Measure1D::uniform(a, b);
            }
            if (tag == "two-point") {
                need(2);
                double x0 = parse_number(tokens[pos], "two-point position");
                double x1 = parse_number(tokens[pos + 1], "two-point position");
                pos += 2;
                double w0 = 0.5;
                if (pos < tokens.size()) {
                    try {
                        size_t used = 0;
                        double v = std::stod(tokens[pos], &used);
                        if (used == tokens[pos].size()) {
                            w0 = v;
                            ++pos;
                        }
                    } catch (const std::exception&) {
                        // optional weight absent
                    }
                }
                return Measure1D::two_point(x0, x1, w0);
            }
            throw ConfigError("unknown measure family: " + tag);
        } else if (t == "measure") {
            if (pos + 1 >= tokens.size()) throw ConfigError("measure needs <path>");
            std::string path = tokens[pos + 1];
            pos += 2;
            return parse_measure_file(path);
        } else {
            break;
        }
    }
    if (!atom_x.empty()) return Measure1D::atoms(std::move(atom_x), std::move(atom_w));
    throw ConfigError("expected a measure spec (atom/gridcdf/family/measure)");
}

CostSpec parse_cost_tokens(const std::vector<std::string>& tokens, size_t& pos) {
    if (pos >= tokens.size() || tokens[pos] != "cost")
        throw ConfigError("expected a cost spec starting with 'cost'");
    ++pos;
    if (pos >= tokens.size()) throw ConfigError("cost needs a kind");
    const std::string kind = tokens[pos];
    ++pos;
    CostSpec spec;
    if (kind == "quadratic") {
        spec.kind = CostSpec::Kind::Quadratic;
        if (pos < tokens.size()) {
            try {
                size_t used = 0;
                double v = std::stod(tokens[pos], &used);
                if (used == tokens[pos].size()) {
                    spec.param = v;
                    ++pos;
                }
            } catch (const std::exception&) {
            }
        }
        return spec;
    }
    if (kind == "hp") {
        if (pos >= tokens.size()) throw ConfigError("cost hp needs <p>");
        spec.kind = CostSpec::Kind::Hp;
        spec.param = parse_number(tokens[pos], "hp exponent");
        ++pos;
        return spec;
    }
    if (kind == "thetaD") {
        if (pos >= tokens.size()) throw ConfigError("cost thetaD needs <D>");
        spec.kind = CostSpec::Kind::ThetaD;
        spec.param = parse_number(tokens[pos], "thetaD radius");
        ++pos;
        return spec;
    }
    if (kind == "table") {
        if (pos >= tokens.size()) throw ConfigError("cost table needs <path>");
        spec.kind = CostSpec::Kind::Table;
        spec.table_path = tokens[pos];
        ++pos;
        return spec;
    }
    throw ConfigError("unknown cost kind: " + kind);
}

Measure1D parse_measure_file(const std::string& path) {
    auto tokens = tokenize_file(path);
    size_t pos = 0;
    Measure1D m = parse_measure_tokens(tokens, pos);
    if (pos != tokens.size()) throw ConfigError("trailing tokens in measure file: " + path);
    return m;
}

GridFunction parse_two_column_table(const std::string& path) {
    auto tokens = tokenize_file(path);
    if (tokens.size() < 4 || tokens.size() % 2 != 0)
        throw ConfigError("two-column table needs pairs of numbers: " + path);
    std::vector<double> xs, ys;
    for (size_t i = 0; i < tokens.size(); i += 2) {
        xs.push_back(parse_number(tokens[i], "table abscissa"));
        ys.push_back(parse_number(tokens[i + 1], "table value"));
    }
    return GridFunction(std::move(xs), std::move(ys));
}

GridFunction parse_function_table(const std::string& path) { return parse_two_column_table(path); }

}  // namespace clsi
