#include "loopchi/model.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>
#include <vector>

namespace loopchi {
namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

double parse_number(const std::string& s, int line) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) fail(line, "trailing characters after number '" + s + "'");
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        fail(line, "expected a number, got '" + s + "'");
    }
}

// Splits "a, b, (c, d), e" on commas that are not inside parentheses.
std::vector<std::string> split_top(const std::string& s) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char ch : s) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == ',' && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

std::vector<std::string> parse_tuple(const std::string& s, int line) {
    std::string t = trim(s);
    if (t.size() < 2 || t.front() != '(' || t.back() != ')')
        fail(line, "expected a parenthesized tuple, got '" + s + "'");
    return split_top(t.substr(1, t.size() - 2));
}

struct RawEntry {
    std::string key, value;
    int line;
};

} // namespace

ModelConfig load_config(const std::string& text) {
    std::vector<RawEntry> system_entries, bath_entries, quad_entries, lorentz_entries;
    bool saw_system = false;

    std::istringstream in(text);
    std::string raw;
    std::string section;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (size_t h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section == "system") saw_system = true;
            else if (section != "bath" && section != "quadrature" && section != "lorentzian")
                fail(lineno, "unknown section [" + section + "]");
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) fail(lineno, "expected key = value");
        RawEntry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno};
        if (e.key.empty()) fail(lineno, "empty key");
        if (section == "system") system_entries.push_back(e);
        else if (section == "bath") bath_entries.push_back(e);
        else if (section == "quadrature") quad_entries.push_back(e);
        else if (section == "lorentzian") lorentz_entries.push_back(e);
        else fail(lineno, "key outside of any section");
    }
    if (!saw_system) throw ConfigError("missing [system] section");

    ModelConfig cfg;
    SystemSpec& sys = cfg.system;

    // Pass 1: level definitions, in declaration order. 'dipole' and
    // 'populations' are the reserved keys of [system].
    for (const auto& e : system_entries) {
        if (e.key == "dipole" || e.key == "populations") continue;
        if (sys.index_of(e.key) >= 0) fail(e.line, "duplicate level label '" + e.key + "'");
        sys.levels.push_back({e.key, parse_number(e.value, e.line)});
    }
    const int n = sys.size();
    if (n == 0) throw ConfigError("no levels defined in [system]");

    sys.dipole = Eigen::MatrixXcd::Zero(n, n);
    sys.populations = Eigen::VectorXd::Zero(n);
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> dip_set(n, n);
    dip_set.setConstant(false);
    bool saw_dipole = false, saw_pops = false;

    auto level_index = [&](const std::string& label, int line) {
        int i = sys.index_of(label);
        if (i < 0) fail(line, "unknown level label '" + label + "'");
        return i;
    };

    for (const auto& e : system_entries) {
        if (e.key == "dipole") {
            saw_dipole = true;
            for (const auto& item : split_top(e.value)) {
                auto f = parse_tuple(item, e.line);
                if (f.size() != 4) fail(e.line, "dipole entries are (label, label, re, im)");
                int i = level_index(f[0], e.line), j = level_index(f[1], e.line);
                cplx v(parse_number(f[2], e.line), parse_number(f[3], e.line));
                if (dip_set(i, j) && std::abs(sys.dipole(i, j) - v) > 1e-12)
                    fail(e.line, "dipole not Hermitian at (" + f[0] + "," + f[1] + ")");
                sys.dipole(i, j) = v;
                dip_set(i, j) = true;
                if (dip_set(j, i) && std::abs(sys.dipole(j, i) - std::conj(v)) > 1e-12)
                    fail(e.line, "dipole not Hermitian at (" + f[1] + "," + f[0] + ")");
                sys.dipole(j, i) = std::conj(v);
                dip_set(j, i) = true;
            }
        } else if (e.key == "populations") {
            saw_pops = true;
            auto items = split_top(e.value);
            if (static_cast<int>(items.size()) != n)
                fail(e.line, "populations list must have one entry per level");
            for (int i = 0; i < n; ++i) sys.populations[i] = parse_number(items[i], e.line);
        }
    }
    if (!saw_dipole) throw ConfigError("missing 'dipole' in [system]");
    if (!saw_pops) throw ConfigError("missing 'populations' in [system]");

    BathSpec& bath = cfg.bath;
    bath.lambda = Eigen::MatrixXd::Zero(n, n);
    bath.big_lambda = Eigen::MatrixXd::Ones(n, n);
    for (const auto& e : bath_entries) {
        if (e.key == "mode") {
            if (e.value == "brownian") bath.mode = BathMode::brownian;
            else if (e.value == "fast") bath.mode = BathMode::fast;
            else if (e.value == "slow") bath.mode = BathMode::slow;
            else fail(e.line, "mode must be brownian, fast or slow");
        } else if (e.key == "kT") {
            bath.kT = parse_number(e.value, e.line);
        } else if (e.key == "lambda" || e.key == "big_lambda") {
            Eigen::MatrixXd& m = (e.key == "lambda") ? bath.lambda : bath.big_lambda;
            for (const auto& item : split_top(e.value)) {
                auto f = parse_tuple(item, e.line);
                if (f.size() != 3) fail(e.line, e.key + " entries are (label, label, value)");
                int i = level_index(f[0], e.line), j = level_index(f[1], e.line);
                double v = parse_number(f[2], e.line);
                m(i, j) = v;
                m(j, i) = v;
            }
        } else {
            fail(e.line, "unknown key '" + e.key + "' in [bath]");
        }
    }

    for (const auto& e : quad_entries) {
        QuadratureConfig& q = cfg.quad;
        if (e.key == "t_max") q.t_max = parse_number(e.value, e.line);
        else if (e.key == "points_per_axis") q.points_per_axis = static_cast<int>(parse_number(e.value, e.line));
        else if (e.key == "refinement_factor") q.refinement_factor = static_cast<int>(parse_number(e.value, e.line));
        else if (e.key == "rel_tol") q.rel_tol = parse_number(e.value, e.line);
        else if (e.key == "damping_floor") q.damping_floor = parse_number(e.value, e.line);
        else if (e.key == "eta_damping") q.eta_damping = parse_number(e.value, e.line);
        else fail(e.line, "unknown key '" + e.key + "' in [quadrature]");
    }

    for (const auto& e : lorentz_entries) {
        if (e.key == "eta_reg") cfg.eta_reg = parse_number(e.value, e.line);
        else fail(e.line, "unknown key '" + e.key + "' in [lorentzian]");
    }
    if (cfg.eta_reg <= 0.0) throw ConfigError("eta_reg must be positive");

    sys.validate();
    bath.validate(n);
    cfg.quad.validate();
    return cfg;
}

} // namespace loopchi
