#include "cbd/config.hpp"

#include "cbd/grid.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace cbd {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, int line) {
    if (v == "inf") return kInfExponent;
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ConfigError(line, "expected a number, got '" + v + "'");
    }
}

int parse_int(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ConfigError(line, "expected an integer, got '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return static_cast<std::uint64_t>(x);
    } catch (...) {
        throw ConfigError(line, "expected an unsigned integer, got '" + v + "'");
    }
}

} // namespace

ExperimentConfig ExperimentConfig::parse_string(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string raw;
    std::string section;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            static const char* known[] = {"grid", "value", "operator", "dominate", "equivalence",
                                          "weights", "commutator", "run"};
            if (std::find_if(std::begin(known), std::end(known),
                             [&](const char* k) { return section == k; }) == std::end(known))
                throw ConfigError(lineno, "unknown section '" + section + "'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(lineno, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) throw ConfigError(lineno, "empty key or value");

        auto unknown = [&]() -> ConfigError {
            return ConfigError(lineno, "unknown key '" + key + "' in section [" + section + "]");
        };
        if (section == "grid") {
            if (key == "d") cfg.d = parse_int(val, lineno);
            else if (key == "L") cfg.L = parse_int(val, lineno);
            else throw unknown();
        } else if (section == "value") {
            if (key == "n") cfg.n = parse_int(val, lineno);
            else if (key == "m") cfg.m = parse_int(val, lineno);
            else if (key == "r") cfg.r = parse_double(val, lineno);
            else throw unknown();
        } else if (section == "operator") {
            if (key == "kind") cfg.kernel = val;
            else if (key == "c") cfg.kernel_c = parse_double(val, lineno);
            else if (key == "delta_mod") cfg.kernel_delta = parse_double(val, lineno);
            else throw unknown();
        } else if (section == "dominate") {
            if (key == "epsilon") cfg.epsilon = parse_double(val, lineno);
            else if (key == "eps_mvee") cfg.eps_mvee = parse_double(val, lineno);
            else throw unknown();
        } else if (section == "equivalence") {
            if (key == "p") cfg.eq_p = parse_double(val, lineno);
            else if (key == "q") cfg.eq_q = parse_double(val, lineno);
            else if (key == "delta") cfg.eq_delta = parse_double(val, lineno);
            else if (key == "seeds") cfg.eq_seeds = parse_int(val, lineno);
            else throw unknown();
        } else if (section == "weights") {
            if (key == "direction_count") cfg.weight_directions = parse_int(val, lineno);
            else throw unknown();
        } else if (section == "commutator") {
            if (key == "kind") cfg.commutator_kind = val;
            else if (key == "s") cfg.comm_s = parse_double(val, lineno);
            else if (key == "t") cfg.comm_t = parse_double(val, lineno);
            else if (key == "p") cfg.comm_p = parse_double(val, lineno);
            else if (key == "k") cfg.comm_k = parse_int(val, lineno);
            else throw unknown();
        } else if (section == "run") {
            if (key == "seed") cfg.seed = parse_u64(val, lineno);
            else throw unknown();
        } else {
            throw ConfigError(lineno, "key outside any [section]");
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read config file: " + path);
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_string(buf.str());
}

void ExperimentConfig::validate() const {
    if (d != 1 && d != 2) throw std::invalid_argument("config: d must be 1 or 2");
    if (L < 1 || L > 12) throw std::invalid_argument("config: L must be in [1, 12]");
    if (n < 1 || m < 1) throw std::invalid_argument("config: n, m must be >= 1");
    if (!(r >= 1.0)) throw std::invalid_argument("config: r must be >= 1 (or inf)");
    if (kernel != "hilbert_periodic" && kernel != "dini_smooth")
        throw std::invalid_argument("config: unknown kernel kind '" + kernel + "'");
    if (!(epsilon > 0.0) || !(n * epsilon < 0.5))
        throw std::invalid_argument("config: dominate needs 0 < epsilon and n*epsilon < 1/2");
    if (!(eq_delta > 0.0 && eq_delta < 1.0)) throw std::invalid_argument("config: delta must be in (0,1)");
    if (eq_seeds < 1) throw std::invalid_argument("config: seeds must be >= 1");
    if (!(eq_p >= 1.0) || !(eq_q >= 1.0)) throw std::invalid_argument("config: equivalence exponents must be >= 1");
    if (weight_directions < 2) throw std::invalid_argument("config: direction_count must be >= 2");
    if (commutator_kind != "classical" && commutator_kind != "iterated" && commutator_kind != "mixed")
        throw std::invalid_argument("config: unknown commutator kind");
    if (!(comm_s > 1.0) || !(comm_t > 1.0)) throw std::invalid_argument("config: s, t must be > 1");
    const double tprime = comm_t / (comm_t - 1.0);
    if (!(comm_p > tprime && comm_p < comm_s))
        throw std::invalid_argument("config: commutator p must lie in (t', s)");
    if (comm_k < 1 || comm_k > 20) throw std::invalid_argument("config: iterated order k must be in [1, 20]");
}

} // namespace cbd
