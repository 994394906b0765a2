#include "passport/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace passport {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) out.push_back(trim(tok));
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (...) {
        throw ConfigError("config: bad numeric value for " + what + ": '" + s + "'");
    }
}

int to_int(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (...) {
        throw ConfigError("config: bad integer value for " + what + ": '" + s + "'");
    }
}

}  // namespace

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path);
}

Config Config::parse(const std::string& text, const std::string& origin) {
    Config cfg;
    std::stringstream ss(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: malformed section at " + origin + ":" +
                                  std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            cfg.sections_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos || section.empty())
            throw ConfigError("config: expected 'key = value' at " + origin + ":" +
                              std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config: empty key or value at " + origin + ":" +
                              std::to_string(lineno));
        cfg.sections_[section][key] = value;
    }
    return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end() || !s->second.count(key))
        throw ConfigError("config: missing [" + section + "] " + key);
    return s->second.at(key);
}

double Config::get_double(const std::string& section, const std::string& key) const {
    return to_double(get_string(section, key), "[" + section + "] " + key);
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

int Config::get_int(const std::string& section, const std::string& key) const {
    return to_int(get_string(section, key), "[" + section + "] " + key);
}

int Config::get_int(const std::string& section, const std::string& key, int fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

std::vector<double> Config::get_doubles(const std::string& section,
                                        const std::string& key) const {
    std::vector<double> out;
    for (const auto& tok : split(get_string(section, key), ','))
        out.push_back(to_double(tok, "[" + section + "] " + key));
    return out;
}

std::vector<int> Config::get_ints(const std::string& section, const std::string& key) const {
    std::vector<int> out;
    for (const auto& tok : split(get_string(section, key), ','))
        out.push_back(to_int(tok, "[" + section + "] " + key));
    return out;
}

MarketParams Config::market() const {
    MarketParams p;
    p.r = get_double("market", "r");
    p.sigma = get_doubles("market", "sigma");
    p.s0 = get_doubles("market", "s0");
    p.x0 = get_double("market", "x0");
    const int d = static_cast<int>(p.sigma.size());
    const std::string rho = has("market", "rho") ? get_string("market", "rho") : "identity";
    p.rho.assign(d, std::vector<double>(d, 0.0));
    for (int i = 0; i < d; ++i) p.rho[i][i] = 1.0;
    if (rho != "identity") {
        const auto rows = split(rho, ';');
        if (static_cast<int>(rows.size()) != d)
            throw ConfigError("config: rho needs one ';'-separated row per asset");
        for (int i = 0; i < d; ++i) {
            const auto cells = split(rows[i], ',');
            if (static_cast<int>(cells.size()) != d)
                throw ConfigError("config: rho row has wrong length");
            for (int j = 0; j < d; ++j) p.rho[i][j] = to_double(cells[j], "[market] rho");
        }
    }
    try {
        p.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("config: invalid market: ") + e.what());
    }
    return p;
}

TimeGrid Config::grid() const {
    TimeGrid g;
    if (has("grid", "times")) {
        g.times = get_doubles("grid", "times");
    } else {
        g = TimeGrid::equidistant(get_int("grid", "n_steps"), get_double("grid", "maturity"));
    }
    try {
        g.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("config: invalid grid: ") + e.what());
    }
    return g;
}

pg::PGConfig Config::pg_config() const {
    pg::PGConfig c;
    if (has("pg", "dppt")) c.dppt = get_ints("pg", "dppt");
    c.B = get_int("pg", "B", c.B);
    c.lr = get_double("pg", "lr", c.lr);
    if (has("pg", "epochs")) c.epochs = get_ints("pg", "epochs");
    if (has("pg", "batch_size")) c.batch_sizes = get_ints("pg", "batch_size");
    c.entropy_weight = get_double("pg", "entropy_weight", c.entropy_weight);
    c.resample_cap = get_int("pg", "resample_cap", c.resample_cap);
    c.sweeps = get_int("pg", "sweeps", c.sweeps);
    if (has("pg", "hidden")) c.hidden = get_ints("pg", "hidden");
    try {
        c.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("config: invalid [pg]: ") + e.what());
    }
    return c;
}

a2c::A2CConfig Config::a2c_config() const {
    a2c::A2CConfig c;
    c.niter = get_int("a2c", "niter", c.niter);
    c.B = get_int("a2c", "B", c.B);
    c.tau = get_double("a2c", "tau", c.tau);
    c.gamma = get_double("a2c", "gamma", c.gamma);
    c.actor_lr = get_double("a2c", "actor_lr", c.actor_lr);
    c.critic_lr = get_double("a2c", "critic_lr", c.critic_lr);
    if (has("a2c", "hidden")) c.hidden = get_ints("a2c", "hidden");
    try {
        c.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("config: invalid [a2c]: ") + e.what());
    }
    return c;
}

int Config::eval_paths(int fallback) const { return get_int("eval", "n_paths", fallback); }

int Config::trajectory_paths(int fallback) const {
    return get_int("eval", "trajectory_paths", fallback);
}

std::string Config::snapshot() const {
    std::stringstream out;
    for (const auto& [section, entries] : sections_) {
        out << '[' << section << "]\n";
        for (const auto& [key, value] : entries) out << key << " = " << value << '\n';
    }
    return out.str();
}

}  // namespace passport
