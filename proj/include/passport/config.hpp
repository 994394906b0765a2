#pragma once

#include <map>
#include <string>
#include <vector>

#include "passport/a2c.hpp"
#include "passport/market.hpp"
#include "passport/pg.hpp"

namespace passport {

// Sectioned key-value configuration ([market], [grid], [pg], [a2c], [eval]).
class Config {
public:
    static Config load(const std::string& path);
    static Config parse(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
    std::vector<int> get_ints(const std::string& section, const std::string& key) const;

    MarketParams market() const;
    TimeGrid grid() const;
    pg::PGConfig pg_config() const;
    a2c::A2CConfig a2c_config() const;
    int eval_paths(int fallback = 100000) const;
    int trajectory_paths(int fallback = 1000) const;

    // canonical re-serialization, embedded into run manifests
    std::string snapshot() const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace passport
