#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "model.hpp"

namespace asep {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key = value experiment description. Lines starting with '#' are comments.
struct ExperimentConfig {
    std::string mode = "verify"; // simulate | exact | tw-table | verify | duality
    double p = 0.3;
    double sigma = 0.25;
    double t = 512.0; // scaling time; simulations run for t / gamma
    int L_max = 3;
    int G_max = 2;
    std::uint64_t n_traj = 200000;
    std::uint64_t seed = 20240611;
    double s_pool = 1.0;
    std::string out;
    unsigned workers = 0; // 0: hardware concurrency
    double s_min = -5.0, s_max = 3.0, s_step = 0.1;
    double mc_scale = 1.0;
    std::string criteria; // comma-separated subset for verify

    void set(const std::string& key, const std::string& value) {
        try {
            if (key == "mode") mode = value;
            else if (key == "p") p = std::stod(value);
            else if (key == "sigma") sigma = std::stod(value);
            else if (key == "t") t = std::stod(value);
            else if (key == "L_max" || key == "L") L_max = std::stoi(value);
            else if (key == "G_max" || key == "G") G_max = std::stoi(value);
            else if (key == "n_traj" || key == "ntraj") n_traj = std::stoull(value);
            else if (key == "seed") seed = std::stoull(value);
            else if (key == "s_pool" || key == "pool-s") s_pool = std::stod(value);
            else if (key == "out") out = value;
            else if (key == "workers") workers = static_cast<unsigned>(std::stoul(value));
            else if (key == "s_min") s_min = std::stod(value);
            else if (key == "s_max") s_max = std::stod(value);
            else if (key == "s_step") s_step = std::stod(value);
            else if (key == "mc_scale") mc_scale = std::stod(value);
            else if (key == "criteria") criteria = value;
            else throw ConfigError("unknown key '" + key + "'");
        } catch (const std::logic_error&) {
            throw ConfigError("bad value for '" + key + "': '" + value + "'");
        }
    }

    void load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file " + path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t\r");
                const auto b = s.find_last_not_of(" \t\r");
                return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
            };
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
            set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }

    void validate() const {
        static const char* modes[] = {"simulate", "exact", "tw-table", "verify", "duality"};
        bool known = false;
        for (auto m : modes) known |= mode == m;
        if (!known) throw ConfigError("mode must be one of simulate, exact, tw-table, verify, duality");
        if (!(p > 0.0 && p < 0.5)) throw ConfigError("need 0 < p < 0.5");
        if (!(sigma > 0.0 && sigma < 1.0)) throw ConfigError("need 0 < sigma < 1");
        if (!(t > 0.0)) throw ConfigError("need t > 0");
        if (L_max < 1 || L_max > 16) throw ConfigError("need 1 <= L_max <= 16");
        if (G_max < 1 || G_max > 16) throw ConfigError("need 1 <= G_max <= 16");
        if (n_traj < 1) throw ConfigError("need n_traj >= 1");
        if (!(s_pool > 0.0)) throw ConfigError("need s_pool > 0");
        if (!(s_step > 0.0) || !(s_max >= s_min)) throw ConfigError("need s_step > 0 and s_max >= s_min");
        if (!(mc_scale > 0.0)) throw ConfigError("need mc_scale > 0");
    }

    // Canonical text; the hash of this string identifies the run.
    std::string canonical() const {
        std::ostringstream o;
        o.precision(17);
        o << "mode=" << mode << ";p=" << p << ";sigma=" << sigma << ";t=" << t << ";L_max=" << L_max << ";G_max=" << G_max
          << ";n_traj=" << n_traj << ";seed=" << seed << ";s_pool=" << s_pool << ";s_min=" << s_min << ";s_max=" << s_max
          << ";s_step=" << s_step << ";mc_scale=" << mc_scale << ";criteria=" << criteria;
        return o.str();
    }

    std::string hash() const {
        std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
        for (unsigned char c : canonical()) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }
};

} // namespace asep
