#include "rydrep/config.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>

#include "rydrep/csv.hpp"

namespace rydrep {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& where, const std::string& message) {
    throw std::invalid_argument(where + ": " + message);
}

double parse_double(const std::string& value, const std::string& where) {
    double out = 0.0;
    std::size_t pos = 0;
    try {
        out = std::stod(value, &pos);
    } catch (const std::exception&) {
        fail(where, "expected a number, got '" + value + "'");
    }
    if (pos != value.size()) fail(where, "unexpected trailing characters in '" + value + "'");
    return out;
}

long long parse_integer(const std::string& value, const std::string& where) {
    long long out = 0;
    std::size_t pos = 0;
    try {
        out = std::stoll(value, &pos);
    } catch (const std::exception&) {
        fail(where, "expected an integer, got '" + value + "'");
    }
    if (pos != value.size()) fail(where, "unexpected trailing characters in '" + value + "'");
    return out;
}

std::uint64_t parse_u64(const std::string& value, const std::string& where) {
    if (!value.empty() && value[0] == '-') fail(where, "expected a non-negative integer");
    unsigned long long out = 0;
    std::size_t pos = 0;
    try {
        out = std::stoull(value, &pos);
    } catch (const std::exception&) {
        fail(where, "expected a non-negative integer, got '" + value + "'");
    }
    if (pos != value.size()) fail(where, "unexpected trailing characters in '" + value + "'");
    return out;
}

}  // namespace

void RunConfig::validate() const {
    chain.validate();
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value,
                        const std::string& where) {
    NoiseParams& noise = config.chain.noise;
    if (key == "n_nodes") {
        config.chain.n_nodes = static_cast<int>(parse_integer(value, where));
    } else if (key == "l0_km") {
        noise.l0_km = parse_double(value, where);
    } else if (key == "l_att_km") {
        noise.l_att_km = parse_double(value, where);
    } else if (key == "gamma_hz") {
        noise.gamma_hz = parse_double(value, where);
    } else if (key == "omega_rad_s") {
        noise.omega_rad_s = parse_double(value, where);
    } else if (key == "eta_ion") {
        noise.eta_ion = parse_double(value, where);
    } else if (key == "chi_r_hz") {
        config.chain.chi_r_hz = parse_double(value, where);
    } else if (key == "c_m_s") {
        noise.c_m_s = parse_double(value, where);
    } else if (key == "pulse_duration_s") {
        noise.pulse_duration_s = parse_double(value, where);
    } else if (key == "omega_over_delta_dd") {
        noise.omega_over_delta_dd = parse_double(value, where);
    } else if (key == "trials") {
        config.trials = parse_integer(value, where);
    } else if (key == "seed") {
        config.seed = parse_u64(value, where);
    } else if (key == "out") {
        config.out = value;
    } else if (key == "mode") {
        if (value == "fast") {
            config.mode = GenMode::fast;
        } else if (value == "faithful") {
            config.mode = GenMode::faithful;
        } else {
            fail(where, "mode must be 'fast' or 'faithful', got '" + value + "'");
        }
    } else if (key == "level") {
        if (value == "link") {
            config.level = SimLevel::link;
        } else if (value == "chain") {
            config.level = SimLevel::chain;
        } else {
            fail(where, "level must be 'link' or 'chain', got '" + value + "'");
        }
    } else if (key == "threads") {
        config.threads = static_cast<int>(parse_integer(value, where));
    } else {
        fail(where, "unknown key '" + key + "'");
    }
}

void apply_config_file(RunConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = path + ":" + std::to_string(line_no);
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string text = trim(line);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) fail(where, "expected 'key = value'");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty()) fail(where, "empty key");
        apply_config_entry(config, key, value, where);
    }
}

std::string serialize_config(const RunConfig& config) {
    const NoiseParams& noise = config.chain.noise;
    std::string out;
    auto kv = [&](const char* key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    };
    kv("n_nodes", std::to_string(config.chain.n_nodes));
    kv("l0_km", fmt_double(noise.l0_km));
    kv("l_att_km", fmt_double(noise.l_att_km));
    kv("gamma_hz", fmt_double(noise.gamma_hz));
    kv("omega_rad_s", fmt_double(noise.omega_rad_s));
    kv("eta_ion", fmt_double(noise.eta_ion));
    kv("chi_r_hz", fmt_double(config.chain.chi_r_hz));
    kv("c_m_s", fmt_double(noise.c_m_s));
    kv("pulse_duration_s", fmt_double(noise.pulse_duration_s));
    kv("omega_over_delta_dd", fmt_double(noise.omega_over_delta_dd));
    kv("trials", std::to_string(config.trials));
    kv("seed", std::to_string(config.seed));
    kv("out", config.out);
    kv("mode", config.mode == GenMode::fast ? "fast" : "faithful");
    kv("level", config.level == SimLevel::link ? "link" : "chain");
    kv("threads", std::to_string(config.threads));
    return out;
}

}  // namespace rydrep
