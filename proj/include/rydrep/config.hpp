#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "rydrep/chainsim.hpp"
#include "rydrep/params.hpp"

namespace rydrep {

enum class SimLevel : unsigned char { link, chain };

// Fully-resolved run configuration.  Defaults reproduce the reference
// scenario (100 km links, 10 nodes, 22 km attenuation length, Gamma = 1 kHz,
// Omega = 2pi x 1 MHz, eta_ion = 0.99, c = 2e8 m/s, chi_r = 10 GHz).
struct RunConfig {
    ChainParams chain;          // includes NoiseParams
    long trials = 100000;
    std::uint64_t seed = 1;
    std::string out;            // output file (simulate) or directory (figures)
    GenMode mode = GenMode::fast;
    SimLevel level = SimLevel::chain;
    int threads = 1;

    void validate() const;      // throws std::invalid_argument with a message
};

// Parse a flat "key = value" file ('#' starts a comment; blank lines
// allowed).  Unknown keys or malformed lines raise std::invalid_argument
// with the file name and line number.  Keys mirror the CLI flags:
//   n_nodes, l0_km, l_att_km, gamma_hz, omega_rad_s, eta_ion, chi_r_hz,
//   c_m_s, pulse_duration_s, omega_over_delta_dd, trials, seed, out, mode,
//   level, threads.
void apply_config_file(RunConfig& config, const std::string& path);

// Apply one key = value assignment (same key set as the file format).
void apply_config_entry(RunConfig& config, const std::string& key,
                        const std::string& value, const std::string& where);

// The fully-resolved configuration as config-file text.  Every summary
// embeds this block, so a summary file can be fed back through --config to
// reproduce the run.
std::string serialize_config(const RunConfig& config);

}  // namespace rydrep
