#pragma once

#include <stdexcept>
#include <string>

namespace rydrep {

// Physical noise model of one repeater link.  Defaults are the reference
// operating point used throughout the documentation: a 100 km segment of
// standard telecom fiber, MHz-scale two-photon Rabi frequency, kHz Rydberg
// decay, and 99% ion detection.
struct NoiseParams {
    double gamma_hz = 1.0e3;            // Rydberg decay rate Gamma (s^-1)
    double omega_rad_s = 2.0e6 * 3.14159265358979323846;  // Rabi frequency Omega (rad/s)
    double eta_ion = 0.99;              // ion detection efficiency
    double l0_km = 100.0;               // inter-cavity fiber length
    double l_att_km = 22.0;             // fiber attenuation length
    double omega_over_delta_dd = 0.1;   // Omega / Delta_dd (double-excitation suppression)
    double pulse_duration_s = 1.0e-6;   // wall-clock duration of one pi pulse
    double c_m_s = 2.0e8;               // signal velocity in fiber
    // Optional channel: treat double Rydberg excitation as an extra per-pulse
    // loss with probability (omega_over_delta_dd)^2.  Off by default; the
    // closed-form budget never includes it.
    bool include_double_excitation = false;

    // Per-pulse decay probability for a fully Rydberg-populated branch.
    double p_decay_per_pulse() const { return 3.14159265358979323846 * gamma_hz / omega_rad_s; }

    void validate() const {
        if (gamma_hz < 0) throw std::invalid_argument("gamma_hz must be >= 0");
        if (omega_rad_s <= 0) throw std::invalid_argument("omega_rad_s must be > 0");
        if (eta_ion < 0 || eta_ion > 1) throw std::invalid_argument("eta_ion must lie in [0,1]");
        if (l0_km < 0) throw std::invalid_argument("l0_km must be >= 0");
        if (l_att_km <= 0) throw std::invalid_argument("l_att_km must be > 0");
        if (omega_over_delta_dd < 0 || omega_over_delta_dd >= 1)
            throw std::invalid_argument("omega_over_delta_dd must lie in [0,1)");
        if (pulse_duration_s < 0) throw std::invalid_argument("pulse_duration_s must be >= 0");
        if (c_m_s <= 0) throw std::invalid_argument("c_m_s must be > 0");
    }
};

// Chain-level configuration: N nodes joined by N-1 links.  Link geometry and
// noise live in `noise` (single source of truth); the accessors below expose
// them under their chain-level names.
struct ChainParams {
    int n_nodes = 10;
    double chi_r_hz = 1.0e10;  // direct-transmission source repetition rate
    NoiseParams noise;

    double l0_km() const { return noise.l0_km; }
    double l_att_km() const { return noise.l_att_km; }
    double c_m_s() const { return noise.c_m_s; }
    double total_length_km() const { return noise.l0_km * (n_nodes - 1); }

    void validate() const {
        noise.validate();
        if (n_nodes < 2) throw std::invalid_argument("n_nodes must be >= 2");
        if (chi_r_hz <= 0) throw std::invalid_argument("chi_r_hz must be > 0");
    }
};

}  // namespace rydrep
