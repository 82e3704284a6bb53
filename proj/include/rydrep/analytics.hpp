#pragma once

#include <vector>

#include "rydrep/params.hpp"

namespace rydrep {

// Multiplicative budget of the per-round link success probability:
// p0 = eta_t * p_no_decay * p_ion4, with p_no_decay = 1 - n_r*pi*Gamma/Omega
// (first-order decay budget over the n_r Rydberg-involving pulses of one
// generation-plus-diagnosis round) and p_ion4 = eta_ion^4 (four ionization
// read-outs per round).
struct LinkBudget {
    double eta_t = 0;
    double p_no_decay = 0;
    double p_ion4 = 0;
    double p0 = 0;
    int n_r = 23;
};

// Summary of the synchronized-round count statistics for one generation
// phase pair.  n_bar is the exact series sum; n_max the location of the
// round-count distribution's mode, which doubles as a lower-bound estimate
// (n_bar >= 2*n_max on the supported grid).
struct RoundCountSummary {
    double n_bar = 0;
    double n_max = 0;
    long truncation_n = 0;   // index at which the series was cut
    double tail_bound = 0;   // analytic bound on the discarded tail
};

// Fiber transmission probability exp(-l0/l_att).
double eta_t(double l0_km, double l_att_km);

// Per-round link success budget.  Throws std::domain_error when a factor
// falls outside [0,1] (e.g. decay budget exceeding unity).
LinkBudget p0(const NoiseParams& noise, int n_r = 23);

// Full-chain swapping success probability [(1 - 4*pi*Gamma/Omega) * eta_ion^4]^(N-2).
double p1(int n_nodes, const NoiseParams& noise);

// Probability that the maximum of K i.i.d. geometric(p0) round counts is <= n.
// S_K(n) = [1 - (1-p0)^n]^K, with (1-p0)^n evaluated via exp(n*log1p(-p0)).
double S_K(long n, int K, double p0);

// Probability that the maximum is exactly n: S_K(n) - S_K(n-1), evaluated in
// factored form q^(n-1) * p0 * sum_j a^j b^(K-1-j) to avoid cancellation in
// the deep tail.
double p_K(long n, int K, double p0);

// Expected total number of synchronized rounds for the two generation phases,
// n_bar = 2 * sum_n n*p_K(n) with K = n_nodes/2, summed until the analytic
// tail bound drops below 1e-9.  Throws std::invalid_argument for p0 = 0.
// For odd n_nodes the same formula is evaluated with real K = n_nodes/2
// (the closed form is the even-N convention; the chain simulator's odd-N
// split is documented separately).
RoundCountSummary n_bar(double p0, int n_nodes);

// Average end-to-end entangling time T = (L0/c) * n_bar / p1.
double total_time(const ChainParams& params);

// Direct transmission time over a lossy fiber: (1/chi_r) * exp(L/L_att).
double direct_time(double l_total_km, double l_att_km, double chi_r_hz);

// Data for the protocol-vs-direct comparison plot: log10 of both times over
// a grid of total distances, with L0 = L/(n_nodes-1) for the protocol curve.
struct TimeComparisonSeries {
    std::vector<double> l_km;
    std::vector<double> log10_direct_s;
    std::vector<double> log10_protocol_s;
};
TimeComparisonSeries fig3_series(int n_nodes, const std::vector<double>& l_grid_km,
                                 const ChainParams& base);

}  // namespace rydrep
