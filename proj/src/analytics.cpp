#include "rydrep/analytics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rydrep {

namespace {

constexpr double kPi = 3.14159265358979323846;

// (1-p0)^m via exp(m*log1p(-p0)); exact at m = 0 even when p0 = 1
// (log1p(-1) = -inf would otherwise poison the m = 0 case with 0*inf).
double q_pow(double log_q, long m) {
    if (m == 0) return 1.0;
    return std::exp(static_cast<double>(m) * log_q);
}

void check_probability(double value, const char* name) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw std::domain_error(std::string(name) + " = " + std::to_string(value) +
                                " falls outside [0,1]; parameters are outside the"
                                " model's validity range");
    }
}

}  // namespace

double eta_t(double l0_km, double l_att_km) {
    if (l0_km < 0) throw std::invalid_argument("eta_t: l0_km must be >= 0");
    if (l_att_km <= 0) throw std::invalid_argument("eta_t: l_att_km must be > 0");
    return std::exp(-l0_km / l_att_km);
}

LinkBudget p0(const NoiseParams& noise, int n_r) {
    noise.validate();
    if (n_r < 0) throw std::invalid_argument("p0: n_r must be >= 0");
    LinkBudget budget;
    budget.n_r = n_r;
    budget.eta_t = eta_t(noise.l0_km, noise.l_att_km);
    budget.p_no_decay = 1.0 - n_r * kPi * noise.gamma_hz / noise.omega_rad_s;
    budget.p_ion4 = std::pow(noise.eta_ion, 4);
    check_probability(budget.eta_t, "eta_t");
    check_probability(budget.p_no_decay, "decay budget 1 - n_r*pi*Gamma/Omega");
    check_probability(budget.p_ion4, "eta_ion^4");
    budget.p0 = budget.eta_t * budget.p_no_decay * budget.p_ion4;
    return budget;
}

double p1(int n_nodes, const NoiseParams& noise) {
    if (n_nodes < 2) throw std::invalid_argument("p1: n_nodes must be >= 2");
    noise.validate();
    const double per_node =
        (1.0 - 4.0 * kPi * noise.gamma_hz / noise.omega_rad_s) * std::pow(noise.eta_ion, 4);
    check_probability(per_node, "per-node swap probability");
    return std::pow(per_node, n_nodes - 2);
}

double S_K(long n, int K, double p0) {
    if (n < 0) throw std::invalid_argument("S_K: n must be >= 0");
    if (K < 1) throw std::invalid_argument("S_K: K must be >= 1");
    if (!(p0 > 0.0 && p0 <= 1.0)) throw std::invalid_argument("S_K: p0 must lie in (0,1]");
    if (n == 0) return 0.0;
    const double log_q = std::log1p(-p0);
    // 1 - q^n evaluated as -expm1(n log q): no cancellation for small n*p0.
    const double one_minus_qn = -std::expm1(static_cast<double>(n) * log_q);
    return std::pow(one_minus_qn, K);
}

double p_K(long n, int K, double p0) {
    if (n < 1) throw std::invalid_argument("p_K: n must be >= 1");
    if (K < 1) throw std::invalid_argument("p_K: K must be >= 1");
    if (!(p0 > 0.0 && p0 <= 1.0)) throw std::invalid_argument("p_K: p0 must lie in (0,1]");
    const double log_q = std::log1p(-p0);
    // S_K(n) - S_K(n-1) = a^K - b^K with a = 1-q^n, b = 1-q^(n-1).  The
    // factored form (a-b) * sum_j a^j b^(K-1-j) with a-b = q^(n-1)*p0 stays
    // accurate deep in the tail where a ~ b ~ 1 and direct subtraction
    // cancels.
    const double a = -std::expm1(static_cast<double>(n) * log_q);
    const double b = -std::expm1(static_cast<double>(n - 1) * log_q);
    double sum = 0.0;
    for (int j = 0; j < K; ++j) sum += std::pow(a, j) * std::pow(b, K - 1 - j);
    return q_pow(log_q, n - 1) * p0 * sum;
}

RoundCountSummary n_bar(double p0, int n_nodes) {
    if (p0 == 0.0) throw std::invalid_argument("n_bar: p0 = 0 diverges");
    if (!(p0 > 0.0 && p0 <= 1.0)) throw std::invalid_argument("n_bar: p0 must lie in (0,1]");
    if (n_nodes < 2) throw std::invalid_argument("n_bar: n_nodes must be >= 2");
    const double K = n_nodes / 2.0;
    const double log_q = std::log1p(-p0);

    // n_bar = 2 * sum_{n>=1} n p_K(n) = 2 * sum_{n>=0} (1 - S_K(n)).
    // Survival form: every term is positive, no cancellation.
    RoundCountSummary summary;
    double sum = 0.0;
    long n = 0;
    for (;; ++n) {
        const double qn = q_pow(log_q, n);
        const double survival = -std::expm1(K * std::log1p(-qn));  // 1 - (1-q^n)^K
        sum += survival;
        // 1 - S_K(m) <= K q^m, so the discarded tail after n is bounded by
        // 2 K q^(n+1) / (1 - q) = 2 K q^(n+1) / p0.
        const double tail = 2.0 * K * qn * (1.0 - p0) / p0;
        if ((tail < 1e-9 && survival < 1e-15 * sum) || n > 100000000L) {
            summary.tail_bound = tail;
            break;
        }
    }
    summary.n_bar = 2.0 * sum;
    summary.truncation_n = n;
    summary.n_max = (p0 < 1.0) ? -std::log(K) / log_q : 0.0;
    return summary;
}

double total_time(const ChainParams& params) {
    params.validate();
    const LinkBudget budget = p0(params.noise);
    const double nb = n_bar(budget.p0, params.n_nodes).n_bar;
    const double p_swap = p1(params.n_nodes, params.noise);
    const double slot_s = params.l0_km() * 1000.0 / params.c_m_s();
    return slot_s * nb / p_swap;
}

double direct_time(double l_total_km, double l_att_km, double chi_r_hz) {
    if (l_total_km < 0) throw std::invalid_argument("direct_time: l_total_km must be >= 0");
    if (l_att_km <= 0) throw std::invalid_argument("direct_time: l_att_km must be > 0");
    if (chi_r_hz <= 0) throw std::invalid_argument("direct_time: chi_r_hz must be > 0");
    return std::exp(l_total_km / l_att_km) / chi_r_hz;
}

TimeComparisonSeries fig3_series(int n_nodes, const std::vector<double>& l_grid_km,
                                 const ChainParams& base) {
    if (n_nodes < 2) throw std::invalid_argument("fig3_series: n_nodes must be >= 2");
    TimeComparisonSeries series;
    for (double l_km : l_grid_km) {
        if (l_km <= 0) throw std::invalid_argument("fig3_series: distances must be > 0");
        ChainParams params = base;
        params.n_nodes = n_nodes;
        params.noise.l0_km = l_km / (n_nodes - 1);  // N-1 fiber segments
        series.l_km.push_back(l_km);
        series.log10_direct_s.push_back(
            std::log10(direct_time(l_km, params.l_att_km(), params.chi_r_hz)));
        series.log10_protocol_s.push_back(std::log10(total_time(params)));
    }
    return series;
}

}  // namespace rydrep
