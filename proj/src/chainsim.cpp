#include "rydrep/chainsim.hpp"

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <thread>

#include "rydrep/analytics.hpp"
#include "rydrep/linkprotocol.hpp"

namespace rydrep {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kOracleTolerance = 1e-12;

using Complex = std::complex<double>;

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::Matrix4cd out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

Eigen::Matrix2cd pauli_matrix(PauliWord w) {
    Eigen::Matrix2cd x, z;
    x << 0, 1, 1, 0;
    z << 1, 0, 0, -1;
    Eigen::Matrix2cd out = Eigen::Matrix2cd::Identity();
    if (w.x) out = x * out;
    if (w.z) out = z * out;
    return out;
}

// Apply a two-qubit gate to qubits (ql, qr) of the state vector; gate basis
// |00>,|01>,|10>,|11> with the FIRST tensor slot = qubit ql.
void apply_two_qubit(Eigen::VectorXcd& psi, const Eigen::Matrix4cd& gate, int ql, int qr) {
    const Eigen::Index dim = psi.size();
    const Eigen::Index bit_l = Eigen::Index(1) << ql;
    const Eigen::Index bit_r = Eigen::Index(1) << qr;
    for (Eigen::Index base = 0; base < dim; ++base) {
        if ((base & bit_l) || (base & bit_r)) continue;
        Eigen::Vector4cd in;
        for (int g = 0; g < 4; ++g) {
            const Eigen::Index idx = base | ((g & 2) ? bit_l : 0) | ((g & 1) ? bit_r : 0);
            in(g) = psi(idx);
        }
        const Eigen::Vector4cd out = gate * in;
        for (int g = 0; g < 4; ++g) {
            const Eigen::Index idx = base | ((g & 2) ? bit_l : 0) | ((g & 1) ? bit_r : 0);
            psi(idx) = out(g);
        }
    }
}

double swap_success_probability(const NoiseParams& noise) {
    const double p = (1.0 - 4.0 * kPi * noise.gamma_hz / noise.omega_rad_s) *
                     std::pow(noise.eta_ion, 4);
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::domain_error(
            "per-node swap probability falls outside [0,1]; parameters are outside the"
            " model's validity range");
    }
    return p;
}

}  // namespace

std::string bell_label_name(BellLabel label) {
    switch (label) {
        case BellLabel::phi_plus: return "phi_plus";
        case BellLabel::phi_minus: return "phi_minus";
        case BellLabel::psi_plus: return "psi_plus";
        case BellLabel::psi_minus: return "psi_minus";
    }
    return "?";
}

std::string pauli_word_name(PauliWord w) {
    if (w.x && w.z) return "ZX";
    if (w.x) return "X";
    if (w.z) return "Z";
    return "I";
}

BellLabel bell_label_under(PauliWord w) {
    if (w.x && w.z) return BellLabel::psi_minus;
    if (w.x) return BellLabel::psi_plus;
    if (w.z) return BellLabel::phi_minus;
    return BellLabel::phi_plus;
}

PauliWord correction_for(int i_l, int i_r) {
    if ((i_l != 0 && i_l != 1) || (i_r != 0 && i_r != 1))
        throw std::invalid_argument("correction_for: outcomes must be 0 or 1");
    return {i_r == 1, i_l == 1};
}

Eigen::Matrix4cd swap_gate_matrix() {
    const Complex i(0.0, 1.0);
    const double r = 1.0 / std::sqrt(2.0);
    // U = exp(-i pi/2 sz) exp(-i pi/4 sy), V = exp(-i pi/2 sx) exp(-i pi/2 sz)
    // exp(-i pi/4 sy), evaluated in closed form.
    Eigen::Matrix2cd u, v;
    u << -i * r, i * r, i * r, i * r;
    v << r, r, -r, r;
    Eigen::Matrix4cd p = Eigen::Matrix4cd::Identity();
    p(0, 0) = -1;
    p(1, 1) = -1;
    p(3, 3) = -1;
    return kron2(u, u) * p * kron2(Eigen::Matrix2cd::Identity(), v);
}

std::pair<BellLabel, PauliWord> swap_oracle(int n_nodes,
                                            const std::vector<std::pair<int, int>>& outcomes) {
    return swap_oracle_with_gate(n_nodes, outcomes, swap_gate_matrix());
}

std::pair<BellLabel, PauliWord> swap_oracle_with_gate(
    int n_nodes, const std::vector<std::pair<int, int>>& outcomes,
    const Eigen::Matrix4cd& gate) {
    if (n_nodes < 3 || n_nodes > 6)
        throw std::invalid_argument("swap_oracle: n_nodes must lie in [3,6]");
    if (static_cast<int>(outcomes.size()) != n_nodes - 2)
        throw std::invalid_argument("swap_oracle: need exactly one outcome pair per"
                                    " intermediate node");
    for (const auto& [i_l, i_r] : outcomes) {
        if ((i_l != 0 && i_l != 1) || (i_r != 0 && i_r != 1))
            throw std::invalid_argument("swap_oracle: outcomes must be 0 or 1");
    }

    // Qubits in chain order: R_1, L_2, R_2, L_3, ..., L_N; link j (1-based)
    // is the pair (2j-2, 2j-1); intermediate node k holds (2k-3, 2k-2).
    const int n_qubits = 2 * (n_nodes - 1);
    const Eigen::Index dim = Eigen::Index(1) << n_qubits;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    const double amp = std::pow(2.0, -0.5 * (n_nodes - 1));
    for (Eigen::Index bits = 0; bits < (Eigen::Index(1) << (n_nodes - 1)); ++bits) {
        Eigen::Index idx = 0;
        for (int j = 0; j < n_nodes - 1; ++j) {
            if ((bits >> j) & 1) idx |= (Eigen::Index(3) << (2 * j));
        }
        psi(idx) = amp;
    }

    for (int m = 0; m < n_nodes - 2; ++m) apply_two_qubit(psi, gate, 2 * m + 1, 2 * m + 2);

    // Project each intermediate node's pair onto its outcome; Born
    // probabilities must come out uniform (1/4 per node, conditioned on the
    // previous projections).
    PauliWord word;
    for (int m = 0; m < n_nodes - 2; ++m) {
        const auto [i_l, i_r] = outcomes[m];
        const Eigen::Index bit_l = Eigen::Index(1) << (2 * m + 1);
        const Eigen::Index bit_r = Eigen::Index(1) << (2 * m + 2);
        double prob = 0.0;
        for (Eigen::Index idx = 0; idx < dim; ++idx) {
            const bool match = (((idx & bit_l) != 0) == (i_l == 1)) &&
                               (((idx & bit_r) != 0) == (i_r == 1));
            if (match) {
                prob += std::norm(psi(idx));
            } else {
                psi(idx) = 0.0;
            }
        }
        if (std::abs(prob - 0.25) > kOracleTolerance)
            throw std::logic_error("swap_oracle: node outcome probability is not 1/4");
        psi /= std::sqrt(prob);
        word = word * correction_for(i_l, i_r);
    }

    // Terminal pair (R_1 = qubit 0, L_N = last qubit): read the four
    // amplitudes at the measured bit pattern.
    Eigen::Index measured = 0;
    for (int m = 0; m < n_nodes - 2; ++m) {
        if (outcomes[m].first) measured |= Eigen::Index(1) << (2 * m + 1);
        if (outcomes[m].second) measured |= Eigen::Index(1) << (2 * m + 2);
    }
    const Eigen::Index bit_first = 1;
    const Eigen::Index bit_last = Eigen::Index(1) << (n_qubits - 1);
    Eigen::Vector4cd v;
    for (int b0 = 0; b0 < 2; ++b0)
        for (int b1 = 0; b1 < 2; ++b1)
            v(2 * b0 + b1) = psi(measured | (b0 ? bit_first : 0) | (b1 ? bit_last : 0));

    // Identify the Bell label (global-phase invariant) and check that the
    // accumulated correction restores phi_plus.
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Vector4cd phi_plus, phi_minus, psi_plus, psi_minus;
    phi_plus << r, 0, 0, r;
    phi_minus << r, 0, 0, -r;
    psi_plus << 0, r, r, 0;
    psi_minus << 0, r, -r, 0;
    const std::pair<BellLabel, Eigen::Vector4cd> bells[] = {
        {BellLabel::phi_plus, phi_plus},
        {BellLabel::phi_minus, phi_minus},
        {BellLabel::psi_plus, psi_plus},
        {BellLabel::psi_minus, psi_minus},
    };
    BellLabel label = BellLabel::phi_plus;
    bool found = false;
    for (const auto& [candidate, bell] : bells) {
        if (std::norm(bell.dot(v)) >= 1.0 - kOracleTolerance) {
            label = candidate;
            found = true;
            break;
        }
    }
    if (!found) throw std::logic_error("swap_oracle: terminal pair is not a Bell state");

    const Eigen::Matrix4cd correction =
        kron2(Eigen::Matrix2cd::Identity(), pauli_matrix(word));
    const Eigen::Vector4cd corrected = correction * v;
    if (std::norm(phi_plus.dot(corrected)) < 1.0 - kOracleTolerance)
        throw std::logic_error("swap_oracle: correction word does not restore phi_plus");

    return {label, word};
}

std::pair<int, int> phase_link_counts(int n_nodes) {
    if (n_nodes < 2) throw std::invalid_argument("phase_link_counts: n_nodes must be >= 2");
    if (n_nodes == 2) return {1, 0};
    if (n_nodes % 2 == 0) return {n_nodes / 2, n_nodes / 2};
    return {(n_nodes - 1) / 2, (n_nodes - 1) / 2};
}

std::pair<long, long> run_generation_phases(const ChainParams& params, GenMode mode, Rng& rng) {
    params.validate();
    const auto [links1, links2] = phase_link_counts(params.n_nodes);
    const double p_fast = mode == GenMode::fast ? p0(params.noise).p0 : 0.0;
    if (mode == GenMode::fast && p_fast == 0.0)
        throw std::domain_error("run_generation_phases: link probability is zero");
    if (mode == GenMode::faithful && coded_success_probability(params.noise) == 0.0)
        throw std::domain_error("run_generation_phases: link probability is zero");

    auto run_phase = [&](int links) -> long {
        if (links == 0) return 0;
        std::vector<char> done(links, 0);
        int remaining = links;
        long rounds = 0;
        while (remaining > 0) {
            ++rounds;
            for (int l = 0; l < links; ++l) {
                if (done[l]) continue;
                const bool ok = mode == GenMode::fast
                                    ? bernoulli(rng, p_fast)
                                    : attempt_link(params.noise, rng).success;
                if (ok) {
                    done[l] = 1;
                    --remaining;
                }
            }
        }
        return rounds;
    };
    const long r1 = run_phase(links1);
    const long r2 = run_phase(links2);
    return {r1, r2};
}

std::pair<bool, std::vector<SwapOutcome>> run_swapping(const ChainParams& params, Rng& rng) {
    params.validate();
    const double p_swap = swap_success_probability(params.noise);
    bool ok = true;
    std::vector<SwapOutcome> outcomes;
    outcomes.reserve(std::max(0, params.n_nodes - 2));
    for (int node = 0; node < params.n_nodes - 2; ++node) {
        const bool node_ok = bernoulli(rng, p_swap);
        const int i_l = bernoulli(rng, 0.5) ? 1 : 0;
        const int i_r = bernoulli(rng, 0.5) ? 1 : 0;
        ok = ok && node_ok;
        outcomes.push_back({i_l, i_r, correction_for(i_l, i_r)});
    }
    return {ok, std::move(outcomes)};
}

TrialRecord run_one_trial(const ChainParams& params, GenMode mode, Rng& rng) {
    params.validate();
    if (params.n_nodes > 2 && swap_success_probability(params.noise) == 0.0)
        throw std::domain_error("run_one_trial: swap probability is zero, the chain can"
                                " never terminate");
    const double round_time_s = params.l0_km() * 1000.0 / params.c_m_s();
    TrialRecord rec;
    while (true) {
        ++rec.protocol_repeats;
        const auto [r1, r2] = run_generation_phases(params, mode, rng);
        rec.total_time_s += static_cast<double>(r1 + r2) * round_time_s;
        const auto [ok, outcomes] = run_swapping(params, rng);
        if (!ok) continue;
        rec.rounds_phase1 = r1;
        rec.rounds_phase2 = r2;
        rec.swap_ok = true;
        PauliWord word;
        for (const SwapOutcome& outcome : outcomes) word = word * outcome.correction;
        rec.end_state = bell_label_under(word);
        return rec;
    }
}

ChainStats run_end_to_end(const ChainParams& params, long trials, GenMode mode,
                          std::uint64_t seed, int threads, std::vector<TrialRecord>* records) {
    params.validate();
    if (trials < 0) throw std::invalid_argument("run_end_to_end: trials must be >= 0");
    ChainStats stats;
    stats.trials = trials;
    if (trials == 0) return stats;
    if (records) records->assign(static_cast<std::size_t>(trials), TrialRecord{});

    struct Accum {
        double rounds = 0, rounds2 = 0, time = 0, time2 = 0, repeats = 0;
    };
    // Accumulate per fixed-size block of trial indices and reduce the blocks
    // in index order: the floating-point summation order is then the same for
    // every thread count, so the returned stats are bitwise thread-invariant.
    constexpr long kBlock = 4096;
    const long n_blocks = (trials + kBlock - 1) / kBlock;
    const int n_threads = static_cast<int>(std::min<long>(std::max(threads, 1), n_blocks));
    std::vector<Accum> partial(static_cast<std::size_t>(n_blocks));
    std::atomic<long> next_block{0};
    auto work = [&] {
        for (;;) {
            const long b = next_block.fetch_add(1, std::memory_order_relaxed);
            if (b >= n_blocks) return;
            Accum& acc = partial[static_cast<std::size_t>(b)];
            const long lo = b * kBlock;
            const long hi = std::min(trials, lo + kBlock);
            for (long j = lo; j < hi; ++j) {
                Rng rng = make_trial_rng(seed, static_cast<std::uint64_t>(j));
                const TrialRecord rec = run_one_trial(params, mode, rng);
                const double rounds =
                    static_cast<double>(rec.rounds_phase1 + rec.rounds_phase2);
                acc.rounds += rounds;
                acc.rounds2 += rounds * rounds;
                acc.time += rec.total_time_s;
                acc.time2 += rec.total_time_s * rec.total_time_s;
                acc.repeats += rec.protocol_repeats;
                if (records) (*records)[static_cast<std::size_t>(j)] = rec;
            }
        }
    };

    if (n_threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
        for (std::thread& th : pool) th.join();
    }

    Accum total;
    for (const Accum& acc : partial) {
        total.rounds += acc.rounds;
        total.rounds2 += acc.rounds2;
        total.time += acc.time;
        total.time2 += acc.time2;
        total.repeats += acc.repeats;
    }
    const double n = static_cast<double>(trials);
    stats.mean_rounds = total.rounds / n;
    stats.var_rounds = std::max(0.0, total.rounds2 / n - stats.mean_rounds * stats.mean_rounds);
    stats.mean_time_s = total.time / n;
    stats.var_time_s = std::max(0.0, total.time2 / n - stats.mean_time_s * stats.mean_time_s);
    stats.mean_repeats = total.repeats / n;
    return stats;
}

ChainStats run_end_to_end(const ChainParams& params, long trials, Rng& rng, GenMode mode) {
    const std::uint64_t seed = rng();
    return run_end_to_end(params, trials, mode, seed, 1, nullptr);
}

}  // namespace rydrep
