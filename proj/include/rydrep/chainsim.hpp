#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rydrep/params.hpp"
#include "rydrep/rng.hpp"

namespace rydrep {

enum class BellLabel : unsigned char { phi_plus, phi_minus, psi_plus, psi_minus };

std::string bell_label_name(BellLabel label);

// Pauli word modulo phase, in {I, X, Z, ZX}; the chain's Pauli-frame
// currency.  Composition is bitwise (phases never matter for Bell labels).
struct PauliWord {
    bool x = false;
    bool z = false;

    friend PauliWord operator*(PauliWord a, PauliWord b) {
        return {a.x != b.x, a.z != b.z};
    }
    bool operator==(const PauliWord&) const = default;
};

std::string pauli_word_name(PauliWord w);

// Bell label obtained by applying the word to one qubit of |phi+>.
BellLabel bell_label_under(PauliWord w);

// Measurement record of one intermediate node's swap.
struct SwapOutcome {
    int i_l = 0;
    int i_r = 0;
    PauliWord correction;
};

// Correction required by outcome (i_l, i_r):
// (0,0) -> I, (0,1) -> X, (1,0) -> Z, (1,1) -> ZX.
PauliWord correction_for(int i_l, int i_r);

// One end-to-end chain trial (generation phases + swapping, repeated until
// the swap round succeeds).  rounds_phase1/2 are the successful repetition's
// counts; total_time_s accumulates (rounds * L0/c) over every repetition.
// end_state is the Pauli frame of the terminal pair before the accumulated
// correction is applied (the correction maps it to phi_plus).
struct TrialRecord {
    long rounds_phase1 = 0;
    long rounds_phase2 = 0;
    bool swap_ok = false;
    int protocol_repeats = 0;
    double total_time_s = 0;
    BellLabel end_state = BellLabel::phi_plus;
};

enum class GenMode : unsigned char { fast, faithful };

// --- swap circuit ---------------------------------------------------------

// The local two-qubit gate of the swap: (U (x) U) * P * (I (x) V) with
// U = exp(-i pi/2 sz) exp(-i pi/4 sy), V = exp(-i pi/2 sx) exp(-i pi/2 sz)
// exp(-i pi/4 sy), P = diag(-1,-1,1,-1); basis order |00>,|01>,|10>,|11>,
// first tensor slot = L qubit, second = R qubit.
Eigen::Matrix4cd swap_gate_matrix();

// Brute-force state-vector oracle for small chains: build the N-1 Bell
// pairs over qubits (R_1, L_2, R_2, ..., L_N), apply the swap gate at every
// intermediate node, project onto the given (i_L, i_R) outcomes, and return
// the terminal pair's Bell label together with the accumulated correction
// word.  Asserts that outcome probabilities are uniform and that applying
// the word yields phi_plus.  Throws std::invalid_argument for n_nodes
// outside [3,6] or outcome count != n_nodes-2.  Deterministic (rng-free).
std::pair<BellLabel, PauliWord> swap_oracle(int n_nodes,
                                            const std::vector<std::pair<int, int>>& outcomes);

// Same oracle with a caller-supplied gate; lets verification prove it
// actually distinguishes correct from corrupted swap algebra.
std::pair<BellLabel, PauliWord> swap_oracle_with_gate(
    int n_nodes, const std::vector<std::pair<int, int>>& outcomes,
    const Eigen::Matrix4cd& gate);

// --- chain simulation -----------------------------------------------------

// Number of links retried in each generation phase.  Even N runs K = N/2
// links in both phases (the convention under which the closed-form round
// count is exact; physically the second phase has one link fewer).  Odd N
// splits (N-1)/2 and (N-1)/2.  N=2 has a single phase-1 link.
std::pair<int, int> phase_link_counts(int n_nodes);

// Synchronized repeat-until-success generation: each round, every unfinished
// link of the phase attempts once (fast mode: one Bernoulli(p0) draw with p0
// from the closed-form budget; faithful mode: a full state-vector round);
// a phase ends when all its links have succeeded.  Returns the two round
// counts.
std::pair<long, long> run_generation_phases(const ChainParams& params, GenMode mode, Rng& rng);

// Swap at every intermediate node: each succeeds independently with
// probability (1 - 4*pi*Gamma/Omega) * eta_ion^4; measurement bits are
// uniform (verified against the oracle's Born probabilities).  Any node
// failing means the whole attempt failed.
std::pair<bool, std::vector<SwapOutcome>> run_swapping(const ChainParams& params, Rng& rng);

// One end-to-end trial: repeat {generation phases, swapping} until the swap
// succeeds.
TrialRecord run_one_trial(const ChainParams& params, GenMode mode, Rng& rng);

struct ChainStats {
    long trials = 0;
    double mean_rounds = 0;      // rounds_phase1 + rounds_phase2, successful repetition
    double var_rounds = 0;
    double mean_time_s = 0;
    double var_time_s = 0;
    double mean_repeats = 0;
};

// Deterministic multi-trial driver: trial j uses the derived stream
// (seed, j) regardless of how trials are spread over threads; records (when
// requested) are stored in trial order, and the stats are accumulated in a
// fixed blockwise order, so both are bitwise independent of the thread count.
ChainStats run_end_to_end(const ChainParams& params, long trials, GenMode mode,
                          std::uint64_t seed, int threads,
                          std::vector<TrialRecord>* records = nullptr);

// Single-stream convenience overload: derives the master seed from rng and
// runs sequentially.
ChainStats run_end_to_end(const ChainParams& params, long trials, Rng& rng,
                          GenMode mode = GenMode::fast);

}  // namespace rydrep
