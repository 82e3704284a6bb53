#pragma once

#include <compare>
#include <complex>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rydrep/rng.hpp"

namespace rydrep {

// Collective levels of one ensemble.  `reservoir` is the macroscopically
// occupied ground state |s...s>; the six metastable levels host the L/R/A
// subnode qubits as single collective excitations; the three Rydberg levels
// are blockaded (at most one excitation per ensemble, enforced structurally).
enum class Level {
    reservoir,
    zero_l, one_l,
    zero_r, one_r,
    zero_a, one_a,
    ryd_minus, ryd_plus, ryd_aux,
};

enum class Ryd : unsigned char { none, minus, plus, aux };

enum class CavityMode : unsigned char { none, plus, minus };

enum class Side : unsigned char { k, k1 };

bool is_rydberg(Level level);
bool is_metastable(Level level);
Ryd ryd_tag_of(Level level);           // requires is_rydberg(level)
std::string level_name(Level level);

// Occupation pattern of one ensemble: six metastable occupation numbers plus
// a single Rydberg tag.  The single-tag representation IS the blockade: no
// value of this type can hold two Rydberg excitations.
struct EnsembleConfig {
    bool occ_0l = false;
    bool occ_1l = false;
    bool occ_0r = false;
    bool occ_1r = false;
    bool occ_0a = false;
    bool occ_1a = false;
    Ryd ryd = Ryd::none;

    auto operator<=>(const EnsembleConfig&) const = default;

    bool occupied(Level level) const;     // metastable levels only
    void set_occupied(Level level, bool value);
    int excitation_count() const;         // metastable occupations + Rydberg
};

// Photon numbers of one cavity's two modes.  Both capped at one photon; the
// protocol never populates both modes in a single branch (checked as a
// reachability invariant, not a type constraint).
struct CavityConfig {
    int n_plus = 0;
    int n_minus = 0;

    auto operator<=>(const CavityConfig&) const = default;

    int photons() const { return n_plus + n_minus; }
};

// One basis ket of the joint link system (ensemble k, its cavity, ensemble
// k+1, its cavity).
struct BasisLabel {
    EnsembleConfig ensemble_k;
    CavityConfig cavity_k;
    EnsembleConfig ensemble_k1;
    CavityConfig cavity_k1;

    auto operator<=>(const BasisLabel&) const = default;

    const EnsembleConfig& ensemble(Side side) const;
    EnsembleConfig& ensemble(Side side);
    const CavityConfig& cavity(Side side) const;
    CavityConfig& cavity(Side side);
    int excitation_count() const;  // metastable + Rydberg + photons
};

enum class LossCause : unsigned char { fiber, decay };

// Trajectory status: `live` states evolve normally; a `lost` state records
// which side lost its excitation and why (the herald that diagnosis will
// later read out); `reset` marks a state handed back to a pool after its
// round was abandoned (the engine itself never produces it).
struct Status {
    enum class Kind : unsigned char { live, lost, reset };
    Kind kind = Kind::live;
    Side side = Side::k;        // meaningful only when kind == lost
    LossCause cause = LossCause::fiber;

    bool is_live() const { return kind == Kind::live; }
    static Status live() { return {}; }
    static Status lost(Side side, LossCause cause) {
        return {Kind::lost, side, cause};
    }
};

// Complex-amplitude state over the blockaded joint basis.  Map storage keeps
// iteration deterministic (ordered by label), which the RNG-consuming
// channels and the debug dump rely on.
struct LinkState {
    std::map<BasisLabel, std::complex<double>> amplitudes;
    Status status;
};

// One collective pi/2pi pulse.  `collective` marks sqrt(N_a)-enhanced
// transitions in or out of the reservoir; it is descriptive metadata (the
// effective Rabi frequency is already folded into the pulse angle).
struct PulseSpec {
    Side ensemble = Side::k;
    Level from_level = Level::reservoir;
    Level to_level = Level::ryd_minus;
    double angle = 3.14159265358979323846;
    CavityMode uses_cavity_mode = CavityMode::none;
    bool collective = false;
};

// --- construction ---------------------------------------------------------

// Fresh link: both ensembles all-reservoir, both cavities vacuum, live.
LinkState new_link_state();

// --- unitary pulses -------------------------------------------------------

// Apply one pulse: a two-level rotation R(theta) on every coupled pair of
// basis labels.  Phase gauge: theta = pi maps |a> -> |b>, |b> -> -|a> (the
// -i of the rotating-frame pulse is absorbed into a fixed level phase so the
// protocol's checkpoint states come out with real positive amplitudes).
// Pulses that would create a second Rydberg excitation in an ensemble act as
// the identity (blockade); so do pulses whose source is empty in a branch.
// Throws std::invalid_argument for malformed pulses (cavity mode attached to
// a transition that does not touch the reservoir, or equal level pair).
LinkState apply_pulse(const LinkState& state, const PulseSpec& pulse);

// Apply a set of simultaneous equal-Rabi pulses.  Supported sets: a single
// pulse, or two pulses sharing the reservoir as source with two distinct
// Rydberg targets (the superposition-splitting pulse): the pair acts as one
// rotation between the reservoir and the bright combination of the targets.
LinkState apply_pulses(const LinkState& state, std::span<const PulseSpec> pulses);

// --- stochastic channels --------------------------------------------------

// Move the photon from cavity k to cavity k+1 through the fiber.  With
// probability eta_t (over the photon-carrying population) the transfer is a
// perfect mode swap; otherwise one photon mode is lost: the state collapses
// onto the branches carrying that mode, the photon is annihilated, and
// status becomes lost(k+1, fiber).  Throws std::logic_error when the state
// is not live, std::invalid_argument for eta_t outside [0,1].
LinkState transfer_photon(const LinkState& state, double eta_t, Rng& rng);

// Spontaneous-decay jump channel, applied once after each pulse with
// p_decay = pi*Gamma/Omega.  Jump probability is p_decay times the state's
// total Rydberg population.  On a jump, one Rydberg component (ensemble,
// tag) is sampled proportionally to its population, the state collapses
// onto the branches where that component is occupied, and the decayed
// ensemble's side is cleared (ensemble to all-reservoir, its cavity to
// vacuum): the excitation is lost to the environment and that side can no
// longer complete the round, which is exactly the configuration the
// diagnosis sequence detects.  Status becomes lost(side, decay).  On
// no-jump the state is unchanged (no-jump back-action is second order in
// p_decay and neglected).  Throws std::invalid_argument for p_decay
// outside [0,1].
LinkState apply_decay_channel(const LinkState& state, double p_decay, Rng& rng);

// Born-rule readout of one metastable level: project onto occupied or
// unoccupied with the level's population as the probability; if occupied,
// the atom is ejected (level emptied in the surviving branches) and an ion
// is registered with probability eta_ion.  False negatives only - an
// unoccupied level never produces a detection.
std::pair<LinkState, bool> ionize_and_detect(const LinkState& state, Level level,
                                             Side ensemble, double eta_ion, Rng& rng);

// --- observables ----------------------------------------------------------

double norm_squared(const LinkState& state);
double photon_population(const LinkState& state);              // both cavities
double rydberg_population(const LinkState& state);              // both ensembles
double rydberg_population(const LinkState& state, Side side, Ryd tag);
double level_population(const LinkState& state, Side side, Level level);

// |<reference|state>|^2; global-phase invariant by construction.
double overlap(const LinkState& state, const LinkState& reference);

// One line per basis label, sorted: "<label> <re> <im>" with 17 significant
// digits.  Stable format for golden-file comparisons.
std::string label_string(const BasisLabel& label);
std::vector<std::string> debug_dump(const LinkState& state);

// Throws std::logic_error if the state violates a structural invariant:
// norm != 1 (live states), both cavity modes populated in one branch, or
// photon numbers outside {0,1}.  Called internally after every channel; also
// available to tests.
void check_invariants(const LinkState& state);

}  // namespace rydrep
