#include "rydrep/statevec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace rydrep {

namespace {

constexpr double kAmplitudeFloor = 1e-14;  // drop numerically dead labels
constexpr double kNormTolerance = 1e-12;

std::complex<double> amp_or_zero(const LinkState& state, const BasisLabel& label) {
    auto it = state.amplitudes.find(label);
    return it == state.amplitudes.end() ? std::complex<double>(0.0) : it->second;
}

void prune_and_store(std::map<BasisLabel, std::complex<double>>& out, const BasisLabel& label,
                     std::complex<double> amp) {
    if (std::abs(amp) > kAmplitudeFloor) {
        out[label] = amp;
    } else {
        out.erase(label);
    }
}

LinkState renormalized(LinkState state) {
    double n2 = 0.0;
    for (const auto& [label, amp] : state.amplitudes) n2 += std::norm(amp);
    if (n2 <= 0.0) throw std::logic_error("renormalized: state has no surviving amplitude");
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& [label, amp] : state.amplitudes) amp *= inv;
    return state;
}

}  // namespace

bool is_rydberg(Level level) {
    return level == Level::ryd_minus || level == Level::ryd_plus || level == Level::ryd_aux;
}

bool is_metastable(Level level) {
    return !is_rydberg(level) && level != Level::reservoir;
}

Ryd ryd_tag_of(Level level) {
    switch (level) {
        case Level::ryd_minus: return Ryd::minus;
        case Level::ryd_plus: return Ryd::plus;
        case Level::ryd_aux: return Ryd::aux;
        default: throw std::invalid_argument("ryd_tag_of: not a Rydberg level");
    }
}

std::string level_name(Level level) {
    switch (level) {
        case Level::reservoir: return "s";
        case Level::zero_l: return "0L";
        case Level::one_l: return "1L";
        case Level::zero_r: return "0R";
        case Level::one_r: return "1R";
        case Level::zero_a: return "0A";
        case Level::one_a: return "1A";
        case Level::ryd_minus: return "r-";
        case Level::ryd_plus: return "r+";
        case Level::ryd_aux: return "rA";
    }
    return "?";
}

bool EnsembleConfig::occupied(Level level) const {
    switch (level) {
        case Level::zero_l: return occ_0l;
        case Level::one_l: return occ_1l;
        case Level::zero_r: return occ_0r;
        case Level::one_r: return occ_1r;
        case Level::zero_a: return occ_0a;
        case Level::one_a: return occ_1a;
        default: throw std::invalid_argument("EnsembleConfig::occupied: not a metastable level");
    }
}

void EnsembleConfig::set_occupied(Level level, bool value) {
    switch (level) {
        case Level::zero_l: occ_0l = value; return;
        case Level::one_l: occ_1l = value; return;
        case Level::zero_r: occ_0r = value; return;
        case Level::one_r: occ_1r = value; return;
        case Level::zero_a: occ_0a = value; return;
        case Level::one_a: occ_1a = value; return;
        default: throw std::invalid_argument("EnsembleConfig::set_occupied: not a metastable level");
    }
}

int EnsembleConfig::excitation_count() const {
    return int(occ_0l) + int(occ_1l) + int(occ_0r) + int(occ_1r) + int(occ_0a) + int(occ_1a) +
           int(ryd != Ryd::none);
}

const EnsembleConfig& BasisLabel::ensemble(Side side) const {
    return side == Side::k ? ensemble_k : ensemble_k1;
}
EnsembleConfig& BasisLabel::ensemble(Side side) {
    return side == Side::k ? ensemble_k : ensemble_k1;
}
const CavityConfig& BasisLabel::cavity(Side side) const {
    return side == Side::k ? cavity_k : cavity_k1;
}
CavityConfig& BasisLabel::cavity(Side side) {
    return side == Side::k ? cavity_k : cavity_k1;
}

int BasisLabel::excitation_count() const {
    return ensemble_k.excitation_count() + ensemble_k1.excitation_count() + cavity_k.photons() +
           cavity_k1.photons();
}

LinkState new_link_state() {
    LinkState state;
    state.amplitudes[BasisLabel{}] = 1.0;
    return state;
}

namespace {

int cavity_photons(const CavityConfig& cavity, CavityMode mode) {
    return mode == CavityMode::plus ? cavity.n_plus : cavity.n_minus;
}

void add_cavity_photon(CavityConfig& cavity, CavityMode mode, int delta) {
    (mode == CavityMode::plus ? cavity.n_plus : cavity.n_minus) += delta;
}

// The "a" side of a coupled pair is the pulse's source configuration; the
// rotation maps a -> cos a + sin b, b -> -sin a + cos b (gauge: pi sends
// a -> b, b -> -a).  Returns the partner label of `label` under `pulse` and
// +1 when `label` is the a side, -1 when it is the b side, 0 when the pulse
// does not couple this label (empty source, or blockaded).
std::pair<BasisLabel, int> pulse_partner(const BasisLabel& label, const PulseSpec& pulse) {
    const Level from = pulse.from_level;
    const Level to = pulse.to_level;
    const CavityMode mode = pulse.uses_cavity_mode;
    const EnsembleConfig& ens = label.ensemble(pulse.ensemble);
    const CavityConfig& cav = label.cavity(pulse.ensemble);

    auto with_changes = [&](auto&& mutate) {
        BasisLabel partner = label;
        mutate(partner.ensemble(pulse.ensemble), partner.cavity(pulse.ensemble));
        return partner;
    };

    if (from == Level::reservoir) {
        // Raise reservoir -> Rydberg; with a cavity mode the transition
        // absorbs one photon from that mode.
        const Ryd target = ryd_tag_of(to);
        if (ens.ryd == Ryd::none && (mode == CavityMode::none || cavity_photons(cav, mode) == 1)) {
            return {with_changes([&](EnsembleConfig& e, CavityConfig& c) {
                        e.ryd = target;
                        if (mode != CavityMode::none) add_cavity_photon(c, mode, -1);
                    }),
                    +1};
        }
        if (ens.ryd == target && (mode == CavityMode::none || cavity_photons(cav, mode) == 0)) {
            return {with_changes([&](EnsembleConfig& e, CavityConfig& c) {
                        e.ryd = Ryd::none;
                        if (mode != CavityMode::none) add_cavity_photon(c, mode, +1);
                    }),
                    -1};
        }
        return {label, 0};
    }

    if (to == Level::reservoir) {
        // Lower Rydberg -> reservoir; with a cavity mode the transition
        // emits one photon into that mode (empty-mode requirement is the
        // photon-number cap).
        const Ryd source = ryd_tag_of(from);
        if (ens.ryd == source && (mode == CavityMode::none || cavity_photons(cav, mode) == 0)) {
            return {with_changes([&](EnsembleConfig& e, CavityConfig& c) {
                        e.ryd = Ryd::none;
                        if (mode != CavityMode::none) add_cavity_photon(c, mode, +1);
                    }),
                    +1};
        }
        if (ens.ryd == Ryd::none && (mode == CavityMode::none || cavity_photons(cav, mode) == 1)) {
            return {with_changes([&](EnsembleConfig& e, CavityConfig& c) {
                        e.ryd = source;
                        if (mode != CavityMode::none) add_cavity_photon(c, mode, -1);
                    }),
                    -1};
        }
        return {label, 0};
    }

    if (is_rydberg(from) && is_metastable(to)) {
        const Ryd source = ryd_tag_of(from);
        if (ens.ryd == source && !ens.occupied(to)) {
            return {with_changes([&](EnsembleConfig& e, CavityConfig&) {
                        e.ryd = Ryd::none;
                        e.set_occupied(to, true);
                    }),
                    +1};
        }
        // Reverse direction needs the Rydberg slot free: an existing
        // excitation of any other tag blocks it (blockade).
        if (ens.occupied(to) && ens.ryd == Ryd::none) {
            return {with_changes([&](EnsembleConfig& e, CavityConfig&) {
                        e.ryd = source;
                        e.set_occupied(to, false);
                    }),
                    -1};
        }
        return {label, 0};
    }

    if (is_metastable(from) && is_rydberg(to)) {
        const Ryd target = ryd_tag_of(to);
        if (ens.occupied(from) && ens.ryd == Ryd::none) {
            return {with_changes([&](EnsembleConfig& e, CavityConfig&) {
                        e.set_occupied(from, false);
                        e.ryd = target;
                    }),
                    +1};
        }
        if (ens.ryd == target && !ens.occupied(from)) {
            return {with_changes([&](EnsembleConfig& e, CavityConfig&) {
                        e.ryd = Ryd::none;
                        e.set_occupied(from, true);
                    }),
                    -1};
        }
        return {label, 0};
    }

    if (is_metastable(from) && is_metastable(to)) {
        if (ens.occupied(from) && !ens.occupied(to)) {
            return {with_changes([&](EnsembleConfig& e, CavityConfig&) {
                        e.set_occupied(from, false);
                        e.set_occupied(to, true);
                    }),
                    +1};
        }
        if (ens.occupied(to) && !ens.occupied(from)) {
            return {with_changes([&](EnsembleConfig& e, CavityConfig&) {
                        e.set_occupied(to, false);
                        e.set_occupied(from, true);
                    }),
                    -1};
        }
        return {label, 0};
    }

    throw std::invalid_argument("apply_pulse: unsupported level pair " + level_name(from) +
                                " -> " + level_name(to));
}

void validate_pulse(const PulseSpec& pulse) {
    if (pulse.from_level == pulse.to_level)
        throw std::invalid_argument("apply_pulse: from_level == to_level");
    if (pulse.uses_cavity_mode != CavityMode::none && pulse.from_level != Level::reservoir &&
        pulse.to_level != Level::reservoir) {
        throw std::invalid_argument(
            "apply_pulse: cavity mode attached to a transition that does not touch the"
            " reservoir");
    }
    if (is_rydberg(pulse.from_level) && is_rydberg(pulse.to_level))
        throw std::invalid_argument("apply_pulse: Rydberg-Rydberg transitions are not driven");
    if (pulse.from_level == Level::reservoir && !is_rydberg(pulse.to_level))
        throw std::invalid_argument("apply_pulse: reservoir couples only to Rydberg levels");
    if (pulse.to_level == Level::reservoir && !is_rydberg(pulse.from_level))
        throw std::invalid_argument("apply_pulse: reservoir couples only to Rydberg levels");
}

// Excitation bookkeeping, asserted at pair-construction time: a pulse that
// creates an excitation from the reservoir (no cavity photon consumed) pairs
// labels whose counts differ by one; every other pulse pairs equal counts.
void check_pair_bookkeeping(const BasisLabel& a, const BasisLabel& b, const PulseSpec& pulse) {
    const int delta = b.excitation_count() - a.excitation_count();
    const bool creates = pulse.from_level == Level::reservoir &&
                         pulse.uses_cavity_mode == CavityMode::none;
    const bool destroys = pulse.to_level == Level::reservoir &&
                          pulse.uses_cavity_mode == CavityMode::none;
    const int expected = creates ? +1 : destroys ? -1 : 0;
    if (delta != expected)
        throw std::logic_error("pulse pair violates excitation bookkeeping");
}

}  // namespace

LinkState apply_pulse(const LinkState& state, const PulseSpec& pulse) {
    validate_pulse(pulse);
    const double c = std::cos(pulse.angle / 2.0);
    const double s = std::sin(pulse.angle / 2.0);

    LinkState out = state;
    out.amplitudes.clear();
    std::map<BasisLabel, bool> done;
    for (const auto& [label, amp] : state.amplitudes) {
        if (done.count(label)) continue;
        auto [partner, side] = pulse_partner(label, pulse);
        if (side == 0) {
            prune_and_store(out.amplitudes, label, amp_or_zero(out, label) + amp);
            done[label] = true;
            continue;
        }
        const BasisLabel a = side > 0 ? label : partner;
        const BasisLabel b = side > 0 ? partner : label;
        check_pair_bookkeeping(a, b, pulse);
        const std::complex<double> amp_a = amp_or_zero(state, a);
        const std::complex<double> amp_b = amp_or_zero(state, b);
        prune_and_store(out.amplitudes, a, c * amp_a - s * amp_b);
        prune_and_store(out.amplitudes, b, s * amp_a + c * amp_b);
        done[a] = true;
        done[b] = true;
    }
    check_invariants(out);
    return out;
}

LinkState apply_pulses(const LinkState& state, std::span<const PulseSpec> pulses) {
    if (pulses.size() == 1) return apply_pulse(state, pulses[0]);
    if (pulses.size() != 2)
        throw std::invalid_argument("apply_pulses: supported sets are 1 or 2 pulses");

    const PulseSpec& pa = pulses[0];
    const PulseSpec& pb = pulses[1];
    if (pa.from_level != Level::reservoir || pb.from_level != Level::reservoir ||
        !is_rydberg(pa.to_level) || !is_rydberg(pb.to_level) ||
        pa.to_level == pb.to_level || pa.ensemble != pb.ensemble ||
        pa.uses_cavity_mode != CavityMode::none || pb.uses_cavity_mode != CavityMode::none ||
        pa.angle != pb.angle) {
        throw std::invalid_argument(
            "apply_pulses: simultaneous pair must drive the reservoir to two distinct"
            " Rydberg levels at equal angle with no cavity mode");
    }
    validate_pulse(pa);
    validate_pulse(pb);

    // Equal-Rabi pair: rotation between the reservoir and the bright state
    // (|ta> + |tb>)/sqrt(2); the dark combination is untouched.  Labels with
    // a foreign Rydberg tag are blockaded (identity).
    const Ryd ta = ryd_tag_of(pa.to_level);
    const Ryd tb = ryd_tag_of(pb.to_level);
    const double c = std::cos(pa.angle / 2.0);
    const double s = std::sin(pa.angle / 2.0);
    const double r = 1.0 / std::sqrt(2.0);
    const Side side = pa.ensemble;

    LinkState out = state;
    out.amplitudes.clear();
    std::map<BasisLabel, bool> done;
    for (const auto& [label, amp] : state.amplitudes) {
        if (done.count(label)) continue;
        const Ryd tag = label.ensemble(side).ryd;
        if (tag != Ryd::none && tag != ta && tag != tb) {
            prune_and_store(out.amplitudes, label, amp_or_zero(out, label) + amp);
            done[label] = true;
            continue;
        }
        BasisLabel ls = label, la = label, lb = label;
        ls.ensemble(side).ryd = Ryd::none;
        la.ensemble(side).ryd = ta;
        lb.ensemble(side).ryd = tb;
        const std::complex<double> amp_s = amp_or_zero(state, ls);
        const std::complex<double> amp_a = amp_or_zero(state, la);
        const std::complex<double> amp_b = amp_or_zero(state, lb);
        const std::complex<double> bright = r * (amp_a + amp_b);
        const std::complex<double> dark = r * (amp_a - amp_b);
        const std::complex<double> new_s = c * amp_s - s * bright;
        const std::complex<double> new_bright = s * amp_s + c * bright;
        prune_and_store(out.amplitudes, ls, new_s);
        prune_and_store(out.amplitudes, la, r * (new_bright + dark));
        prune_and_store(out.amplitudes, lb, r * (new_bright - dark));
        done[ls] = true;
        done[la] = true;
        done[lb] = true;
    }
    check_invariants(out);
    return out;
}

LinkState transfer_photon(const LinkState& state, double eta_t, Rng& rng) {
    if (!state.status.is_live())
        throw std::logic_error("transfer_photon: state is not live");
    if (!(eta_t >= 0.0 && eta_t <= 1.0))
        throw std::invalid_argument("transfer_photon: eta_t must lie in [0,1]");

    // Only cavity k's photons enter the fiber; each branch carries at most
    // one, so the loss probability over the carrying population is uniform.
    double p_plus = 0.0, p_minus = 0.0;
    for (const auto& [label, amp] : state.amplitudes) {
        if (label.cavity_k.n_plus > 0) p_plus += std::norm(amp);
        if (label.cavity_k.n_minus > 0) p_minus += std::norm(amp);
    }
    const double carrying = p_plus + p_minus;
    if (carrying > 0.0 && bernoulli(rng, (1.0 - eta_t) * carrying)) {
        // Lose one photon: the environment records which mode died, so the
        // state collapses onto the branches carrying that mode, with the
        // photon annihilated.
        const bool lose_plus = next_unit(rng) * carrying < p_plus;
        LinkState lost = state;
        lost.amplitudes.clear();
        for (const auto& [label, amp] : state.amplitudes) {
            const int count = lose_plus ? label.cavity_k.n_plus : label.cavity_k.n_minus;
            if (count == 0) continue;
            BasisLabel survivor = label;
            (lose_plus ? survivor.cavity_k.n_plus : survivor.cavity_k.n_minus) = 0;
            lost.amplitudes[survivor] += amp;
        }
        lost.status = Status::lost(Side::k1, LossCause::fiber);
        lost = renormalized(std::move(lost));
        check_invariants(lost);
        return lost;
    }

    LinkState out = state;
    out.amplitudes.clear();
    for (const auto& [label, amp] : state.amplitudes) {
        BasisLabel moved = label;
        moved.cavity_k1.n_plus += moved.cavity_k.n_plus;
        moved.cavity_k1.n_minus += moved.cavity_k.n_minus;
        moved.cavity_k.n_plus = 0;
        moved.cavity_k.n_minus = 0;
        out.amplitudes[moved] += amp;
    }
    check_invariants(out);
    return out;
}

LinkState apply_decay_channel(const LinkState& state, double p_decay, Rng& rng) {
    if (!(p_decay >= 0.0 && p_decay <= 1.0))
        throw std::invalid_argument("apply_decay_channel: p_decay must lie in [0,1]");

    // Population of each Rydberg component (side, tag), in label order.
    struct Component {
        Side side;
        Ryd tag;
        double population;
    };
    std::vector<Component> components;
    auto add = [&](Side side, Ryd tag, double pop) {
        for (auto& component : components) {
            if (component.side == side && component.tag == tag) {
                component.population += pop;
                return;
            }
        }
        components.push_back({side, tag, pop});
    };
    double total = 0.0;
    for (const auto& [label, amp] : state.amplitudes) {
        for (Side side : {Side::k, Side::k1}) {
            const Ryd tag = label.ensemble(side).ryd;
            if (tag != Ryd::none) {
                const double pop = std::norm(amp);
                add(side, tag, pop);
                total += pop;
            }
        }
    }
    if (total == 0.0 || !bernoulli(rng, p_decay * total)) return state;

    // Jump: sample the decayed component proportionally to its population,
    // collapse onto the branches where it is occupied, then clear the
    // decayed ensemble's whole side - the emitted photon carried the
    // excitation away, so that ensemble's round is ruined and its cavity
    // photon (if any) is part of the discarded branch.
    double pick = next_unit(rng) * total;
    const Component* chosen = &components.back();
    for (const auto& component : components) {
        pick -= component.population;
        if (pick < 0.0) {
            chosen = &component;
            break;
        }
    }

    LinkState out = state;
    out.amplitudes.clear();
    for (const auto& [label, amp] : state.amplitudes) {
        if (label.ensemble(chosen->side).ryd != chosen->tag) continue;
        BasisLabel survivor = label;
        survivor.ensemble(chosen->side) = EnsembleConfig{};
        survivor.cavity(chosen->side) = CavityConfig{};
        out.amplitudes[survivor] += amp;
    }
    out.status = state.status.is_live() ? Status::lost(chosen->side, LossCause::decay)
                                        : state.status;
    out = renormalized(std::move(out));
    check_invariants(out);
    return out;
}

std::pair<LinkState, bool> ionize_and_detect(const LinkState& state, Level level, Side ensemble,
                                             double eta_ion, Rng& rng) {
    if (!(eta_ion >= 0.0 && eta_ion <= 1.0))
        throw std::invalid_argument("ionize_and_detect: eta_ion must lie in [0,1]");

    double occupied_pop = 0.0;
    const bool rydberg = is_rydberg(level);
    const Ryd tag = rydberg ? ryd_tag_of(level) : Ryd::none;
    auto level_occupied = [&](const BasisLabel& label) {
        const EnsembleConfig& ens = label.ensemble(ensemble);
        return rydberg ? ens.ryd == tag : ens.occupied(level);
    };
    for (const auto& [label, amp] : state.amplitudes) {
        if (level_occupied(label)) occupied_pop += std::norm(amp);
    }

    const bool occupied = occupied_pop > 0.0 && (occupied_pop >= 1.0 - kNormTolerance ||
                                                 next_unit(rng) < occupied_pop);
    LinkState out = state;
    out.amplitudes.clear();
    for (const auto& [label, amp] : state.amplitudes) {
        if (level_occupied(label) != occupied) continue;
        BasisLabel survivor = label;
        if (occupied) {
            // Atom ejected: the level is emptied in the surviving branches.
            if (rydberg) {
                survivor.ensemble(ensemble).ryd = Ryd::none;
            } else {
                survivor.ensemble(ensemble).set_occupied(level, false);
            }
        }
        out.amplitudes[survivor] += amp;
    }
    out = renormalized(std::move(out));
    check_invariants(out);
    const bool detected = occupied && bernoulli(rng, eta_ion);
    return {std::move(out), detected};
}

double norm_squared(const LinkState& state) {
    double n2 = 0.0;
    for (const auto& [label, amp] : state.amplitudes) n2 += std::norm(amp);
    return n2;
}

double photon_population(const LinkState& state) {
    double pop = 0.0;
    for (const auto& [label, amp] : state.amplitudes) {
        pop += std::norm(amp) * (label.cavity_k.photons() + label.cavity_k1.photons());
    }
    return pop;
}

double rydberg_population(const LinkState& state) {
    double pop = 0.0;
    for (const auto& [label, amp] : state.amplitudes) {
        pop += std::norm(amp) * (int(label.ensemble_k.ryd != Ryd::none) +
                                 int(label.ensemble_k1.ryd != Ryd::none));
    }
    return pop;
}

double rydberg_population(const LinkState& state, Side side, Ryd tag) {
    double pop = 0.0;
    for (const auto& [label, amp] : state.amplitudes) {
        if (label.ensemble(side).ryd == tag) pop += std::norm(amp);
    }
    return pop;
}

double level_population(const LinkState& state, Side side, Level level) {
    if (is_rydberg(level)) return rydberg_population(state, side, ryd_tag_of(level));
    double pop = 0.0;
    for (const auto& [label, amp] : state.amplitudes) {
        if (label.ensemble(side).occupied(level)) pop += std::norm(amp);
    }
    return pop;
}

double overlap(const LinkState& state, const LinkState& reference) {
    std::complex<double> inner = 0.0;
    for (const auto& [label, amp] : state.amplitudes) {
        auto it = reference.amplitudes.find(label);
        if (it != reference.amplitudes.end()) inner += std::conj(it->second) * amp;
    }
    return std::norm(inner);
}

std::string label_string(const BasisLabel& label) {
    auto ensemble_string = [](const EnsembleConfig& ens) {
        std::string out = "{";
        bool first = true;
        for (Level level : {Level::zero_l, Level::one_l, Level::zero_r, Level::one_r,
                            Level::zero_a, Level::one_a}) {
            if (!ens.occupied(level)) continue;
            if (!first) out += ' ';
            out += level_name(level);
            first = false;
        }
        out += '}';
        switch (ens.ryd) {
            case Ryd::none: break;
            case Ryd::minus: out += "+r-"; break;
            case Ryd::plus: out += "+r+"; break;
            case Ryd::aux: out += "+rA"; break;
        }
        return out;
    };
    auto cavity_string = [](const CavityConfig& cav) {
        return "(" + std::to_string(cav.n_plus) + "," + std::to_string(cav.n_minus) + ")";
    };
    return "k" + ensemble_string(label.ensemble_k) + cavity_string(label.cavity_k) + " k1" +
           ensemble_string(label.ensemble_k1) + cavity_string(label.cavity_k1);
}

std::vector<std::string> debug_dump(const LinkState& state) {
    std::vector<std::string> lines;
    lines.reserve(state.amplitudes.size());
    for (const auto& [label, amp] : state.amplitudes) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), " %.17g %.17g", amp.real(), amp.imag());
        lines.push_back(label_string(label) + buf);
    }
    return lines;  // map iteration is already label-sorted
}

void check_invariants(const LinkState& state) {
    double n2 = 0.0;
    for (const auto& [label, amp] : state.amplitudes) {
        n2 += std::norm(amp);
        for (const CavityConfig& cav : {label.cavity_k, label.cavity_k1}) {
            if (cav.n_plus < 0 || cav.n_plus > 1 || cav.n_minus < 0 || cav.n_minus > 1)
                throw std::logic_error("check_invariants: photon number outside {0,1}");
            if (cav.n_plus + cav.n_minus > 1)
                throw std::logic_error("check_invariants: both cavity modes populated");
        }
    }
    if (std::abs(n2 - 1.0) > kNormTolerance)
        throw std::logic_error("check_invariants: norm " + std::to_string(n2) + " != 1");
}

}  // namespace rydrep
