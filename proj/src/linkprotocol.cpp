#include "rydrep/linkprotocol.hpp"

#include <cmath>
#include <stdexcept>
#include <tuple>

#include "rydrep/analytics.hpp"

namespace rydrep {

namespace {

PulseSpec pulse(Side side, Level from, Level to, CavityMode mode = CavityMode::none) {
    PulseSpec spec;
    spec.ensemble = side;
    spec.from_level = from;
    spec.to_level = to;
    spec.uses_cavity_mode = mode;
    spec.collective = from == Level::reservoir || to == Level::reservoir;
    return spec;
}

// Subnode qubit levels tested by the diagnosis on each side: the R pair on
// ensemble k, the L pair on ensemble k+1.
std::pair<Level, Level> diagnosed_levels(Side side) {
    return side == Side::k ? std::pair{Level::zero_r, Level::one_r}
                           : std::pair{Level::zero_l, Level::one_l};
}

// Apply one script step; the decay channel after each pulse slot is the
// caller's job (it needs the noise parameters).
LinkState apply_step(const LinkState& state, const ScriptStep& step, const NoiseParams& params,
                     Rng& rng) {
    if (step.kind == ScriptStep::Kind::transfer) {
        // A lost state has nothing in flight (the ruined side's cavity was
        // cleared with it), and transfer_photon rejects non-live states, so
        // the slot is skipped.
        if (!state.status.is_live()) return state;
        return transfer_photon(state, eta_t(params.l0_km, params.l_att_km), rng);
    }
    return apply_pulses(state, step.pulses);
}

LinkState run_script(const LinkState& start, const std::vector<ScriptStep>& script,
                     const NoiseParams& params, Rng& rng) {
    const double p_decay = params.p_decay_per_pulse();
    const double p_double = params.include_double_excitation
                                ? params.omega_over_delta_dd * params.omega_over_delta_dd
                                : 0.0;
    LinkState state = start;
    for (const ScriptStep& step : script) {
        state = apply_step(state, step, params, rng);
        if (step.kind == ScriptStep::Kind::pulses) {
            state = apply_decay_channel(state, p_decay, rng);
            if (p_double > 0.0) state = apply_decay_channel(state, p_double, rng);
        }
    }
    return state;
}

BasisLabel make_label(EnsembleConfig k, CavityConfig ck, EnsembleConfig k1, CavityConfig ck1) {
    return BasisLabel{k, ck, k1, ck1};
}

EnsembleConfig ens(std::initializer_list<Level> occupied, Ryd ryd = Ryd::none) {
    EnsembleConfig config;
    for (Level level : occupied) config.set_occupied(level, true);
    config.ryd = ryd;
    return config;
}

LinkState superposition(std::initializer_list<BasisLabel> labels) {
    LinkState state;
    const double amp = 1.0 / std::sqrt(static_cast<double>(labels.size()));
    for (const BasisLabel& label : labels) state.amplitudes[label] = amp;
    return state;
}

}  // namespace

std::vector<ScriptStep> generation_script() {
    using L = Level;
    std::vector<ScriptStep> script;
    // i: split the reservoir into an equal superposition of the two Rydberg
    // levels (simultaneous equal-Rabi pulses).
    script.push_back(ScriptStep::simultaneous(
        {pulse(Side::k, L::reservoir, L::ryd_minus), pulse(Side::k, L::reservoir, L::ryd_plus)}));
    // ii-v: each branch emits its photon into its cavity mode and is
    // re-excited, so afterwards branch "-" holds r- plus a "-" photon and
    // branch "+" holds r+ plus a "+" photon.
    script.push_back(ScriptStep::single(pulse(Side::k, L::ryd_minus, L::reservoir, CavityMode::minus)));
    script.push_back(ScriptStep::single(pulse(Side::k, L::reservoir, L::ryd_minus)));
    script.push_back(ScriptStep::single(pulse(Side::k, L::ryd_plus, L::reservoir, CavityMode::plus)));
    script.push_back(ScriptStep::single(pulse(Side::k, L::reservoir, L::ryd_plus)));
    // vi-vii: park the branches in the R subnode qubit.
    script.push_back(ScriptStep::single(pulse(Side::k, L::ryd_minus, L::zero_r)));
    script.push_back(ScriptStep::single(pulse(Side::k, L::ryd_plus, L::one_r)));
    // viii: photon flies to the neighbor cavity.
    script.push_back(ScriptStep::transfer());
    // ix-xii: the neighbor absorbs each mode into the matching L subnode level.
    script.push_back(ScriptStep::single(pulse(Side::k1, L::reservoir, L::ryd_minus, CavityMode::minus)));
    script.push_back(ScriptStep::single(pulse(Side::k1, L::ryd_minus, L::zero_l)));
    script.push_back(ScriptStep::single(pulse(Side::k1, L::reservoir, L::ryd_plus, CavityMode::plus)));
    script.push_back(ScriptStep::single(pulse(Side::k1, L::ryd_plus, L::one_l)));
    return script;
}

std::vector<ScriptStep> diagnosis_script(Side side) {
    using L = Level;
    const auto [zero, one] = diagnosed_levels(side);
    std::vector<ScriptStep> script;
    // Auxiliary preparation: one collective excitation parked in 0A.
    script.push_back(ScriptStep::single(pulse(side, L::reservoir, L::ryd_aux)));
    script.push_back(ScriptStep::single(pulse(side, L::ryd_aux, L::zero_a)));
    // Occupancy check.  If the "1" level is occupied it is parked in r+,
    // which blockades the auxiliary raise; the auxiliary excitation then
    // reaches 1A only through the second raise (and vice versa for "0",
    // whose park in r- protects the 1A from being lifted back out).  An
    // empty subnode blocks nothing: the auxiliary ends re-raised in the
    // Rydberg level, where ionization reveals it.
    script.push_back(ScriptStep::single(pulse(side, one, L::ryd_plus)));
    script.push_back(ScriptStep::single(pulse(side, L::zero_a, L::ryd_aux)));
    script.push_back(ScriptStep::single(pulse(side, L::ryd_aux, L::one_a)));
    script.push_back(ScriptStep::single(pulse(side, L::ryd_plus, one)));
    script.push_back(ScriptStep::single(pulse(side, zero, L::ryd_minus)));
    script.push_back(ScriptStep::single(pulse(side, L::zero_a, L::ryd_aux)));
    script.push_back(ScriptStep::single(pulse(side, L::ryd_aux, L::one_a)));
    script.push_back(ScriptStep::single(pulse(side, L::ryd_minus, zero)));
    return script;
}

std::vector<LinkState> generation_checkpoints() {
    using L = Level;
    const EnsembleConfig fresh;
    const CavityConfig vac;
    const CavityConfig ph_minus{0, 1};
    const CavityConfig ph_plus{1, 0};
    std::vector<LinkState> states;
    // i
    states.push_back(superposition({make_label(ens({}, Ryd::minus), vac, fresh, vac),
                                    make_label(ens({}, Ryd::plus), vac, fresh, vac)}));
    // ii
    states.push_back(superposition({make_label(fresh, ph_minus, fresh, vac),
                                    make_label(ens({}, Ryd::plus), vac, fresh, vac)}));
    // iii
    states.push_back(superposition({make_label(ens({}, Ryd::minus), ph_minus, fresh, vac),
                                    make_label(ens({}, Ryd::plus), vac, fresh, vac)}));
    // iv
    states.push_back(superposition({make_label(ens({}, Ryd::minus), ph_minus, fresh, vac),
                                    make_label(fresh, ph_plus, fresh, vac)}));
    // v
    states.push_back(superposition({make_label(ens({}, Ryd::minus), ph_minus, fresh, vac),
                                    make_label(ens({}, Ryd::plus), ph_plus, fresh, vac)}));
    // vi
    states.push_back(superposition({make_label(ens({L::zero_r}), ph_minus, fresh, vac),
                                    make_label(ens({}, Ryd::plus), ph_plus, fresh, vac)}));
    // vii
    states.push_back(superposition({make_label(ens({L::zero_r}), ph_minus, fresh, vac),
                                    make_label(ens({L::one_r}), ph_plus, fresh, vac)}));
    // viii
    states.push_back(superposition({make_label(ens({L::zero_r}), vac, fresh, ph_minus),
                                    make_label(ens({L::one_r}), vac, fresh, ph_plus)}));
    // ix
    states.push_back(superposition({make_label(ens({L::zero_r}), vac, ens({}, Ryd::minus), vac),
                                    make_label(ens({L::one_r}), vac, fresh, ph_plus)}));
    // x
    states.push_back(superposition({make_label(ens({L::zero_r}), vac, ens({L::zero_l}), vac),
                                    make_label(ens({L::one_r}), vac, fresh, ph_plus)}));
    // xi
    states.push_back(superposition({make_label(ens({L::zero_r}), vac, ens({L::zero_l}), vac),
                                    make_label(ens({L::one_r}), vac, ens({}, Ryd::plus), vac)}));
    // xii: the Bell-correlated target.
    states.push_back(superposition({make_label(ens({L::zero_r}), vac, ens({L::zero_l}), vac),
                                    make_label(ens({L::one_r}), vac, ens({L::one_l}), vac)}));
    return states;
}

LinkState accepted_state_with_aux() {
    using L = Level;
    const CavityConfig vac;
    return superposition(
        {make_label(ens({L::zero_r, L::one_a}), vac, ens({L::zero_l, L::one_a}), vac),
         make_label(ens({L::one_r, L::one_a}), vac, ens({L::one_l, L::one_a}), vac)});
}

LinkState run_generation_sequence(const LinkState& state, const NoiseParams& params, Rng& rng) {
    params.validate();
    return run_script(state, generation_script(), params, rng);
}

std::pair<LinkState, DiagnosisResult> run_diagnosis(const LinkState& state,
                                                    const NoiseParams& params, Rng& rng) {
    params.validate();
    // The two per-ensemble scripts commute (disjoint ensembles); they run in
    // parallel on the hardware and sequentially here.
    LinkState current = run_script(state, diagnosis_script(Side::k), params, rng);
    current = run_script(current, diagnosis_script(Side::k1), params, rng);

    DiagnosisResult result;
    bool ryd_k = false, ryd_k1 = false, one_a_k = false, one_a_k1 = false;
    std::tie(current, ryd_k) =
        ionize_and_detect(current, Level::ryd_aux, Side::k, params.eta_ion, rng);
    result.ions_seen.emplace_back(Detection::ryd_aux_k, ryd_k);
    std::tie(current, ryd_k1) =
        ionize_and_detect(current, Level::ryd_aux, Side::k1, params.eta_ion, rng);
    result.ions_seen.emplace_back(Detection::ryd_aux_k1, ryd_k1);
    if (!ryd_k && !ryd_k1) {
        std::tie(current, one_a_k) =
            ionize_and_detect(current, Level::one_a, Side::k, params.eta_ion, rng);
        result.ions_seen.emplace_back(Detection::one_a_k, one_a_k);
        std::tie(current, one_a_k1) =
            ionize_and_detect(current, Level::one_a, Side::k1, params.eta_ion, rng);
        result.ions_seen.emplace_back(Detection::one_a_k1, one_a_k1);
    }
    result.verdict = verdict_from_detections(ryd_k, ryd_k1, one_a_k, one_a_k1);
    return {std::move(current), std::move(result)};
}

Verdict verdict_from_detections(bool ryd_aux_k, bool ryd_aux_k1, bool one_a_k, bool one_a_k1) {
    if (ryd_aux_k || ryd_aux_k1) return Verdict::retry_a;
    if (one_a_k && one_a_k1) return Verdict::accept_b1;
    return Verdict::retry_b2;
}

std::string verdict_name(Verdict verdict) {
    switch (verdict) {
        case Verdict::retry_a: return "retry_a";
        case Verdict::accept_b1: return "accept_b1";
        case Verdict::retry_b2: return "retry_b2";
    }
    return "?";
}

std::string failure_cause_name(FailureCause cause) {
    switch (cause) {
        case FailureCause::fiber: return "fiber";
        case FailureCause::decay: return "decay";
        case FailureCause::diagnosis_b2: return "diagnosis_b2";
        case FailureCause::false_accept: return "false_accept";
    }
    return "?";
}

LinkOutcome attempt_link(const NoiseParams& params, Rng& rng) {
    LinkState state = run_generation_sequence(new_link_state(), params, rng);
    auto [final_state, diagnosis] = run_diagnosis(state, params, rng);

    LinkOutcome outcome;
    outcome.verdict = diagnosis.verdict;
    outcome.elapsed_s = attempt_elapsed_s(params);
    const bool live = final_state.status.is_live();
    if (diagnosis.verdict == Verdict::accept_b1) {
        outcome.success = live;
        if (!live) outcome.failure_cause = FailureCause::false_accept;
    } else if (!live) {
        outcome.failure_cause = final_state.status.cause == LossCause::fiber
                                    ? FailureCause::fiber
                                    : FailureCause::decay;
    } else {
        // A live trajectory can only be rejected through missed 1A ions.
        outcome.failure_cause = FailureCause::diagnosis_b2;
    }
    return outcome;
}

LinkState reset_subnodes(const LinkState&) { return new_link_state(); }

std::vector<double> decay_exposure_profile() {
    NoiseParams noiseless;
    noiseless.gamma_hz = 0.0;
    noiseless.l0_km = 0.0;  // eta_t = 1 exactly: the instrumented run stays live
    Rng rng(0);
    std::vector<double> exposures;
    LinkState state = new_link_state();
    auto run_and_record = [&](const std::vector<ScriptStep>& script) {
        for (const ScriptStep& step : script) {
            state = apply_step(state, step, noiseless, rng);
            if (step.kind == ScriptStep::Kind::pulses)
                exposures.push_back(rydberg_population(state));
        }
    };
    run_and_record(generation_script());
    run_and_record(diagnosis_script(Side::k));
    run_and_record(diagnosis_script(Side::k1));
    return exposures;
}

std::vector<double> generation_exposure_profile() {
    std::vector<double> all = decay_exposure_profile();
    // The generation script has 11 pulse slots (the transfer slot records no
    // exposure).
    all.resize(11);
    return all;
}

namespace {

double survival_product(const std::vector<double>& exposures, const NoiseParams& params) {
    const double p = params.p_decay_per_pulse();
    double product = 1.0;
    for (double w : exposures) product *= 1.0 - p * w;
    return product;
}

}  // namespace

double coded_generation_live_probability(const NoiseParams& params) {
    params.validate();
    return eta_t(params.l0_km, params.l_att_km) *
           survival_product(generation_exposure_profile(), params);
}

double coded_success_probability(const NoiseParams& params) {
    params.validate();
    return eta_t(params.l0_km, params.l_att_km) *
           survival_product(decay_exposure_profile(), params) * params.eta_ion * params.eta_ion;
}

double attempt_elapsed_s(const NoiseParams& params) {
    return params.l0_km * 1000.0 / params.c_m_s +
           wall_clock_pulse_slots * params.pulse_duration_s;
}

}  // namespace rydrep
