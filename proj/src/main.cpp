#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "rydrep/analytics.hpp"
#include "rydrep/chainsim.hpp"
#include "rydrep/config.hpp"
#include "rydrep/csv.hpp"
#include "rydrep/linkprotocol.hpp"
#include "rydrep/statevec.hpp"

namespace {

using namespace rydrep;

struct Overrides {
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<long long> trials;
    std::optional<std::string> mode;
    std::optional<std::string> out;
    std::optional<std::string> level;
    std::optional<long long> threads;
    std::optional<long long> n_nodes;
    std::optional<double> l0_km;
    std::optional<double> l_att_km;
    std::optional<double> gamma_hz;
    std::optional<double> omega_rad_s;
    std::optional<double> eta_ion;
    std::optional<double> chi_r_hz;
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path,
                    "Key-value config file, applied before the flag overrides");
    cmd->add_option("--seed", o.seed, "Master seed; trial j derives its own stream from it");
    cmd->add_option("--trials", o.trials, "Monte Carlo trial count");
    cmd->add_option("--mode", o.mode, "Chain generation engine: fast (Bernoulli rounds) or"
                    " faithful (full state-vector rounds)")
        ->check(CLI::IsMember({"fast", "faithful"}));
    cmd->add_option("--out", o.out, "Output CSV file (simulate/analytics) or directory (figures)");
    cmd->add_option("--level", o.level, "simulate target: link or chain")
        ->check(CLI::IsMember({"link", "chain"}));
    cmd->add_option("--threads", o.threads, "Worker threads (results are thread-count"
                    " independent)");
    cmd->add_option("--n-nodes", o.n_nodes, "Number of chain nodes N");
    cmd->add_option("--l0-km", o.l0_km, "Inter-node fiber length L0 [km]");
    cmd->add_option("--l-att-km", o.l_att_km, "Fiber attenuation length [km]");
    cmd->add_option("--gamma-hz", o.gamma_hz, "Rydberg decay rate Gamma [1/s]");
    cmd->add_option("--omega-rad-s", o.omega_rad_s, "Two-photon Rabi frequency Omega [rad/s]");
    cmd->add_option("--eta-ion", o.eta_ion, "Ion detection efficiency");
    cmd->add_option("--chi-r-hz", o.chi_r_hz, "Direct-transmission source rate [Hz]");
}

RunConfig resolve(const Overrides& o) {
    RunConfig config;
    if (o.config_path) apply_config_file(config, *o.config_path);
    if (o.seed) config.seed = *o.seed;
    if (o.trials) config.trials = *o.trials;
    if (o.mode) config.mode = *o.mode == "fast" ? GenMode::fast : GenMode::faithful;
    if (o.out) config.out = *o.out;
    if (o.level) config.level = *o.level == "link" ? SimLevel::link : SimLevel::chain;
    if (o.threads) config.threads = static_cast<int>(*o.threads);
    if (o.n_nodes) config.chain.n_nodes = static_cast<int>(*o.n_nodes);
    if (o.l0_km) config.chain.noise.l0_km = *o.l0_km;
    if (o.l_att_km) config.chain.noise.l_att_km = *o.l_att_km;
    if (o.gamma_hz) config.chain.noise.gamma_hz = *o.gamma_hz;
    if (o.omega_rad_s) config.chain.noise.omega_rad_s = *o.omega_rad_s;
    if (o.eta_ion) config.chain.noise.eta_ion = *o.eta_ion;
    if (o.chi_r_hz) config.chain.chi_r_hz = *o.chi_r_hz;
    config.validate();
    return config;
}

double z_score(double empirical, double predicted, double variance, double n) {
    const double se = std::sqrt(variance / n);
    if (se == 0.0)
        return empirical == predicted ? 0.0 : std::numeric_limits<double>::infinity();
    return (empirical - predicted) / se;
}

// --- analytics --------------------------------------------------------------

int cmd_analytics(const RunConfig& config) {
    const ChainParams& chain = config.chain;
    const LinkBudget budget = p0(chain.noise);
    const double p_swap_chain = p1(chain.n_nodes, chain.noise);
    const RoundCountSummary rounds = n_bar(budget.p0, chain.n_nodes);
    const double time_s = total_time(chain);
    const double direct_s =
        direct_time(chain.total_length_km(), chain.l_att_km(), chain.chi_r_hz);

    std::vector<std::pair<std::string, std::string>> report{
        {"eta_t", fmt_double(budget.eta_t)},
        {"p_no_decay", fmt_double(budget.p_no_decay)},
        {"eta_ion4", fmt_double(budget.p_ion4)},
        {"p0", fmt_double(budget.p0)},
        {"p1", fmt_double(p_swap_chain)},
        {"n_bar", fmt_double(rounds.n_bar)},
        {"n_max", fmt_double(rounds.n_max)},
        {"truncation_n", std::to_string(rounds.truncation_n)},
        {"tail_bound", fmt_double(rounds.tail_bound)},
        {"total_time_s", fmt_double(time_s)},
        {"total_length_km", fmt_double(chain.total_length_km())},
        {"direct_time_s", fmt_double(direct_s)},
    };
    for (const auto& [key, value] : report) std::cout << key << " = " << value << "\n";
    if (!config.out.empty()) {
        CsvWriter csv(config.out);
        csv.row({"quantity", "value"});
        for (const auto& [key, value] : report) csv.row({key, value});
    }
    return 0;
}

// --- verify -----------------------------------------------------------------

// Independently constructed copy of the swap gate with the conditional-phase
// sign at |10> flipped; used to prove the oracle detects corrupted algebra.
Eigen::Matrix4cd faulted_swap_gate() {
    const std::complex<double> i(0.0, 1.0);
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Matrix2cd u, v;
    u << -i * r, i * r, i * r, i * r;
    v << r, r, -r, r;
    Eigen::Matrix4cd p = Eigen::Matrix4cd::Identity();
    p(0, 0) = -1;
    p(1, 1) = -1;
    p(2, 2) = -1;  // injected fault: correct phase pattern is (-1,-1,+1,-1)
    p(3, 3) = -1;
    auto kron = [](const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
        Eigen::Matrix4cd out;
        for (int row = 0; row < 2; ++row)
            for (int col = 0; col < 2; ++col) out.block<2, 2>(2 * row, 2 * col) = a(row, col) * b;
        return out;
    };
    return kron(u, u) * p * kron(Eigen::Matrix2cd::Identity(), v);
}

int cmd_verify(const std::string& inject) {
    bool all_ok = true;

    // 1. Noiseless generation replay against the twelve reference states.
    {
        Rng rng(12345);
        LinkState state = new_link_state();
        const auto script = generation_script();
        const auto checkpoints = generation_checkpoints();
        double min_overlap = 1.0;
        int fail_step = 0;
        for (std::size_t i = 0; i < script.size(); ++i) {
            state = script[i].kind == ScriptStep::Kind::transfer
                        ? transfer_photon(state, 1.0, rng)
                        : apply_pulses(state, script[i].pulses);
            const double ov = overlap(state, checkpoints[i]);
            if (ov < min_overlap) min_overlap = ov;
            if (ov < 1.0 - 1e-12 && fail_step == 0) fail_step = static_cast<int>(i) + 1;
        }
        if (fail_step == 0) {
            std::cout << "generation replay: 12/12 states match (min overlap = "
                      << fmt_double(min_overlap) << ")\n";
        } else {
            std::cout << "generation replay: FAIL at step " << fail_step
                      << " (overlap = " << fmt_double(min_overlap) << ")\n";
            all_ok = false;
        }
    }

    // 2. Diagnosis truth table: all 16 detection combinations, written out
    // literally so the decision function is checked against fixed data.
    {
        struct Row {
            bool ryd_k, ryd_k1, one_a_k, one_a_k1;
            Verdict expected;
        };
        const Row table[16] = {
            {false, false, false, false, Verdict::retry_b2},
            {false, false, false, true, Verdict::retry_b2},
            {false, false, true, false, Verdict::retry_b2},
            {false, false, true, true, Verdict::accept_b1},
            {false, true, false, false, Verdict::retry_a},
            {false, true, false, true, Verdict::retry_a},
            {false, true, true, false, Verdict::retry_a},
            {false, true, true, true, Verdict::retry_a},
            {true, false, false, false, Verdict::retry_a},
            {true, false, false, true, Verdict::retry_a},
            {true, false, true, false, Verdict::retry_a},
            {true, false, true, true, Verdict::retry_a},
            {true, true, false, false, Verdict::retry_a},
            {true, true, false, true, Verdict::retry_a},
            {true, true, true, false, Verdict::retry_a},
            {true, true, true, true, Verdict::retry_a},
        };
        int matched = 0;
        std::string first_failure;
        for (const Row& row : table) {
            const Verdict got =
                verdict_from_detections(row.ryd_k, row.ryd_k1, row.one_a_k, row.one_a_k1);
            if (got == row.expected) {
                ++matched;
            } else if (first_failure.empty()) {
                first_failure = "(" + std::to_string(row.ryd_k) + "," +
                                std::to_string(row.ryd_k1) + "," + std::to_string(row.one_a_k) +
                                "," + std::to_string(row.one_a_k1) + "): got " +
                                verdict_name(got) + ", expected " + verdict_name(row.expected);
            }
        }
        if (matched == 16) {
            std::cout << "diagnosis truth table: 16/16 verdicts match\n";
        } else {
            std::cout << "diagnosis truth table: FAIL at " << first_failure << "\n";
            all_ok = false;
        }
    }

    // 3. Exhaustive swap oracle for N in {3,4}: every outcome combination
    // must give uniform probabilities, a Bell-state terminal pair, a
    // correction word restoring phi_plus, and a label consistent with the
    // Pauli-frame map.
    {
        const Eigen::Matrix4cd gate =
            inject == "plr-sign" ? faulted_swap_gate() : swap_gate_matrix();
        if (!inject.empty())
            std::cout << "fault injection active: " << inject << "\n";
        for (int n_nodes : {3, 4}) {
            const int nodes = n_nodes - 2;
            const long cases = 1L << (2 * nodes);
            long passed = 0;
            std::string first_failure;
            for (long c = 0; c < cases; ++c) {
                std::vector<std::pair<int, int>> outcomes(nodes);
                for (int m = 0; m < nodes; ++m)
                    outcomes[m] = {static_cast<int>((c >> (2 * m)) & 1),
                                   static_cast<int>((c >> (2 * m + 1)) & 1)};
                try {
                    const auto [label, word] = swap_oracle_with_gate(n_nodes, outcomes, gate);
                    if (label != bell_label_under(word)) {
                        if (first_failure.empty())
                            first_failure = "label/word mismatch at case " + std::to_string(c);
                        continue;
                    }
                    ++passed;
                } catch (const std::logic_error& e) {
                    if (first_failure.empty())
                        first_failure = "case " + std::to_string(c) + ": " + e.what();
                }
            }
            if (passed == cases) {
                std::cout << "swap oracle N=" << n_nodes << ": " << passed << "/" << cases
                          << " outcome combinations verified\n";
            } else {
                std::cout << "swap oracle N=" << n_nodes << ": FAIL (" << passed << "/" << cases
                          << " passed; first failure: " << first_failure << ")\n";
                all_ok = false;
            }
        }
    }

    std::cout << (all_ok ? "VERIFY PASS\n" : "VERIFY FAIL\n");
    return all_ok ? 0 : 2;
}

// --- simulate ---------------------------------------------------------------

std::vector<LinkOutcome> run_link_trials(const NoiseParams& noise, long trials,
                                         std::uint64_t seed, int threads) {
    std::vector<LinkOutcome> records(static_cast<std::size_t>(trials));
    const int n_threads = static_cast<int>(std::min<long>(std::max(threads, 1), trials));
    auto work = [&](long lo, long hi) {
        for (long j = lo; j < hi; ++j) {
            Rng rng = make_trial_rng(seed, static_cast<std::uint64_t>(j));
            records[static_cast<std::size_t>(j)] = attempt_link(noise, rng);
        }
    };
    if (n_threads == 1) {
        work(0, trials);
    } else {
        std::vector<std::thread> pool;
        const long chunk = (trials + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back(work, t * chunk, std::min(trials, (t + 1) * chunk));
        for (std::thread& th : pool) th.join();
    }
    return records;
}

int cmd_simulate(const RunConfig& config) {
    // Open every output before simulating, so an unwritable path fails fast.
    std::optional<CsvWriter> csv;
    std::optional<std::ofstream> summary_file;
    if (!config.out.empty()) {
        csv.emplace(config.out);
        summary_file.emplace(config.out + ".summary", std::ios::binary | std::ios::trunc);
        if (!*summary_file)
            throw std::runtime_error("cannot open output file: " + config.out + ".summary");
    }

    std::string summary = serialize_config(config);
    auto result = [&](const std::string& key, const std::string& value) {
        summary += "# " + key + " = " + value + "\n";
    };
    const double n = static_cast<double>(config.trials);

    if (config.level == SimLevel::link) {
        // Link level always runs the full state-vector engine; `mode` only
        // selects the chain-level generation backend.
        const std::vector<LinkOutcome> records =
            run_link_trials(config.chain.noise, config.trials, config.seed, config.threads);
        long successes = 0;
        long by_verdict[3] = {0, 0, 0};
        long by_cause[4] = {0, 0, 0, 0};
        double elapsed_sum = 0.0;
        for (const LinkOutcome& rec : records) {
            successes += rec.success ? 1 : 0;
            ++by_verdict[static_cast<int>(rec.verdict)];
            if (rec.failure_cause) ++by_cause[static_cast<int>(*rec.failure_cause)];
            elapsed_sum += rec.elapsed_s;
        }
        const double rate = successes / n;
        const double predicted = coded_success_probability(config.chain.noise);
        const double variance = predicted * (1.0 - predicted);
        result("trials", std::to_string(config.trials));
        result("empirical_success_rate", fmt_double(rate));
        result("predicted_success_rate", fmt_double(predicted));
        result("z_success", fmt_double(z_score(rate, predicted, variance, n)));
        result("analytics_p0", fmt_double(p0(config.chain.noise).p0));
        result("count_verdict_retry_a", std::to_string(by_verdict[0]));
        result("count_verdict_accept_b1", std::to_string(by_verdict[1]));
        result("count_verdict_retry_b2", std::to_string(by_verdict[2]));
        result("count_fail_fiber", std::to_string(by_cause[0]));
        result("count_fail_decay", std::to_string(by_cause[1]));
        result("count_fail_diagnosis_b2", std::to_string(by_cause[2]));
        result("count_fail_false_accept", std::to_string(by_cause[3]));
        result("mean_elapsed_s", fmt_double(elapsed_sum / n));
        if (csv) {
            csv->row({"trial", "verdict", "failure_cause", "elapsed_s"});
            for (std::size_t j = 0; j < records.size(); ++j) {
                const LinkOutcome& rec = records[j];
                csv->row({std::to_string(j), verdict_name(rec.verdict),
                          rec.failure_cause ? failure_cause_name(*rec.failure_cause) : "",
                          fmt_double(rec.elapsed_s)});
            }
        }
    } else {
        std::vector<TrialRecord> records;
        const ChainStats stats = run_end_to_end(config.chain, config.trials, config.mode,
                                                config.seed, config.threads, &records);
        const NoiseParams& noise = config.chain.noise;
        const double p_round = config.mode == GenMode::fast
                                   ? p0(noise).p0
                                   : coded_success_probability(noise);
        const RoundCountSummary rounds = n_bar(p_round, config.chain.n_nodes);
        const double p_swap_chain = p1(config.chain.n_nodes, noise);
        const double slot_s = config.chain.l0_km() * 1000.0 / config.chain.c_m_s();
        const double predicted_time = slot_s * rounds.n_bar / p_swap_chain;
        long by_state[4] = {0, 0, 0, 0};
        for (const TrialRecord& rec : records) ++by_state[static_cast<int>(rec.end_state)];
        result("trials", std::to_string(config.trials));
        result("empirical_mean_rounds", fmt_double(stats.mean_rounds));
        result("predicted_n_bar", fmt_double(rounds.n_bar));
        result("z_rounds", fmt_double(z_score(stats.mean_rounds, rounds.n_bar,
                                              stats.var_rounds, n)));
        result("empirical_mean_time_s", fmt_double(stats.mean_time_s));
        result("predicted_mean_time_s", fmt_double(predicted_time));
        result("z_time", fmt_double(z_score(stats.mean_time_s, predicted_time,
                                            stats.var_time_s, n)));
        result("empirical_mean_repeats", fmt_double(stats.mean_repeats));
        result("predicted_mean_repeats", fmt_double(1.0 / p_swap_chain));
        result("count_phi_plus", std::to_string(by_state[0]));
        result("count_phi_minus", std::to_string(by_state[1]));
        result("count_psi_plus", std::to_string(by_state[2]));
        result("count_psi_minus", std::to_string(by_state[3]));
        if (csv) {
            csv->row({"trial", "rounds_phase1", "rounds_phase2", "protocol_repeats",
                      "total_time_s", "end_state"});
            for (std::size_t j = 0; j < records.size(); ++j) {
                const TrialRecord& rec = records[j];
                csv->row({std::to_string(j), std::to_string(rec.rounds_phase1),
                          std::to_string(rec.rounds_phase2),
                          std::to_string(rec.protocol_repeats), fmt_double(rec.total_time_s),
                          bell_label_name(rec.end_state)});
            }
        }
    }

    std::cout << summary;
    if (summary_file) {
        *summary_file << summary;
        if (!*summary_file)
            throw std::runtime_error("write failed: " + config.out + ".summary");
    }
    return 0;
}

// --- figures ----------------------------------------------------------------

int cmd_figures(const RunConfig& config) {
    namespace fs = std::filesystem;
    const fs::path dir = config.out.empty() ? fs::path(".") : fs::path(config.out);
    fs::create_directories(dir);
    const double p0_grid[3] = {0.1, 0.2, 0.3};

    {
        std::vector<double> grid;
        for (int l = 100; l <= 2000; l += 100) grid.push_back(l);
        const TimeComparisonSeries series = fig3_series(16, grid, config.chain);
        CsvWriter csv((dir / "fig3.csv").string());
        csv.row({"l_km", "log10_direct_time_s", "log10_protocol_time_s"});
        for (std::size_t i = 0; i < series.l_km.size(); ++i)
            csv.row({fmt_double(series.l_km[i]), fmt_double(series.log10_direct_s[i]),
                     fmt_double(series.log10_protocol_s[i])});
    }
    {
        CsvWriter csv((dir / "figA1.csv").string());
        csv.row({"n", "p_k_p0_0.1", "p_k_p0_0.2", "p_k_p0_0.3"});
        for (long n = 1; n <= 150; ++n) {
            std::vector<std::string> row{std::to_string(n)};
            for (double p : p0_grid) row.push_back(fmt_double(p_K(n, 1000, p)));
            csv.row(row);
        }
    }
    {
        CsvWriter csv((dir / "figA2.csv").string());
        csv.row({"n_nodes", "n_bar_p0_0.1", "two_n_max_p0_0.1", "n_bar_p0_0.2",
                 "two_n_max_p0_0.2", "n_bar_p0_0.3", "two_n_max_p0_0.3"});
        for (int nodes = 4; nodes <= 64; nodes += 2) {
            std::vector<std::string> row{std::to_string(nodes)};
            for (double p : p0_grid) {
                const RoundCountSummary summary = n_bar(p, nodes);
                row.push_back(fmt_double(summary.n_bar));
                row.push_back(fmt_double(2.0 * summary.n_max));
            }
            csv.row(row);
        }
    }
    std::cout << "wrote fig3.csv, figA1.csv, figA2.csv to " << dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator and analytics for a Rydberg-ensemble quantum-repeater chain"};
    app.require_subcommand(1);

    Overrides o;
    CLI::App* c_analytics = app.add_subcommand(
        "analytics", "Evaluate the closed-form figures of merit for the configured chain");
    CLI::App* c_verify = app.add_subcommand(
        "verify",
        "Self-check: noiseless pulse-script replay, diagnosis truth table, exhaustive swap"
        " oracle (runs noiselessly; physical overrides are accepted but do not affect it)");
    CLI::App* c_simulate =
        app.add_subcommand("simulate", "Monte Carlo run at link or chain level, CSV + summary");
    CLI::App* c_figures =
        app.add_subcommand("figures", "Emit plot-ready CSV series into a directory");
    for (CLI::App* cmd : {c_analytics, c_verify, c_simulate, c_figures})
        add_common_flags(cmd, o);
    std::string inject;
    c_verify->add_option("--inject-fault", inject, "Corrupt an internal constant to prove the"
                         " checks catch it")
        ->check(CLI::IsMember({"plr-sign"}))
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const RunConfig config = resolve(o);
        if (c_analytics->parsed()) return cmd_analytics(config);
        if (c_verify->parsed()) return cmd_verify(inject);
        if (c_simulate->parsed()) return cmd_simulate(config);
        return cmd_figures(config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
