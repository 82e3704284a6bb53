// End-to-end tests that exercise the installed command-line binary as a child
// process: determinism of its outputs, exit codes, and file formats.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct CmdResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("rydrep_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

CmdResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path out_path = dir / "stdout.txt";
    const fs::path err_path = dir / "stderr.txt";
    const std::string cmd = std::string("\"") + RYDREP_CLI_PATH + "\" " + args + " > \"" +
                            out_path.string() + "\" 2> \"" + err_path.string() + "\"";
    const int raw = std::system(cmd.c_str());
    CmdResult result;
    if (raw != -1 && WIFEXITED(raw)) result.exit_code = WEXITSTATUS(raw);
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    return result;
}

}  // namespace

TEST_CASE("analytics subcommand reports the closed forms and exits cleanly") {
    const fs::path dir = fresh_dir("analytics");
    const fs::path csv = dir / "report.csv";
    const CmdResult r = run_cli("analytics --out \"" + csv.string() + "\"", dir);
    CHECK(r.exit_code == 0);
    // Reference operating point, printed with round-trip precision.
    CHECK(r.out.find("eta_t = 0.010615346461976") != std::string::npos);
    CHECK(r.out.find("p0 = 0.010079793272396") != std::string::npos);
    CHECK(r.out.find("p1 = 0.71346152439964") != std::string::npos);
    CHECK(r.out.find("n_bar = 451.76443082624") != std::string::npos);
    CHECK(r.out.find("total_time_s = 0.3166004159834") != std::string::npos);
    CHECK(r.out.find("total_length_km = 900") != std::string::npos);

    const std::string bytes = slurp(csv);
    CHECK(bytes.rfind("quantity,value\n", 0) == 0);
    CHECK(bytes.find("\r") == std::string::npos);
    CHECK(bytes.find("eta_t,") != std::string::npos);
    CHECK(bytes.find("direct_time_s,") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("verify subcommand passes clean and fails under fault injection") {
    const fs::path dir = fresh_dir("verify");
    const CmdResult ok = run_cli("verify", dir);
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("generation replay: 12/12 states match") != std::string::npos);
    CHECK(ok.out.find("diagnosis truth table: 16/16 verdicts match") != std::string::npos);
    CHECK(ok.out.find("swap oracle N=3: 4/4") != std::string::npos);
    CHECK(ok.out.find("swap oracle N=4: 16/16") != std::string::npos);
    CHECK(ok.out.find("VERIFY PASS") != std::string::npos);

    const CmdResult bad = run_cli("verify --inject-fault plr-sign", dir);
    CHECK(bad.exit_code == 2);
    CHECK(bad.out.find("fault injection active: plr-sign") != std::string::npos);
    CHECK(bad.out.find("VERIFY FAIL") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("chain simulation output is byte-identical across reruns and thread counts") {
    const fs::path dir = fresh_dir("determinism");
    const std::string common = "simulate --n-nodes 6 --trials 3000 --seed 31415 --mode fast";
    const fs::path a = dir / "a.csv";
    const fs::path b = dir / "b.csv";
    const fs::path c = dir / "c.csv";

    CHECK(run_cli(common + " --threads 1 --out \"" + a.string() + "\"", dir).exit_code == 0);
    CHECK(run_cli(common + " --threads 1 --out \"" + b.string() + "\"", dir).exit_code == 0);
    CHECK(run_cli(common + " --threads 4 --out \"" + c.string() + "\"", dir).exit_code == 0);

    const std::string bytes_a = slurp(a);
    CHECK(!bytes_a.empty());
    CHECK(bytes_a.rfind("trial,rounds_phase1,rounds_phase2,protocol_repeats,total_time_s,"
                        "end_state\n", 0) == 0);
    CHECK(bytes_a == slurp(b));
    CHECK(bytes_a == slurp(c));
    fs::remove_all(dir);
}

TEST_CASE("link-level simulation is deterministic and labels failure causes") {
    const fs::path dir = fresh_dir("link");
    const std::string common = "simulate --level link --trials 400 --seed 7";
    const fs::path a = dir / "a.csv";
    const fs::path b = dir / "b.csv";
    CHECK(run_cli(common + " --threads 2 --out \"" + a.string() + "\"", dir).exit_code == 0);
    const CmdResult second =
        run_cli(common + " --threads 3 --out \"" + b.string() + "\"", dir);
    CHECK(second.exit_code == 0);

    const std::string bytes = slurp(a);
    CHECK(bytes.rfind("trial,verdict,failure_cause,elapsed_s\n", 0) == 0);
    CHECK(bytes == slurp(b));
    // At the reference noise point the dominant outcome is a fiber-loss retry.
    CHECK(bytes.find("retry_a,fiber,") != std::string::npos);
    CHECK(second.out.find("# empirical_success_rate = ") != std::string::npos);
    CHECK(second.out.find("# count_fail_false_accept = 0") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("summary files are replayable as config files") {
    const fs::path dir = fresh_dir("summary");
    const fs::path first = dir / "first.csv";
    const fs::path second = dir / "second.csv";
    CHECK(run_cli("simulate --n-nodes 4 --trials 2000 --seed 99 --threads 2 --out \"" +
                      first.string() + "\"",
                  dir)
              .exit_code == 0);
    const fs::path summary = dir / "first.csv.summary";
    REQUIRE(fs::exists(summary));
    const std::string summary_text = slurp(summary);
    CHECK(summary_text.find("n_nodes = 4") != std::string::npos);
    CHECK(summary_text.find("seed = 99") != std::string::npos);
    CHECK(summary_text.find("# trials = 2000") != std::string::npos);

    // Feeding the summary back as a config reproduces the exact same run;
    // the '#' result lines are ignored as comments.
    CHECK(run_cli("simulate --config \"" + summary.string() + "\" --out \"" + second.string() +
                      "\"",
                  dir)
              .exit_code == 0);
    CHECK(slurp(first) == slurp(second));

    // The result comments (everything after the config block) also agree.
    const auto results_of = [](const std::string& text) {
        std::string acc;
        std::istringstream lines(text);
        std::string line;
        while (std::getline(lines, line))
            if (!line.empty() && line[0] == '#') acc += line + "\n";
        return acc;
    };
    CHECK(results_of(summary_text) == results_of(slurp(dir / "second.csv.summary")));
    fs::remove_all(dir);
}

TEST_CASE("figures subcommand writes the three plot series") {
    const fs::path dir = fresh_dir("figures");
    const fs::path out = dir / "plots";
    const CmdResult r = run_cli("figures --out \"" + out.string() + "\"", dir);
    CHECK(r.exit_code == 0);

    const std::string fig3 = slurp(out / "fig3.csv");
    CHECK(fig3.rfind("l_km,log10_direct_time_s,log10_protocol_time_s\n", 0) == 0);
    CHECK(fig3.find("\n2000,") != std::string::npos);

    const std::string figa1 = slurp(out / "figA1.csv");
    CHECK(figa1.rfind("n,p_k_p0_0.1,p_k_p0_0.2,p_k_p0_0.3\n", 0) == 0);

    const std::string figa2 = slurp(out / "figA2.csv");
    CHECK(figa2.rfind("n_nodes,n_bar_p0_0.1,two_n_max_p0_0.1,n_bar_p0_0.2,two_n_max_p0_0.2,"
                      "n_bar_p0_0.3,two_n_max_p0_0.3\n", 0) == 0);
    CHECK(figa2.find("\n64,") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("bad invocations exit with a nonzero status and a diagnostic") {
    const fs::path dir = fresh_dir("errors");

    // No subcommand.
    CHECK(run_cli("", dir).exit_code == 1);
    // Unknown flag.
    CHECK(run_cli("analytics --frobnicate", dir).exit_code == 1);
    // Disallowed enum value is rejected by the parser.
    CHECK(run_cli("simulate --mode turbo", dir).exit_code == 1);
    // Validation failures surface as errors, not crashes.
    CHECK(run_cli("simulate --trials 0", dir).exit_code == 1);
    CHECK(run_cli("simulate --n-nodes 1", dir).exit_code == 1);
    CHECK(run_cli("analytics --eta-ion 1.5", dir).exit_code == 1);

    // A malformed config names the offending line and produces no output file.
    const fs::path cfg = dir / "broken.cfg";
    {
        std::ofstream out(cfg, std::ios::binary);
        out << "n_nodes = 4\nl0_km 25\n";
    }
    const fs::path never = dir / "never.csv";
    const CmdResult r = run_cli(
        "simulate --config \"" + cfg.string() + "\" --out \"" + never.string() + "\"", dir);
    CHECK(r.exit_code == 1);
    CHECK(r.err.find(cfg.string() + ":2") != std::string::npos);
    CHECK(!fs::exists(never));

    // Missing config file.
    CHECK(run_cli("analytics --config /nonexistent/rydrep.cfg", dir).exit_code == 1);
    fs::remove_all(dir);
}
