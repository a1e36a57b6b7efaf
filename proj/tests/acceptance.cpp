// Acceptance harness: one line per criterion, exit 0 only if all pass.
//
//   acceptance <path-to-mma_emu> <traces-dir>
//
// Criteria 1-7 run the full verification suites in-process; criterion 8
// drives the command-line tool end to end over the bundled traces.
#include "mma/checks.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace mma;

namespace {

int criteria_passed = 0;

void report(int id, bool pass, const std::string& detail) {
    std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL") << "  " << detail << "\n"
              << std::flush;
    if (pass) criteria_passed++;
}

void run_check(int id, CheckResult (*fn)(const CheckConfig&), const CheckConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult r = fn(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream line;
    line << r.name << " (" << r.trials << " trials, " << (int)(secs * 10) / 10.0 << "s)";
    if (!r.pass) line << ": " << r.detail;
    report(id, r.pass, line.str());
}

int exit_code_of(const std::string& cmd) {
    const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
    if (status == -1 || !WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CliHarness {
    std::string emu;    // quoted emulator path
    std::string traces; // traces directory
    int steps = 0;
    std::string fails;

    std::string trace(const char* name) const { return "\"" + traces + "/" + name + "\""; }

    void expect_exit(const std::string& cmd, int want) {
        steps++;
        const int got = exit_code_of(cmd);
        if (got != want)
            fails += "[" + cmd + "] exited " + std::to_string(got) + ", want " +
                     std::to_string(want) + "; ";
    }

    void expect_same_bytes(const std::filesystem::path& a, const std::filesystem::path& b) {
        steps++;
        const std::string sa = read_file(a), sb = read_file(b);
        if (sa.empty() || sa != sb)
            fails += "[" + a.string() + " vs " + b.string() + "] outputs differ; ";
    }

    void expect_contains(const std::filesystem::path& p, const std::string& needle) {
        steps++;
        if (read_file(p).find(needle) == std::string::npos)
            fails += "[" + p.string() + "] missing \"" + needle + "\"; ";
    }
};

void run_cli_criterion(const std::string& emu_path, const std::string& traces_dir) {
    CliHarness h{"\"" + emu_path + "\"", traces_dir};
    const auto tmp = std::filesystem::temp_directory_path();

    // Bundled traces behave as documented.
    h.expect_exit(h.emu + " run " + h.trace("outer_product.mma"), 0);
    h.expect_exit(h.emu + " run " + h.trace("masked.mma"), 0);
    h.expect_exit(h.emu + " run " + h.trace("int_saturate.mma"), 0);
    h.expect_exit(h.emu + " run " + h.trace("mixed_moves.mma"), 0);
    h.expect_exit(h.emu + " run " + h.trace("expect_fail.mma"), 1);

    // Strict is the default; the environment and flags override it.
    h.expect_exit(h.emu + " run " + h.trace("lifecycle_error.mma"), 1);
    h.expect_exit("MMA_EMU_STRICT=0 " + h.emu + " run " + h.trace("lifecycle_error.mma"), 0);
    h.expect_exit("MMA_EMU_STRICT=0 " + h.emu + " run --strict " + h.trace("lifecycle_error.mma"),
                  1);
    h.expect_exit(h.emu + " run --no-strict " + h.trace("lifecycle_error.mma"), 0);

    // Usage and I/O failures keep their own exit codes.
    h.expect_exit(h.emu + " run \"" + traces_dir + "/no_such_trace.mma\"", 3);
    h.expect_exit(h.emu + " frobnicate", 2);
    h.expect_exit(h.emu + " run", 2);
    const auto bad = tmp / "mma_acc_bad.mma";
    std::ofstream(bad) << "frobnicate acc0\n";
    h.expect_exit(h.emu + " run \"" + bad.string() + "\"", 2);

    // Lint exit reflects error diagnostics only.
    h.expect_exit(h.emu + " lint " + h.trace("lifecycle_error.mma"), 1);
    h.expect_exit(h.emu + " lint " + h.trace("outer_product.mma"), 0);

    // Determinism: the same seed gives byte-identical reports.
    const auto a = tmp / "mma_acc_a.json", b = tmp / "mma_acc_b.json";
    h.expect_exit(h.emu + " dgemm --random 64 --seed 9 --format json -o \"" + a.string() + "\"", 0);
    h.expect_exit(h.emu + " dgemm --random 64 --seed 9 --format json -o \"" + b.string() + "\"", 0);
    h.expect_same_bytes(a, b);

    const auto r1 = tmp / "mma_acc_r1.json", r2 = tmp / "mma_acc_r2.json";
    h.expect_exit(h.emu + " run " + h.trace("outer_product.mma") + " --format json -o \"" +
                      r1.string() + "\"",
                  0);
    h.expect_exit(h.emu + " run " + h.trace("outer_product.mma") + " --format json -o \"" +
                      r2.string() + "\"",
                  0);
    h.expect_same_bytes(r1, r2);

    // Counter contract visible through the CLI: 8N rank-k updates.
    const auto big = tmp / "mma_acc_big.json";
    h.expect_exit(h.emu + " dgemm --random 128 --seed 3 --format json -o \"" + big.string() + "\"",
                  0);
    h.expect_contains(big, "\"ger_instructions\": 1024");

    // Self-verifying kernel modes and the reduced suite.
    h.expect_exit(h.emu + " dgemm --random 4 --seed 7 --verify", 0);
    h.expect_exit(h.emu + " sconv --random --seed 5 --verify", 0);
    h.expect_exit(h.emu + " selftest --seed 2", 0);

    for (const auto& p : {bad, a, b, r1, r2, big}) std::filesystem::remove(p);

    std::ostringstream line;
    line << "cli exit codes and determinism (" << h.steps << " steps)";
    if (!h.fails.empty()) line << ": " << h.fails;
    report(8, h.fails.empty(), line.str());
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: acceptance <mma_emu> <traces-dir>\n";
        return 2;
    }

    const CheckConfig cfg = acceptance_config();
    run_check(1, check_integer_oracle, cfg);
    run_check(2, check_mask_laws, cfg);
    run_check(3, check_sign_algebra, cfg);
    run_check(4, check_lint_lifecycle, cfg);
    run_check(5, check_dgemm, cfg);
    run_check(6, check_sconv, cfg);
    run_check(7, check_numerics_roundtrip, cfg);
    run_cli_criterion(argv[1], argv[2]);

    std::cout << (criteria_passed == 8 ? "acceptance: all 8 criteria passed"
                                       : "acceptance: FAILED")
              << " (" << criteria_passed << "/8)\n";
    return criteria_passed == 8 ? 0 : 1;
}
