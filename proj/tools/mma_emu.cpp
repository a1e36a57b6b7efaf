#include "mma/checks.hpp"
#include "mma/json_io.hpp"
#include "mma/matrix_io.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace mma;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

std::string fmt_real(double v) {
    char buf[40];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MmaError(ErrCode::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw MmaError(ErrCode::IoError, "cannot write " + out_path);
    out << text;
}

std::string view_text(const AccView& v) {
    std::string s = "[";
    for (int r = 0; r < 4; r++) {
        s += r ? ", [" : "[";
        for (int c = 0; c < v.cols(); c++) {
            if (c) s += ", ";
            s += fmt_real(v.v[r][c]);
        }
        s += "]";
    }
    return s + "]";
}

std::string stats_text(const StatCounters& s) {
    std::string out = "instructions: " + std::to_string(s.total_instructions()) +
                      "  ger: " + std::to_string(s.ger_count) +
                      "  flops: " + std::to_string(s.flops) +
                      "  int_ops: " + std::to_string(s.int_ops) + "\n";
    for (const auto& [name, count] : s.instructions)
        out += "  " + name + ": " + std::to_string(count) + "\n";
    return out;
}

template <typename M>
std::string matrix_text(const M& m) {
    std::string s;
    for (int r = 0; r < m.rows; r++) {
        s += "[";
        for (int c = 0; c < m.cols; c++) {
            if (c) s += ", ";
            s += fmt_real((double)m.at(r, c));
        }
        s += "]\n";
    }
    return s;
}

struct RunOptions {
    std::string trace_path;
    std::string format = "text";
    std::string output;
    bool strict_on = false;
    bool strict_off = false;
    bool dump_machine = false;
};

int do_run(const RunOptions& opt, bool env_strict) {
    const bool strict = opt.strict_on ? true : (opt.strict_off ? false : env_strict);
    const TraceProgram prog = parse_trace(read_file(opt.trace_path));
    MachineState m(strict);
    const RunReport report = run_trace(prog, m);

    if (opt.format == "json") {
        Json j;
        j["trace"] = opt.trace_path;
        j["strict"] = strict;
        j.update(report_to_json(report));
        if (opt.dump_machine) j["machine"] = machine_to_json(m);
        emit(opt.output, j.dump(2) + "\n");
    } else {
        std::string s = "trace: " + opt.trace_path + "\n";
        s += std::string("mode: ") + (strict ? "strict" : "permissive") + "\n";
        s += std::string("status: ") + (report.pass ? "pass" : "fail") + "\n";
        for (const DumpRecord& d : report.dumps)
            s += "dump line " + std::to_string(d.line) + ": acc" + std::to_string(d.acc) + " " +
                 std::string(acc_layout_name(d.view.layout)) + " = " + view_text(d.view) + "\n";
        for (const ExpectFailure& f : report.failures)
            s += "expect line " + std::to_string(f.line) + ": acc" + std::to_string(f.acc) + "[" +
                 std::to_string(f.row) + "][" + std::to_string(f.col) + "] got " +
                 fmt_real(f.got) + " want " + fmt_real(f.want) + " tol " + fmt_real(f.tol) + "\n";
        if (report.abort)
            s += "abort line " + std::to_string(report.abort->line) + ": " +
                 std::string(err_name(report.abort->code)) + ": " + report.abort->message + "\n";
        s += stats_text(report.stats);
        if (opt.dump_machine) {
            for (int i = 0; i < 64; i++) {
                const Vsr128 v = m.peek_vsr(i);
                if (v != Vsr128{}) s += "vsr " + std::to_string(i) + " hex = " + to_hex(v) + "\n";
            }
            for (int a = 0; a < 8; a++)
                s += "acc" + std::to_string(a) + ": " +
                     std::string(acc_state_name(m.acc(a).state)) + "\n";
        }
        emit(opt.output, s);
    }
    return report.pass ? kExitPass : kExitFail;
}

struct LintOptions {
    std::string trace_path;
    std::string format = "text";
    std::string output;
};

int do_lint(const LintOptions& opt) {
    const TraceProgram prog = parse_trace(read_file(opt.trace_path));
    const std::vector<LintDiag> diags = lint_trace(prog);

    int errors = 0, warnings = 0;
    for (const LintDiag& d : diags) (d.severity == LintSeverity::Error ? errors : warnings)++;

    if (opt.format == "json") {
        Json j;
        j["trace"] = opt.trace_path;
        j["diagnostics"] = lint_to_json(diags);
        j["errors"] = errors;
        j["warnings"] = warnings;
        emit(opt.output, j.dump(2) + "\n");
    } else {
        std::string s;
        for (const LintDiag& d : diags) {
            const bool err = d.severity == LintSeverity::Error;
            s += "line " + std::to_string(d.line) + ": " + (err ? "error" : "warning");
            if (err) s += " [" + std::string(err_name(d.code)) + "]";
            s += " " + d.message + "\n";
        }
        s += std::to_string(errors) + " error(s), " + std::to_string(warnings) + " warning(s)\n";
        emit(opt.output, s);
    }
    return lint_has_error(diags) ? kExitFail : kExitPass;
}

struct DgemmOptions {
    std::string x_path, y_path;
    int random_n = 0;
    uint64_t seed = 1;
    bool verify = false;
    std::string emit_trace;
    std::string save_path;
    std::string format = "text";
    std::string output;
};

int do_dgemm(const DgemmOptions& opt) {
    MatrixF64 x, y;
    if (opt.random_n > 0) {
        SplitMix64 rng(opt.seed);
        x = random_dgemm_operand(rng, opt.random_n);
        y = random_dgemm_operand(rng, opt.random_n);
    } else {
        if (opt.x_path.empty() || opt.y_path.empty())
            throw MmaError(ErrCode::OperandError, "dgemm needs --x and --y, or --random N");
        x = load_matrix_f64(opt.x_path);
        y = load_matrix_f64(opt.y_path);
    }

    TraceProgram recorded;
    KernelReport rep;
    const MatrixF64 c = dgemm_kernel(x, y, &rep, opt.emit_trace.empty() ? nullptr : &recorded);
    if (!opt.emit_trace.empty()) emit(opt.emit_trace, render_trace(recorded));
    if (!opt.save_path.empty()) write_mmat(opt.save_path, c);

    bool verified = true;
    if (opt.verify) {
        const MatrixF64 want = dgemm_oracle(x, y);
        for (size_t i = 0; i < c.data.size(); i++)
            if (std::bit_cast<uint64_t>(c.data[i]) != std::bit_cast<uint64_t>(want.data[i]))
                verified = false;
    }

    if (opt.format == "json") {
        Json j;
        j["n"] = x.cols;
        j["result"] = matrix_to_json(c);
        j["stats"] = stats_to_json(rep.stats);
        j["all_deprimed"] = rep.all_deprimed;
        if (opt.verify) j["verified"] = verified;
        emit(opt.output, j.dump(2) + "\n");
    } else {
        std::string s = "dgemm: C[8][8] = X[8][" + std::to_string(x.cols) + "] * Y[8][" +
                        std::to_string(y.cols) + "]^T\n";
        s += matrix_text(c);
        s += stats_text(rep.stats);
        if (opt.verify)
            s += std::string("verified: ") + (verified ? "exact match" : "MISMATCH") + "\n";
        emit(opt.output, s);
    }
    return (!opt.verify || verified) ? kExitPass : kExitFail;
}

struct SconvOptions {
    std::string problem_path;
    bool random = false;
    uint64_t seed = 1;
    bool verify = false;
    std::string emit_trace;
    std::string save_path;
    std::string format = "text";
    std::string output;
};

int do_sconv(const SconvOptions& opt) {
    ConvProblem p;
    if (opt.random) {
        SplitMix64 rng(opt.seed);
        p = random_conv_problem(rng, /*positive_values=*/false);
    } else {
        if (opt.problem_path.empty())
            throw MmaError(ErrCode::OperandError, "sconv needs --problem FILE or --random");
        p = load_conv_problem(opt.problem_path);
    }

    TraceProgram recorded;
    KernelReport rep;
    const MatrixF32 c = sconv_kernel(p, &rep, opt.emit_trace.empty() ? nullptr : &recorded);
    if (!opt.emit_trace.empty()) emit(opt.emit_trace, render_trace(recorded));
    if (!opt.save_path.empty()) write_mmat(opt.save_path, c);

    bool verified = true;
    double max_err = 0.0;
    if (opt.verify) {
        const MatrixF32 want = conv_oracle_gemm(p);
        const MatrixF64 ref = naive_conv_oracle(p);
        for (size_t i = 0; i < c.data.size(); i++) {
            if (std::bit_cast<uint32_t>(c.data[i]) != std::bit_cast<uint32_t>(want.data[i]))
                verified = false;
            const double err =
                std::fabs((double)c.data[i] - ref.data[i]) / std::max(1.0, std::fabs(ref.data[i]));
            max_err = std::max(max_err, err);
        }
        if (max_err > 1e-5) verified = false;
    }

    if (opt.format == "json") {
        Json j;
        j["filters"] = p.h.rows;
        j["n"] = p.n;
        j["row"] = p.row;
        j["result"] = matrix_to_json(c);
        j["stats"] = stats_to_json(rep.stats);
        j["all_deprimed"] = rep.all_deprimed;
        if (opt.verify) {
            j["verified"] = verified;
            j["max_rel_err"] = max_err;
        }
        emit(opt.output, j.dump(2) + "\n");
    } else {
        std::string s = "sconv: " + std::to_string(p.h.rows) + " filter(s), window row " +
                        std::to_string(p.row) + ", n = " + std::to_string(p.n) + "\n";
        s += matrix_text(c);
        s += stats_text(rep.stats);
        if (opt.verify)
            s += std::string("verified: ") + (verified ? "pass" : "FAIL") +
                 " (max rel err " + fmt_real(max_err) + ")\n";
        emit(opt.output, s);
    }
    return (!opt.verify || verified) ? kExitPass : kExitFail;
}

struct VerifyOptions {
    uint64_t seed = 1;
    std::string format = "text";
    std::string output;
};

int do_checks(const VerifyOptions& opt, bool full) {
    CheckConfig cfg = full ? acceptance_config() : selftest_config();
    cfg.seed = opt.seed;
    const std::vector<CheckResult> results = run_all_checks(cfg);

    bool all = true;
    if (opt.format == "json") {
        Json j = Json::array();
        for (const CheckResult& r : results) {
            all = all && r.pass;
            j.push_back({{"name", r.name},
                         {"pass", r.pass},
                         {"trials", r.trials},
                         {"detail", r.detail}});
        }
        emit(opt.output, j.dump(2) + "\n");
    } else {
        std::string s;
        for (const CheckResult& r : results) {
            all = all && r.pass;
            s += std::string(r.pass ? "[PASS] " : "[FAIL] ") + r.name + " (" +
                 std::to_string(r.trials) + " trials): " + r.detail + "\n";
        }
        s += all ? "all checks passed\n" : "CHECKS FAILED\n";
        emit(opt.output, s);
    }
    return all ? kExitPass : kExitFail;
}

void add_output_options(CLI::App* cmd, std::string& format, std::string& output) {
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("-o,--output", output, "write the report to a file instead of stdout");
}

} // namespace

int main(int argc, char** argv) {
    bool env_strict = true;
    if (const char* e = std::getenv("MMA_EMU_STRICT"))
        if (std::string(e) == "0") env_strict = false;

    CLI::App app{"matrix-multiply assist emulator"};
    app.require_subcommand(1);

    RunOptions run_opt;
    CLI::App* run_cmd = app.add_subcommand("run", "execute a trace file");
    run_cmd->add_option("trace", run_opt.trace_path, "trace file")->required();
    run_cmd->add_flag("--strict", run_opt.strict_on, "abort on lifecycle violations (default)");
    run_cmd->add_flag("--no-strict", run_opt.strict_off,
                      "observe lifecycle violations instead of aborting");
    run_cmd->add_flag("--dump", run_opt.dump_machine, "also dump final machine state");
    add_output_options(run_cmd, run_opt.format, run_opt.output);

    LintOptions lint_opt;
    CLI::App* lint_cmd = app.add_subcommand("lint", "statically analyze a trace file");
    lint_cmd->add_option("trace", lint_opt.trace_path, "trace file")->required();
    add_output_options(lint_cmd, lint_opt.format, lint_opt.output);

    DgemmOptions dg_opt;
    CLI::App* dg_cmd = app.add_subcommand("dgemm", "run the 8x8 fp64 multiply kernel");
    dg_cmd->add_option("--x", dg_opt.x_path, "left operand (8xN .mmat or JSON)");
    dg_cmd->add_option("--y", dg_opt.y_path, "right operand (8xN .mmat or JSON)");
    dg_cmd->add_option("--random", dg_opt.random_n, "generate random 8xN operands")
        ->check(CLI::Range(1, 1 << 20));
    dg_cmd->add_option("--seed", dg_opt.seed, "random generator seed");
    dg_cmd->add_flag("--verify", dg_opt.verify, "compare against the scalar reference");
    dg_cmd->add_option("--emit-trace", dg_opt.emit_trace, "write the instruction trace to a file");
    dg_cmd->add_option("--save", dg_opt.save_path, "write the result matrix as .mmat");
    add_output_options(dg_cmd, dg_opt.format, dg_opt.output);

    SconvOptions sc_opt;
    CLI::App* sc_cmd = app.add_subcommand("sconv", "run the 3x3 RGB convolution kernel");
    sc_cmd->add_option("--problem", sc_opt.problem_path, "problem descriptor (JSON)");
    sc_cmd->add_flag("--random", sc_opt.random, "generate a random problem");
    sc_cmd->add_option("--seed", sc_opt.seed, "random generator seed");
    sc_cmd->add_flag("--verify", sc_opt.verify, "compare against the references");
    sc_cmd->add_option("--emit-trace", sc_opt.emit_trace, "write the instruction trace to a file");
    sc_cmd->add_option("--save", sc_opt.save_path, "write the result matrix as .mmat");
    add_output_options(sc_cmd, sc_opt.format, sc_opt.output);

    VerifyOptions ver_opt;
    CLI::App* ver_cmd = app.add_subcommand("verify", "run the full verification suites");
    ver_cmd->add_option("--seed", ver_opt.seed, "random generator seed");
    add_output_options(ver_cmd, ver_opt.format, ver_opt.output);

    VerifyOptions st_opt;
    CLI::App* st_cmd = app.add_subcommand("selftest", "run the verification suites, reduced counts");
    st_cmd->add_option("--seed", st_opt.seed, "random generator seed");
    add_output_options(st_cmd, st_opt.format, st_opt.output);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (*run_cmd) return do_run(run_opt, env_strict);
        if (*lint_cmd) return do_lint(lint_opt);
        if (*dg_cmd) return do_dgemm(dg_opt);
        if (*sc_cmd) return do_sconv(sc_opt);
        if (*ver_cmd) return do_checks(ver_opt, /*full=*/true);
        if (*st_cmd) return do_checks(st_opt, /*full=*/false);
    } catch (const MmaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code()) {
            case ErrCode::IoError: return kExitIo;
            case ErrCode::SyntaxError:
            case ErrCode::OperandError:
            case ErrCode::MaskWidthError:
            case ErrCode::UnknownMnemonic:
            case ErrCode::IllegalSuffix:
            case ErrCode::ShapeError: return kExitUsage;
            default: return kExitFail;
        }
    } catch (const Json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitUsage;
}
