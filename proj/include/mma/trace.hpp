#ifndef MMA_TRACE_HPP
#define MMA_TRACE_HPP

#include "mma/isa.hpp"
#include "mma/machine.hpp"

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mma {

// Straight-line trace programs.  One statement per line, '#' starts a
// comment, no control flow.  Statement forms:
//
//   vsr <idx> <fmt> = v0, v1, ...          typed register literal
//   vsr <idx> hex = <32 hex digits>        raw bytes, lane 0 first
//   vsr <idx> load = <path> [byte-offset]  16 bytes from a file
//   <mnemonic> acc<j>, vsr<x>, vsr<y>      rank-k update
//   <mnemonic> acc<j>, vsr<x>:vsr<x+1>, vsr<y>        (xvf64ger forms)
//   pm<mnemonic> ..., x=1010 y=1100 p=10   masked form, masks written
//                                          index-0-first, p omitted for k=1
//   xxsetaccz acc<j> | xxmtacc acc<j> | xxmfacc acc<j>
//   assemble acc<j>, vsr<a>, vsr<b>, vsr<c>, vsr<d>
//   disassemble acc<j>, vsr<a>, vsr<b>, vsr<c>, vsr<d>
//   dump acc<j> <layout>                   layout: fp64 | fp32 | int32
//   expect acc<j> <layout> = [[...], ...] tol=<real>

struct SetVsrStmt {
    int vsr = 0;
    bool hex = false;               // rendered back as a hex literal
    ElementFormat fmt = ElementFormat::Fp64; // meaningful when !hex
    Vsr128 value;
    bool operator==(const SetVsrStmt&) const = default;
};

struct LoadVsrStmt {
    int vsr = 0;
    std::string path;
    uint64_t offset = 0;
    bool operator==(const LoadVsrStmt&) const = default;
};

struct GerStmt {
    GerInstruction instr;
    bool operator==(const GerStmt&) const = default;
};

enum class MoveKind { SetAccZ, MoveTo, MoveFrom, Assemble, Disassemble };

struct MoveStmt {
    MoveKind kind = MoveKind::SetAccZ;
    int acc = 0;
    std::array<int, 4> vsrs{}; // assemble sources / disassemble destinations
    bool operator==(const MoveStmt&) const = default;
};

struct DumpStmt {
    int acc = 0;
    AccLayout layout = AccLayout::Fp32_4x4;
    bool operator==(const DumpStmt&) const = default;
};

struct ExpectStmt {
    int acc = 0;
    AccLayout layout = AccLayout::Fp32_4x4;
    std::array<std::array<double, 4>, 4> want{};
    double tol = 0.0;
    bool operator==(const ExpectStmt&) const = default;
};

using Statement = std::variant<SetVsrStmt, LoadVsrStmt, GerStmt, MoveStmt, DumpStmt, ExpectStmt>;

struct TraceProgram {
    std::vector<Statement> stmts;
    std::vector<int> lines; // source line per statement (1-based; 0 if synthetic)

    void push(Statement s, int line = 0) {
        stmts.push_back(std::move(s));
        lines.push_back(line);
    }
    bool operator==(const TraceProgram& o) const { return stmts == o.stmts; }
};

// Parse trace text.  Errors carry "line N:" in the message.
TraceProgram parse_trace(std::string_view text);

// Render a program back to trace text.  parse(render(p)) reproduces p
// statement for statement.
std::string render_trace(const TraceProgram& p);

// ---- Lint ----------------------------------------------------------------

enum class LintSeverity { Error, Warning };

struct LintDiag {
    int line = 0;
    LintSeverity severity = LintSeverity::Error;
    ErrCode code = ErrCode::SyntaxError;
    std::string message;
};

// Static lifecycle analysis of a straight-line program.  Error diagnostics
// predict exactly the statements a strict-mode run would reject: accumulator
// use before priming or after depriming, double xxmtacc, reads or writes of
// a register group frozen by a primed accumulator, and operands overlapping
// the target group.  Explicit xxmtacc/xxmfacc draw a style warning since
// assemble/disassemble express the same intent without aliasing surprises.
std::vector<LintDiag> lint_trace(const TraceProgram& p);

bool lint_has_error(const std::vector<LintDiag>& diags);

// ---- Run -----------------------------------------------------------------

struct ExpectFailure {
    int line = 0;
    int acc = 0;
    int row = 0;
    int col = 0;
    double got = 0.0;
    double want = 0.0;
    double tol = 0.0;
};

struct DumpRecord {
    int line = 0;
    int acc = 0;
    AccView view;
};

struct RunAbort {
    int line = 0;
    ErrCode code = ErrCode::SyntaxError;
    std::string message;
};

struct RunReport {
    bool pass = false;
    std::vector<ExpectFailure> failures;
    std::vector<DumpRecord> dumps;
    std::optional<RunAbort> abort;
    StatCounters stats;
};

// Apply one statement to machine state (throws MmaError on violation).
void apply_statement(MachineState& m, const Statement& s);

// Execute a program.  The first machine error aborts the run and is reported
// with its source line; expect mismatches are collected without aborting.
// pass == no abort and no failed expectation.
RunReport run_trace(const TraceProgram& p, MachineState& m);

} // namespace mma

#endif
