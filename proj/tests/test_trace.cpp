#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mma/trace.hpp"

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

using namespace mma;

namespace {

template <class T>
T parse_one(const std::string& text) {
    TraceProgram p = parse_trace(text);
    REQUIRE(p.stmts.size() == 1);
    return std::get<T>(p.stmts[0]);
}

struct ParseErr {
    ErrCode code{};
    std::string detail;
};

ParseErr parse_err(const std::string& text) {
    try {
        parse_trace(text);
    } catch (const MmaError& e) {
        return {e.code(), e.detail()};
    }
    FAIL("expected a parse error for: ", text);
    return {};
}

std::filesystem::path temp_bytes_file(const char* name, int count) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    for (int i = 0; i < count; i++) out.put((char)(uint8_t)i);
    return path;
}

} // namespace

TEST_CASE("typed register literals parse into lanes") {
    auto s = parse_one<SetVsrStmt>("vsr 34 fp64 = 1.5, -2");
    CHECK(s.vsr == 34);
    CHECK(!s.hex);
    CHECK(s.fmt == ElementFormat::Fp64);
    CHECK(get_lane(s.value, ElementFormat::Fp64, 0) == std::bit_cast<uint64_t>(1.5));
    CHECK(get_lane(s.value, ElementFormat::Fp64, 1) == std::bit_cast<uint64_t>(-2.0));

    auto i = parse_one<SetVsrStmt>("vsr 0 int16 = -32768, -1, 0, 1, 2, 3, 4, 32767");
    CHECK(i.fmt == ElementFormat::Int16);
    CHECK(decode_int_lane(ElementFormat::Int16, get_lane(i.value, ElementFormat::Int16, 0)) ==
          -32768);
    CHECK(decode_int_lane(ElementFormat::Int16, get_lane(i.value, ElementFormat::Int16, 7)) ==
          32767);

    auto u = parse_one<SetVsrStmt>(
        "vsr 63 uint8 = 255, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14");
    CHECK(decode_int_lane(ElementFormat::Uint8, get_lane(u.value, ElementFormat::Uint8, 0)) == 255);
}

TEST_CASE("hex literals carry raw bytes, lane 0 first") {
    auto s = parse_one<SetVsrStmt>("vsr 3 hex = 00112233445566778899aabbccddeeff");
    CHECK(s.hex);
    CHECK(s.value.b[0] == 0x00);
    CHECK(s.value.b[1] == 0x11);
    CHECK(s.value.b[15] == 0xff);
}

TEST_CASE("parse errors name the offending line") {
    // Wrong lane count on line 3.
    auto e = parse_err("# setup\n\nvsr 32 fp32 = 1, 2, 3\n");
    CHECK(e.code == ErrCode::SyntaxError);
    CHECK(e.detail.starts_with("line 3:"));

    CHECK(parse_err("vsr 64 fp64 = 0, 0").code == ErrCode::OperandError);
    CHECK(parse_err("vsr 2 f8 = 1").code == ErrCode::SyntaxError);
    CHECK(parse_err("vsr 2 hex = 0011").code == ErrCode::SyntaxError);
    CHECK(parse_err("vsr 2 uint8 = -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0").code ==
          ErrCode::SyntaxError);
    CHECK(parse_err("frobnicate acc0").code == ErrCode::SyntaxError);
    CHECK(parse_err("dump acc8 fp32").code == ErrCode::OperandError);
    CHECK(parse_err("dump acc0 f32").code == ErrCode::SyntaxError);
    CHECK(parse_err("xxsetaccz acc0, acc1").code == ErrCode::SyntaxError);
    CHECK(parse_err("assemble acc0, vsr1, vsr2, vsr3").code == ErrCode::SyntaxError);
}

TEST_CASE("comments and blank lines keep source line numbers") {
    TraceProgram p = parse_trace("# comment\n\nvsr 32 fp64 = 1, 2\nxxsetaccz acc0 # zero\n");
    REQUIRE(p.stmts.size() == 2);
    CHECK(p.lines[0] == 3);
    CHECK(p.lines[1] == 4);
    CHECK(std::get<MoveStmt>(p.stmts[1]).kind == MoveKind::SetAccZ);
}

TEST_CASE("rank-k statements parse operands and masks") {
    auto g = parse_one<GerStmt>("xvf32ger acc0, vsr32, vsr36");
    CHECK(g.instr.family == GerFamily::F32GER);
    CHECK(g.instr.mode == AccumulateMode::None);
    CHECK(g.instr.acc == 0);
    CHECK(g.instr.x_vsr == 32);
    CHECK(g.instr.y_vsr == 36);
    CHECK(!g.instr.masks);

    auto d = parse_one<GerStmt>("xvf64gernp acc1, vsr34:vsr35, vsr40");
    CHECK(d.instr.family == GerFamily::F64GER);
    CHECK(d.instr.mode == AccumulateMode::NP);
    CHECK(d.instr.x_vsr == 34);

    auto m = parse_one<GerStmt>("pmxvi16ger2 acc2, vsr44, vsr45, x=1010 y=1100 p=10");
    REQUIRE(m.instr.masks.has_value());
    CHECK(m.instr.masks->x == 0b0101); // mask strings are index-0-first
    CHECK(m.instr.masks->y == 0b0011);
    CHECK(m.instr.masks->p == 0b01);

    // Rank-1 pm forms take no p mask; the implied product mask is enabled.
    auto r1 = parse_one<GerStmt>("pmxvf32ger acc3, vsr46, vsr47, x=0001 y=1000");
    REQUIRE(r1.instr.masks.has_value());
    CHECK(r1.instr.masks->x == 0b1000);
    CHECK(r1.instr.masks->y == 0b0001);
    CHECK(r1.instr.masks->p == 0b1);
}

TEST_CASE("rank-k statement syntax violations") {
    CHECK(parse_err("xvf32ger acc0, vsr32").code == ErrCode::SyntaxError);
    CHECK(parse_err("xvf32ger acc0, vsr32, vsr36, vsr37, vsr38").code == ErrCode::SyntaxError);
    CHECK(parse_err("xvfooger acc0, vsr32, vsr36").code == ErrCode::UnknownMnemonic);
    CHECK(parse_err("xvf32gers acc0, vsr32, vsr36").code == ErrCode::IllegalSuffix);

    // xvf64ger x operands are written as an explicit even:odd pair.
    CHECK(parse_err("xvf64ger acc0, vsr34, vsr40").code == ErrCode::OperandError);
    CHECK(parse_err("xvf64ger acc0, vsr33:vsr34, vsr40").code == ErrCode::OperandError);
    CHECK(parse_err("xvf64ger acc0, vsr34:vsr36, vsr40").code == ErrCode::OperandError);
    CHECK(parse_err("xvf32ger acc0, vsr32:vsr33, vsr36").code == ErrCode::OperandError);

    // Mask field rules.
    CHECK(parse_err("xvf32ger acc0, vsr32, vsr36, x=1111 y=1111").code == ErrCode::SyntaxError);
    CHECK(parse_err("pmxvi16ger2 acc0, vsr32, vsr36").code == ErrCode::SyntaxError);
    CHECK(parse_err("pmxvi16ger2 acc0, vsr32, vsr36, x=1111 y=1111").code == ErrCode::SyntaxError);
    CHECK(parse_err("pmxvi16ger2 acc0, vsr32, vsr36, x=101 y=1111 p=11").code ==
          ErrCode::MaskWidthError);
    CHECK(parse_err("pmxvi16ger2 acc0, vsr32, vsr36, x=1111 y=1111 z=1 p=11").code ==
          ErrCode::SyntaxError);
    CHECK(parse_err("pmxvf32ger acc0, vsr32, vsr36, x=1111 y=1111 p=1").code ==
          ErrCode::MaskWidthError);
}

TEST_CASE("expect statements parse layout, matrix and tolerance") {
    auto e = parse_one<ExpectStmt>("expect acc0 fp64 = [[1, 2], [3, 4], [5, 6], [7, 8]] tol=0.5");
    CHECK(e.acc == 0);
    CHECK(e.layout == AccLayout::Fp64_4x2);
    CHECK(e.want[0][0] == 1.0);
    CHECK(e.want[3][1] == 8.0);
    CHECK(e.tol == 0.5);

    auto z = parse_one<ExpectStmt>("expect acc1 fp64 = [[1, 2], [3, 4], [5, 6], [7, 8]]");
    CHECK(z.tol == 0.0);

    auto i = parse_one<ExpectStmt>(
        "expect acc2 int32 = [[1, 2, 3, 4], [5, 6, 7, 8], [9, 10, 11, 12], [-1, -2, -3, -4]] "
        "tol=0");
    CHECK(i.layout == AccLayout::Int32_4x4);
    CHECK(i.want[3][0] == -1.0);

    CHECK(parse_err("expect acc0 int32 = [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]] "
                    "tol=1")
              .code == ErrCode::SyntaxError);
    CHECK(parse_err("expect acc0 fp64 = [[1, 2], [3, 4], [5, 6], [7, 8]] tol=-1").code ==
          ErrCode::SyntaxError);
    CHECK(parse_err("expect acc0 fp64 = [[1, 2], [3, 4], [5, 6], [7, 8]] tol=nan").code ==
          ErrCode::SyntaxError);
    CHECK(parse_err("expect acc0 fp64 = [[1, 2], [3, 4], [5, 6]] tol=0").code ==
          ErrCode::SyntaxError);
    CHECK(parse_err("expect acc0 fp64 = [[1, 2, 3], [3, 4, 5], [5, 6, 7], [7, 8, 9]] tol=0")
              .code == ErrCode::SyntaxError);
    CHECK(parse_err("expect acc0 fp64 = 1, 2 tol=0").code == ErrCode::SyntaxError);
}

TEST_CASE("render and reparse reproduces every statement form") {
    const std::string text =
        "vsr 0 hex = 00112233445566778899aabbccddeeff\n"
        "vsr 32 fp32 = 1.5, -0.25, 3, 4\n"
        "vsr 33 int8 = -128, -1, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 127\n"
        "vsr 5 load = /tmp/regs.bin\n"
        "vsr 6 load = /tmp/regs.bin 16\n"
        "xvf32ger acc0, vsr32, vsr36\n"
        "xvf64gernp acc1, vsr34:vsr35, vsr40\n"
        "pmxvi8ger4spp acc2, vsr44, vsr45, x=1010 y=0110 p=1011\n"
        "pmxvf32ger acc3, vsr46, vsr47, x=0001 y=1000\n"
        "xvi16ger2s acc4, vsr48, vsr49\n"
        "xxsetaccz acc5\n"
        "xxmtacc acc6\n"
        "xxmfacc acc6\n"
        "assemble acc7, vsr50, vsr51, vsr52, vsr53\n"
        "disassemble acc7, vsr54, vsr55, vsr56, vsr57\n"
        "dump acc0 fp32\n"
        "dump acc1 fp64\n"
        "expect acc0 fp32 = [[1, 2, 3, 4], [5, 6, 7, 8], [9, 10, 11, 12], [13, 14, 15, 16]] "
        "tol=0.25\n"
        "expect acc2 int32 = [[1, 2, 3, 4], [5, 6, 7, 8], [9, 10, 11, 12], [13, 14, 15, 16]] "
        "tol=0\n";
    TraceProgram p = parse_trace(text);
    REQUIRE(p.stmts.size() == 19);
    TraceProgram q = parse_trace(render_trace(p));
    CHECK(q == p);
    CHECK(render_trace(q) == render_trace(p));
}

TEST_CASE("lint reports lifecycle violations with statement lines") {
    SUBCASE("accumulate before priming") {
        auto d = lint_trace(parse_trace("vsr 32 fp32 = 1, 2, 3, 4\nxvf32gerpp acc0, vsr32, vsr36"));
        REQUIRE(d.size() == 1);
        CHECK(d[0].severity == LintSeverity::Error);
        CHECK(d[0].code == ErrCode::AccNotPrimed);
        CHECK(d[0].line == 2);
        CHECK(d[0].message.find("never primed") != std::string::npos);
    }
    SUBCASE("use after depriming") {
        auto d = lint_trace(parse_trace("xvf32ger acc1, vsr32, vsr36\n"
                                        "disassemble acc1, vsr4, vsr5, vsr6, vsr7\n"
                                        "dump acc1 fp32"));
        REQUIRE(d.size() == 1);
        CHECK(d[0].code == ErrCode::AccNotPrimed);
        CHECK(d[0].line == 3);
        CHECK(d[0].message.find("deprimed") != std::string::npos);
    }
    SUBCASE("write into a frozen group") {
        auto d = lint_trace(parse_trace("xvf32ger acc0, vsr32, vsr36\nvsr 1 fp32 = 0, 0, 0, 0"));
        REQUIRE(d.size() == 1);
        CHECK(d[0].code == ErrCode::VsrLocked);
        CHECK(d[0].line == 2);
    }
    SUBCASE("operand overlapping the target group") {
        auto d = lint_trace(parse_trace("xvf32ger acc0, vsr2, vsr36"));
        REQUIRE(d.size() == 1);
        CHECK(d[0].code == ErrCode::OperandOverlapsAccumulator);
        CHECK(d[0].line == 1);
    }
    SUBCASE("xxmtacc and xxmfacc draw style warnings") {
        auto d = lint_trace(parse_trace("xxmtacc acc0\nxxmfacc acc0"));
        REQUIRE(d.size() == 2);
        CHECK(d[0].severity == LintSeverity::Warning);
        CHECK(d[0].message.find("assemble") != std::string::npos);
        CHECK(d[1].severity == LintSeverity::Warning);
        CHECK(d[1].message.find("disassemble") != std::string::npos);
        CHECK(!lint_has_error(d));
    }
    SUBCASE("double xxmtacc is an error") {
        auto d = lint_trace(parse_trace("xxmtacc acc0\nxxmtacc acc0"));
        CHECK(lint_has_error(d));
        bool found = false;
        for (const auto& diag : d)
            if (diag.severity == LintSeverity::Error) {
                CHECK(diag.code == ErrCode::AccAlreadyPrimed);
                CHECK(diag.line == 2);
                found = true;
            }
        CHECK(found);
    }
    SUBCASE("clean program has no diagnostics") {
        auto d = lint_trace(parse_trace("vsr 32 fp32 = 1, 2, 3, 4\n"
                                        "vsr 36 fp32 = 1, 0, 0, 0\n"
                                        "xvf32ger acc0, vsr32, vsr36\n"
                                        "xvf32gerpp acc0, vsr32, vsr36\n"
                                        "dump acc0 fp32\n"
                                        "disassemble acc0, vsr0, vsr1, vsr2, vsr3\n"
                                        "vsr 0 fp32 = 0, 0, 0, 0"));
        CHECK(d.empty());
    }
    SUBCASE("synthetic program with a bad register pair") {
        TraceProgram p;
        GerStmt g;
        g.instr.family = GerFamily::F64GER;
        g.instr.acc = 0;
        g.instr.x_vsr = 33;
        g.instr.y_vsr = 40;
        p.push(g);
        auto d = lint_trace(p);
        REQUIRE(!d.empty());
        CHECK(d[0].code == ErrCode::InvalidVsrPair);
    }
}

TEST_CASE("run_trace computes, dumps and checks expectations") {
    const std::string text = "vsr 32 fp64 = 1, 2\n"
                             "vsr 33 fp64 = 3, 4\n"
                             "vsr 36 fp64 = 10, 20\n"
                             "xvf64ger acc0, vsr32:vsr33, vsr36\n"
                             "dump acc0 fp64\n"
                             "expect acc0 fp64 = [[10, 20], [20, 40], [30, 60], [40, 80]] tol=0\n";
    MachineState m(true);
    RunReport r = run_trace(parse_trace(text), m);
    CHECK(r.pass);
    CHECK(!r.abort);
    CHECK(r.failures.empty());
    REQUIRE(r.dumps.size() == 1);
    CHECK(r.dumps[0].line == 5);
    CHECK(r.dumps[0].acc == 0);
    CHECK(r.dumps[0].view.layout == AccLayout::Fp64_4x2);
    CHECK(r.dumps[0].view.v[2][1] == 60.0);
    CHECK(r.stats.ger_count == 1);
    CHECK(r.stats.flops == 16);
    CHECK(r.stats.instructions.at("xvf64ger") == 1);
}

TEST_CASE("failed expectations are collected without stopping the run") {
    const std::string text =
        "vsr 32 fp64 = 1, 2\n"
        "vsr 33 fp64 = 3, 4\n"
        "vsr 36 fp64 = 10, 20\n"
        "xvf64ger acc0, vsr32:vsr33, vsr36\n"
        "expect acc0 fp64 = [[11, 20], [20, 40], [30, 60], [40, 80]] tol=0\n"
        "expect acc0 fp64 = [[10, 20], [20, 40], [30, 60], [40, 81]] tol=0.5\n"
        "dump acc0 fp64\n";
    MachineState m(true);
    RunReport r = run_trace(parse_trace(text), m);
    CHECK(!r.pass);
    CHECK(!r.abort);
    REQUIRE(r.failures.size() == 2);
    CHECK(r.failures[0].line == 5);
    CHECK(r.failures[0].row == 0);
    CHECK(r.failures[0].col == 0);
    CHECK(r.failures[0].got == 10.0);
    CHECK(r.failures[0].want == 11.0);
    CHECK(r.failures[1].line == 6);
    CHECK(r.failures[1].row == 3);
    CHECK(r.failures[1].col == 1);
    CHECK(r.failures[1].tol == 0.5);
    CHECK(r.dumps.size() == 1); // statements after a failed expect still ran
}

TEST_CASE("the first machine error aborts a strict run") {
    const std::string text = "vsr 32 fp32 = 1, 2, 3, 4\n"
                             "xvf32ger acc0, vsr32, vsr36\n"
                             "vsr 1 fp32 = 0, 0, 0, 0\n"
                             "dump acc0 fp32\n";
    TraceProgram p = parse_trace(text);

    MachineState strict(true);
    RunReport r = run_trace(p, strict);
    CHECK(!r.pass);
    REQUIRE(r.abort.has_value());
    CHECK(r.abort->line == 3);
    CHECK(r.abort->code == ErrCode::VsrLocked);
    CHECK(r.dumps.empty()); // nothing past the abort executes

    MachineState loose(false);
    RunReport ok = run_trace(p, loose);
    CHECK(ok.pass);
    CHECK(!ok.abort);
    CHECK(ok.dumps.size() == 1);
}

TEST_CASE("expect on an unprimed accumulator aborts") {
    MachineState m(true);
    RunReport r = run_trace(
        parse_trace("expect acc0 fp32 = [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]] "
                    "tol=0"),
        m);
    REQUIRE(r.abort.has_value());
    CHECK(r.abort->line == 1);
    CHECK(r.abort->code == ErrCode::AccNotPrimed);
}

TEST_CASE("load statements read register bytes from files") {
    auto path = temp_bytes_file("mma_trace_load.bin", 32);
    auto s = parse_one<LoadVsrStmt>("vsr 9 load = data.bin 32");
    CHECK(s.vsr == 9);
    CHECK(s.path == "data.bin");
    CHECK(s.offset == 32);

    const std::string text = "vsr 5 load = " + path.string() + "\n" + //
                             "vsr 6 load = " + path.string() + " 16\n";
    MachineState m(true);
    RunReport r = run_trace(parse_trace(text), m);
    CHECK(r.pass);
    CHECK(m.peek_vsr(5).b[0] == 0);
    CHECK(m.peek_vsr(5).b[15] == 15);
    CHECK(m.peek_vsr(6).b[0] == 16);
    CHECK(m.peek_vsr(6).b[15] == 31);

    MachineState m2(true);
    RunReport shortr = run_trace(parse_trace("vsr 5 load = " + path.string() + " 20"), m2);
    REQUIRE(shortr.abort.has_value());
    CHECK(shortr.abort->code == ErrCode::IoError);
    CHECK(shortr.abort->line == 1);

    MachineState m3(true);
    RunReport missing = run_trace(parse_trace("vsr 5 load = /nonexistent/mma-regs.bin"), m3);
    REQUIRE(missing.abort.has_value());
    CHECK(missing.abort->code == ErrCode::IoError);
    std::filesystem::remove(path);
}
