#include "mma/trace.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mma {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    size_t start = 0;
    for (size_t i = 0; i <= s.size(); i++) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

std::vector<std::string_view> words(std::string_view s) {
    std::vector<std::string_view> out;
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) i++;
        size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') i++;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

int64_t parse_int_token(std::string_view tok, std::string_view what) {
    int64_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
        throw MmaError(ErrCode::SyntaxError,
                       "expected " + std::string(what) + ", got \"" + std::string(tok) + "\"");
    return v;
}

double parse_real_token(std::string_view tok) {
    double v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
        throw MmaError(ErrCode::SyntaxError, "bad numeric literal \"" + std::string(tok) + "\"");
    return v;
}

int parse_vsr_token(std::string_view tok) {
    if (!tok.starts_with("vsr"))
        throw MmaError(ErrCode::SyntaxError, "expected vsr operand, got \"" + std::string(tok) + "\"");
    int64_t idx = parse_int_token(tok.substr(3), "vsr index");
    if (idx < 0 || idx > 63)
        throw MmaError(ErrCode::OperandError, "vsr index out of range: " + std::string(tok));
    return (int)idx;
}

int parse_acc_token(std::string_view tok) {
    if (!tok.starts_with("acc"))
        throw MmaError(ErrCode::SyntaxError, "expected acc operand, got \"" + std::string(tok) + "\"");
    int64_t idx = parse_int_token(tok.substr(3), "acc index");
    if (idx < 0 || idx > 7)
        throw MmaError(ErrCode::OperandError, "acc index out of range: " + std::string(tok));
    return (int)idx;
}

std::string real_str(double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

SetVsrStmt parse_set_vsr(std::string_view rest) {
    // <idx> <fmt|hex> = payload   or   <idx> load = <path> [offset]
    size_t eq = rest.find('=');
    if (eq == std::string_view::npos)
        throw MmaError(ErrCode::SyntaxError, "vsr statement needs '='");
    auto head = words(rest.substr(0, eq));
    std::string_view payload = trim(rest.substr(eq + 1));
    if (head.size() != 2)
        throw MmaError(ErrCode::SyntaxError, "expected: vsr <index> <format> = ...");
    int64_t idx = parse_int_token(head[0], "vsr index");
    if (idx < 0 || idx > 63)
        throw MmaError(ErrCode::OperandError, "vsr index out of range: " + std::to_string(idx));

    SetVsrStmt s;
    s.vsr = (int)idx;
    if (head[1] == "hex") {
        s.hex = true;
        s.value = vsr_from_hex(payload);
        return s;
    }
    auto fmt = parse_format(head[1]);
    if (!fmt)
        throw MmaError(ErrCode::SyntaxError, "unknown register format \"" + std::string(head[1]) + "\"");
    s.fmt = *fmt;
    auto vals = split(payload, ',');
    const int lanes = lanes_per_vsr(s.fmt);
    if ((int)vals.size() != lanes)
        throw MmaError(ErrCode::SyntaxError, std::string(format_name(s.fmt)) + " literal needs " +
                                                 std::to_string(lanes) + " lane values, got " +
                                                 std::to_string(vals.size()));
    for (int lane = 0; lane < lanes; lane++) {
        if (is_integer_format(s.fmt)) {
            int64_t v = parse_int_token(vals[lane], "integer lane value");
            if (v < int_format_min(s.fmt) || v > int_format_max(s.fmt))
                throw MmaError(ErrCode::SyntaxError,
                               "lane value " + std::to_string(v) + " out of range for " +
                                   std::string(format_name(s.fmt)));
            set_lane(s.value, s.fmt, lane, encode_int_lane(s.fmt, v));
        } else {
            set_lane(s.value, s.fmt, lane, encode_real_lane(s.fmt, parse_real_token(vals[lane])));
        }
    }
    return s;
}

LoadVsrStmt parse_load_vsr(std::string_view rest) {
    size_t eq = rest.find('=');
    auto head = words(rest.substr(0, eq));
    auto tail = words(trim(rest.substr(eq + 1)));
    if (tail.empty() || tail.size() > 2)
        throw MmaError(ErrCode::SyntaxError, "expected: vsr <index> load = <path> [offset]");
    LoadVsrStmt s;
    int64_t idx = parse_int_token(head[0], "vsr index");
    if (idx < 0 || idx > 63)
        throw MmaError(ErrCode::OperandError, "vsr index out of range: " + std::to_string(idx));
    s.vsr = (int)idx;
    s.path = std::string(tail[0]);
    s.offset = tail.size() == 2 ? (uint64_t)parse_int_token(tail[1], "byte offset") : 0;
    return s;
}

GerStmt parse_ger(std::string_view mnemonic, std::string_view rest) {
    DecodedMnemonic dec = decode_mnemonic(mnemonic);
    const FamilyInfo& info = family_info(dec.family);

    auto fields = split(rest, ',');
    const size_t base_fields = 3;
    if (fields.size() < base_fields)
        throw MmaError(ErrCode::SyntaxError, "expected: <mnemonic> acc<j>, vsr<x>, vsr<y>");
    if (fields.size() > base_fields + 1)
        throw MmaError(ErrCode::SyntaxError, "too many operands");

    GerStmt g;
    g.instr.family = dec.family;
    g.instr.mode = dec.mode;
    g.instr.acc = parse_acc_token(fields[0]);

    std::string_view xtok = fields[1];
    if (dec.family == GerFamily::F64GER) {
        size_t colon = xtok.find(':');
        if (colon == std::string_view::npos)
            throw MmaError(ErrCode::OperandError,
                           "xvf64ger x operand must be an even:odd pair, e.g. vsr34:vsr35");
        int lo = parse_vsr_token(trim(xtok.substr(0, colon)));
        int hi = parse_vsr_token(trim(xtok.substr(colon + 1)));
        if ((lo & 1) || hi != lo + 1)
            throw MmaError(ErrCode::OperandError, "x operand must be written vsrE:vsrE+1 with E even");
        g.instr.x_vsr = lo;
    } else {
        if (xtok.find(':') != std::string_view::npos)
            throw MmaError(ErrCode::OperandError, "register pair operand is only valid for xvf64ger");
        g.instr.x_vsr = parse_vsr_token(xtok);
    }
    g.instr.y_vsr = parse_vsr_token(fields[2]);

    if (dec.prefixed) {
        if (fields.size() != base_fields + 1)
            throw MmaError(ErrCode::SyntaxError, "pm form needs mask operands, e.g. x=1111 y=1111");
        MaskSet ms = all_ones_masks(dec.family);
        bool seen_x = false, seen_y = false, seen_p = false;
        for (std::string_view w : words(fields[base_fields])) {
            if (w.starts_with("x=")) {
                ms.x = mask_from_string(w.substr(2), 4);
                seen_x = true;
            } else if (w.starts_with("y=")) {
                ms.y = mask_from_string(w.substr(2), info.y_rows);
                seen_y = true;
            } else if (w.starts_with("p=")) {
                if (info.p_mask_width == 0)
                    throw MmaError(ErrCode::MaskWidthError,
                                   "rank-1 families take no product mask");
                ms.p = mask_from_string(w.substr(2), info.p_mask_width);
                seen_p = true;
            } else {
                throw MmaError(ErrCode::SyntaxError, "bad mask operand \"" + std::string(w) + "\"");
            }
        }
        if (!seen_x || !seen_y || (info.p_mask_width > 0 && !seen_p))
            throw MmaError(ErrCode::SyntaxError, "pm form needs x=, y=" +
                                                     std::string(info.p_mask_width ? ", p= masks" : " masks"));
        g.instr.masks = ms;
    } else if (fields.size() != base_fields) {
        throw MmaError(ErrCode::SyntaxError, "masks are only valid on pm-prefixed forms");
    }
    return g;
}

MoveStmt parse_move(std::string_view head, std::string_view rest) {
    MoveStmt s;
    if (head == "xxsetaccz" || head == "xxmtacc" || head == "xxmfacc") {
        s.kind = head == "xxsetaccz" ? MoveKind::SetAccZ
                 : head == "xxmtacc" ? MoveKind::MoveTo
                                     : MoveKind::MoveFrom;
        auto fields = split(rest, ',');
        if (fields.size() != 1)
            throw MmaError(ErrCode::SyntaxError, std::string(head) + " takes one accumulator operand");
        s.acc = parse_acc_token(fields[0]);
        return s;
    }
    s.kind = head == "assemble" ? MoveKind::Assemble : MoveKind::Disassemble;
    auto fields = split(rest, ',');
    if (fields.size() != 5)
        throw MmaError(ErrCode::SyntaxError,
                       std::string(head) + " takes acc<j> and four vsr operands");
    s.acc = parse_acc_token(fields[0]);
    for (int i = 0; i < 4; i++) s.vsrs[i] = parse_vsr_token(fields[i + 1]);
    return s;
}

AccLayout parse_layout_token(std::string_view tok) {
    auto layout = parse_acc_layout(tok);
    if (!layout)
        throw MmaError(ErrCode::SyntaxError, "unknown accumulator layout \"" + std::string(tok) +
                                                 "\" (want fp64, fp32 or int32)");
    return *layout;
}

DumpStmt parse_dump(std::string_view rest) {
    auto w = words(rest);
    if (w.size() != 2)
        throw MmaError(ErrCode::SyntaxError, "expected: dump acc<j> <layout>");
    return DumpStmt{parse_acc_token(w[0]), parse_layout_token(w[1])};
}

ExpectStmt parse_expect(std::string_view rest) {
    size_t eq = rest.find('=');
    if (eq == std::string_view::npos)
        throw MmaError(ErrCode::SyntaxError, "expect statement needs '='");
    auto head = words(rest.substr(0, eq));
    if (head.size() != 2)
        throw MmaError(ErrCode::SyntaxError, "expected: expect acc<j> <layout> = [[...]] tol=<t>");
    ExpectStmt s;
    s.acc = parse_acc_token(head[0]);
    s.layout = parse_layout_token(head[1]);

    std::string_view right = trim(rest.substr(eq + 1));
    size_t close = right.rfind(']');
    if (right.empty() || right[0] != '[' || close == std::string_view::npos)
        throw MmaError(ErrCode::SyntaxError, "expect needs a [[...]] matrix literal");
    std::string_view matrix = right.substr(0, close + 1);
    std::string_view tail = trim(right.substr(close + 1));

    if (!tail.empty()) {
        if (!tail.starts_with("tol="))
            throw MmaError(ErrCode::SyntaxError, "trailing tokens after matrix (want tol=<t>)");
        s.tol = parse_real_token(tail.substr(4));
        if (s.tol < 0 || std::isnan(s.tol))
            throw MmaError(ErrCode::SyntaxError, "tolerance must be a nonnegative real");
    }
    if (s.layout == AccLayout::Int32_4x4 && s.tol != 0)
        throw MmaError(ErrCode::SyntaxError, "integer layout comparisons are exact; tol must be 0");

    // Parse [[v, v, ...], ...]: 4 rows, row width set by the layout.
    const int cols = acc_layout_cols(s.layout);
    std::string_view inner = trim(matrix);
    inner.remove_prefix(1);
    inner.remove_suffix(1);
    inner = trim(inner);
    std::vector<std::string_view> rows;
    while (!inner.empty()) {
        if (inner[0] == ',') {
            inner = trim(inner.substr(1));
            continue;
        }
        if (inner[0] != '[')
            throw MmaError(ErrCode::SyntaxError, "bad matrix row syntax");
        size_t end = inner.find(']');
        if (end == std::string_view::npos)
            throw MmaError(ErrCode::SyntaxError, "unterminated matrix row");
        rows.push_back(trim(inner.substr(1, end - 1)));
        inner = trim(inner.substr(end + 1));
    }
    if ((int)rows.size() != 4)
        throw MmaError(ErrCode::SyntaxError,
                       "expect matrix needs 4 rows, got " + std::to_string(rows.size()));
    for (int r = 0; r < 4; r++) {
        auto vals = split(rows[r], ',');
        if ((int)vals.size() != cols)
            throw MmaError(ErrCode::SyntaxError, "expect matrix row needs " + std::to_string(cols) +
                                                     " values for this layout");
        for (int c = 0; c < cols; c++) s.want[r][c] = parse_real_token(vals[c]);
    }
    return s;
}

} // namespace

TraceProgram parse_trace(std::string_view text) {
    TraceProgram prog;
    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        std::string_view line =
            nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        line_no++;

        size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        size_t sp = line.find_first_of(" \t");
        std::string_view head = sp == std::string_view::npos ? line : line.substr(0, sp);
        std::string_view rest = sp == std::string_view::npos ? std::string_view{} : trim(line.substr(sp));

        try {
            if (head == "vsr") {
                size_t eq = rest.find('=');
                auto hw = words(rest.substr(0, eq == std::string_view::npos ? rest.size() : eq));
                if (hw.size() == 2 && hw[1] == "load")
                    prog.push(parse_load_vsr(rest), line_no);
                else
                    prog.push(parse_set_vsr(rest), line_no);
            } else if (head == "xxsetaccz" || head == "xxmtacc" || head == "xxmfacc" ||
                       head == "assemble" || head == "disassemble") {
                prog.push(parse_move(head, rest), line_no);
            } else if (head == "dump") {
                prog.push(parse_dump(rest), line_no);
            } else if (head == "expect") {
                prog.push(parse_expect(rest), line_no);
            } else if (head.starts_with("xv") || head.starts_with("pmxv")) {
                prog.push(parse_ger(head, rest), line_no);
            } else {
                throw MmaError(ErrCode::SyntaxError, "unknown statement \"" + std::string(head) + "\"");
            }
        } catch (const MmaError& e) {
            throw MmaError(e.code(), "line " + std::to_string(line_no) + ": " + e.detail());
        }
    }
    return prog;
}

namespace {

struct RenderVisitor {
    std::string& out;

    void operator()(const SetVsrStmt& s) const {
        out += "vsr " + std::to_string(s.vsr) + " ";
        if (s.hex) {
            out += "hex = " + to_hex(s.value);
            return;
        }
        out += std::string(format_name(s.fmt)) + " =";
        const int lanes = lanes_per_vsr(s.fmt);
        for (int lane = 0; lane < lanes; lane++) {
            uint64_t raw = get_lane(s.value, s.fmt, lane);
            out += lane ? ", " : " ";
            if (is_integer_format(s.fmt))
                out += std::to_string(decode_int_lane(s.fmt, raw));
            else
                out += real_str(decode_real_lane(s.fmt, raw));
        }
    }

    void operator()(const LoadVsrStmt& s) const {
        out += "vsr " + std::to_string(s.vsr) + " load = " + s.path;
        if (s.offset) out += " " + std::to_string(s.offset);
    }

    void operator()(const GerStmt& g) const {
        const FamilyInfo& info = family_info(g.instr.family);
        out += mnemonic_of(g.instr) + " acc" + std::to_string(g.instr.acc) + ", vsr" +
               std::to_string(g.instr.x_vsr);
        if (g.instr.family == GerFamily::F64GER) out += ":vsr" + std::to_string(g.instr.x_vsr + 1);
        out += ", vsr" + std::to_string(g.instr.y_vsr);
        if (g.instr.masks) {
            out += ", x=" + mask_to_string(g.instr.masks->x, 4);
            out += " y=" + mask_to_string(g.instr.masks->y, info.y_rows);
            if (info.p_mask_width) out += " p=" + mask_to_string(g.instr.masks->p, info.p_mask_width);
        }
    }

    void operator()(const MoveStmt& s) const {
        switch (s.kind) {
            case MoveKind::SetAccZ: out += "xxsetaccz acc" + std::to_string(s.acc); return;
            case MoveKind::MoveTo: out += "xxmtacc acc" + std::to_string(s.acc); return;
            case MoveKind::MoveFrom: out += "xxmfacc acc" + std::to_string(s.acc); return;
            case MoveKind::Assemble: out += "assemble acc" + std::to_string(s.acc); break;
            case MoveKind::Disassemble: out += "disassemble acc" + std::to_string(s.acc); break;
        }
        for (int v : s.vsrs) out += ", vsr" + std::to_string(v);
    }

    void operator()(const DumpStmt& s) const {
        out += "dump acc" + std::to_string(s.acc) + " " + std::string(acc_layout_name(s.layout));
    }

    void operator()(const ExpectStmt& s) const {
        out += "expect acc" + std::to_string(s.acc) + " " + std::string(acc_layout_name(s.layout)) +
               " = [";
        for (int r = 0; r < 4; r++) {
            out += r ? ", [" : "[";
            for (int c = 0; c < acc_layout_cols(s.layout); c++) {
                if (c) out += ", ";
                out += real_str(s.want[r][c]);
            }
            out += "]";
        }
        out += "] tol=" + real_str(s.tol);
    }
};

} // namespace

std::string render_trace(const TraceProgram& p) {
    std::string out;
    for (const Statement& s : p.stmts) {
        std::visit(RenderVisitor{out}, s);
        out += "\n";
    }
    return out;
}

// ---- Lint ------------------------------------------------------------------

namespace {

struct LintState {
    std::array<AccState, 8> st{};
    std::array<bool, 8> ever_primed{};
    std::vector<LintDiag>& diags;
    int line = 0;

    bool locked(int vsr) const { return vsr < 32 && st[vsr / 4] == AccState::Primed; }

    void error(ErrCode code, std::string msg) {
        diags.push_back({line, LintSeverity::Error, code, std::move(msg)});
    }
    void warn(std::string msg) {
        diags.push_back({line, LintSeverity::Warning, ErrCode::SyntaxError, std::move(msg)});
    }

    void check_unlocked(int vsr, std::string_view role) {
        if (locked(vsr))
            error(ErrCode::VsrLocked, std::string(role) + " vsr" + std::to_string(vsr) +
                                          " is frozen by primed acc" + std::to_string(vsr / 4));
    }

    void require_primed(int acc, std::string_view what) {
        if (st[acc] == AccState::Primed) return;
        if (ever_primed[acc])
            error(ErrCode::AccNotPrimed, std::string(what) + " uses acc" + std::to_string(acc) +
                                             " after it was deprimed");
        else
            error(ErrCode::AccNotPrimed,
                  std::string(what) + " uses acc" + std::to_string(acc) + " which was never primed");
    }

    void prime(int acc) {
        st[acc] = AccState::Primed;
        ever_primed[acc] = true;
    }

    void operator()(const SetVsrStmt& s) { check_unlocked(s.vsr, "write target"); }
    void operator()(const LoadVsrStmt& s) { check_unlocked(s.vsr, "load target"); }

    void operator()(const GerStmt& g) {
        const bool paired = g.instr.family == GerFamily::F64GER;
        if (paired && ((g.instr.x_vsr & 1) || g.instr.x_vsr > 62))
            error(ErrCode::InvalidVsrPair, "x operand is not an even:odd pair");
        const int lo = 4 * g.instr.acc;
        for (int k = 0; k < (paired ? 2 : 1); k++) {
            int v = g.instr.x_vsr + k;
            if (v >= lo && v < lo + 4)
                error(ErrCode::OperandOverlapsAccumulator,
                      "x operand vsr" + std::to_string(v) + " lies in the target group");
            else
                check_unlocked(v, "x operand");
        }
        if (g.instr.y_vsr >= lo && g.instr.y_vsr < lo + 4)
            error(ErrCode::OperandOverlapsAccumulator,
                  "y operand vsr" + std::to_string(g.instr.y_vsr) + " lies in the target group");
        else
            check_unlocked(g.instr.y_vsr, "y operand");
        if (accumulating(g.instr.mode))
            require_primed(g.instr.acc, mnemonic_of(g.instr));
        else
            prime(g.instr.acc);
    }

    void operator()(const MoveStmt& s) {
        switch (s.kind) {
            case MoveKind::SetAccZ:
                prime(s.acc);
                break;
            case MoveKind::MoveTo:
                warn("prefer assemble over xxmtacc; it names its sources explicitly");
                if (st[s.acc] == AccState::Primed)
                    error(ErrCode::AccAlreadyPrimed, "xxmtacc on already-primed acc" + std::to_string(s.acc));
                prime(s.acc);
                break;
            case MoveKind::MoveFrom:
                warn("prefer disassemble over xxmfacc; it names its destinations explicitly");
                require_primed(s.acc, "xxmfacc");
                st[s.acc] = AccState::Deprimed;
                break;
            case MoveKind::Assemble:
                for (int v : s.vsrs) check_unlocked(v, "assemble source");
                prime(s.acc);
                break;
            case MoveKind::Disassemble: {
                require_primed(s.acc, "disassemble");
                st[s.acc] = AccState::Deprimed; // own group becomes writable
                for (int v : s.vsrs) check_unlocked(v, "disassemble destination");
                break;
            }
        }
    }

    void operator()(const DumpStmt& s) { require_primed(s.acc, "dump"); }
    void operator()(const ExpectStmt& s) { require_primed(s.acc, "expect"); }
};

} // namespace

std::vector<LintDiag> lint_trace(const TraceProgram& p) {
    std::vector<LintDiag> diags;
    LintState ls{.diags = diags};
    for (size_t i = 0; i < p.stmts.size(); i++) {
        ls.line = p.lines.size() > i ? p.lines[i] : 0;
        std::visit(ls, p.stmts[i]);
        int live = 0;
        for (AccState s : ls.st)
            if (s == AccState::Primed) live++;
        if (live > 8)
            ls.error(ErrCode::OperandError, "more than 8 accumulators live at once");
    }
    return diags;
}

bool lint_has_error(const std::vector<LintDiag>& diags) {
    for (const LintDiag& d : diags)
        if (d.severity == LintSeverity::Error) return true;
    return false;
}

// ---- Run -------------------------------------------------------------------

namespace {

struct ApplyVisitor {
    MachineState& m;

    void operator()(const SetVsrStmt& s) const { m.write_vsr(s.vsr, s.value); }

    void operator()(const LoadVsrStmt& s) const {
        std::ifstream in(s.path, std::ios::binary);
        if (!in) throw MmaError(ErrCode::IoError, "cannot open \"" + s.path + "\"");
        in.seekg((std::streamoff)s.offset);
        Vsr128 v;
        in.read((char*)v.b.data(), 16);
        if (in.gcount() != 16)
            throw MmaError(ErrCode::IoError, "short read from \"" + s.path + "\" at offset " +
                                                 std::to_string(s.offset));
        m.write_vsr(s.vsr, v);
    }

    void operator()(const GerStmt& g) const { execute_ger(m, g.instr); }

    void operator()(const MoveStmt& s) const {
        switch (s.kind) {
            case MoveKind::SetAccZ: m.xxsetaccz(s.acc); break;
            case MoveKind::MoveTo: m.xxmtacc(s.acc); break;
            case MoveKind::MoveFrom: m.xxmfacc(s.acc); break;
            case MoveKind::Assemble: m.assemble_acc(s.acc, s.vsrs); break;
            case MoveKind::Disassemble: m.disassemble_acc(s.acc, s.vsrs); break;
        }
    }

    void operator()(const DumpStmt& s) const { (void)m.view_acc(s.acc, s.layout); }
    void operator()(const ExpectStmt& s) const { (void)m.view_acc(s.acc, s.layout); }
};

} // namespace

void apply_statement(MachineState& m, const Statement& s) { std::visit(ApplyVisitor{m}, s); }

RunReport run_trace(const TraceProgram& p, MachineState& m) {
    RunReport report;
    for (size_t i = 0; i < p.stmts.size(); i++) {
        const int line = p.lines.size() > i ? p.lines[i] : 0;
        try {
            if (const DumpStmt* d = std::get_if<DumpStmt>(&p.stmts[i])) {
                report.dumps.push_back({line, d->acc, m.view_acc(d->acc, d->layout)});
            } else if (const ExpectStmt* e = std::get_if<ExpectStmt>(&p.stmts[i])) {
                AccView got = m.view_acc(e->acc, e->layout);
                for (int r = 0; r < 4; r++) {
                    for (int c = 0; c < got.cols(); c++) {
                        const double diff = std::fabs(got.v[r][c] - e->want[r][c]);
                        if (!(diff <= e->tol))
                            report.failures.push_back(
                                {line, e->acc, r, c, got.v[r][c], e->want[r][c], e->tol});
                    }
                }
            } else {
                apply_statement(m, p.stmts[i]);
            }
        } catch (const MmaError& err) {
            report.abort = RunAbort{line, err.code(), err.detail()};
            break;
        }
    }
    report.stats = m.stats();
    report.pass = !report.abort && report.failures.empty();
    return report;
}

} // namespace mma
