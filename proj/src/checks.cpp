#include "mma/checks.hpp"

#include "mma/isa.hpp"
#include "mma/trace.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace mma {

CheckConfig acceptance_config() { return CheckConfig{}; }

CheckConfig selftest_config() {
    CheckConfig cfg;
    cfg.int_random_trials = 3000;
    cfg.int_corner_exhaustive = false;
    cfg.int_corner_samples = 1500;
    cfg.mask_trials = 800;
    cfg.sign_trials = 800;
    cfg.lint_traces = 1500;
    cfg.dgemm_sizes = {1, 2, 8, 64};
    cfg.dgemm_seeds_per_size = 8;
    cfg.sconv_seeds = 10;
    return cfg;
}

namespace {

void fail(CheckResult& res, const std::string& msg) {
    if (res.pass) {
        res.pass = false;
        res.detail = msg;
    }
}

Vsr128 random_vsr(SplitMix64& rng) {
    Vsr128 v;
    for (int i = 0; i < 16; i += 8) {
        uint64_t bits = rng.next();
        for (int k = 0; k < 8; k++) v.b[i + k] = (uint8_t)(bits >> (8 * k));
    }
    return v;
}

using AccRows = std::array<Vsr128, 4>;

// Scratch registers for single-instruction trials; all outside every
// accumulator group.
constexpr int kXReg = 48; // and 49 for the fp64 pair
constexpr int kYReg = 50;
constexpr std::array<int, 4> kAccSrc = {44, 45, 46, 47};

// Prime acc0 with the given contents, set operands, run one instruction,
// and return the resulting accumulator rows.
AccRows run_ger_once(MachineState& m, GerFamily fam, AccumulateMode mode,
                     const std::optional<MaskSet>& masks, const Vsr128& x, const Vsr128& x2,
                     const Vsr128& y, const AccRows& acc_in) {
    for (int r = 0; r < 4; r++) m.write_vsr(kAccSrc[r], acc_in[r]);
    m.assemble_acc(0, kAccSrc);
    m.write_vsr(kXReg, x);
    if (fam == GerFamily::F64GER) m.write_vsr(kXReg + 1, x2);
    m.write_vsr(kYReg, y);
    GerInstruction instr;
    instr.family = fam;
    instr.mode = mode;
    instr.acc = 0;
    instr.x_vsr = kXReg;
    instr.y_vsr = kYReg;
    instr.masks = masks;
    execute_ger(m, instr);
    return m.acc(0).rows;
}

// Independent reference for the integer families: exact 64-bit dot product
// per element, then one wrap or clamp, written over the incoming rows.
void oracle_int_update(GerFamily fam, AccumulateMode mode, const MaskSet& ms, const Vsr128& x,
                       const Vsr128& y, AccRows& rows) {
    const FamilyInfo& info = family_info(fam);
    const int k = info.rank;
    const bool saturating = mode == AccumulateMode::S || mode == AccumulateMode::SPP;
    for (int i = 0; i < 4; i++) {
        for (int j = 0; j < 4; j++) {
            WideInt s = 0;
            bool any = false;
            for (int t = 0; t < k; t++) {
                if (!(ms.x_on(i) && ms.y_on(j) && ms.p_on(t))) continue;
                any = true;
                s += decode_int_lane(info.x_fmt, get_lane(x, info.x_fmt, i * k + t)) *
                     decode_int_lane(info.y_fmt, get_lane(y, info.y_fmt, j * k + t));
            }
            if (!any) {
                if (!accumulating(mode)) set_lane(rows[i], ElementFormat::Int32, j, 0);
                continue;
            }
            if (accumulating(mode))
                s += decode_int_lane(ElementFormat::Int32, get_lane(rows[i], ElementFormat::Int32, j));
            const int32_t out = saturating ? saturate_to_int32(s) : wrap_to_int32(s);
            set_lane(rows[i], ElementFormat::Int32, j, (uint32_t)out);
        }
    }
}

struct FamilyModes {
    GerFamily family;
    std::vector<AccumulateMode> modes;
};

const std::vector<FamilyModes>& int_family_modes() {
    static const std::vector<FamilyModes> fams = {
        {GerFamily::I16GER2,
         {AccumulateMode::None, AccumulateMode::S, AccumulateMode::PP, AccumulateMode::SPP}},
        {GerFamily::I8GER4, {AccumulateMode::None, AccumulateMode::PP, AccumulateMode::SPP}},
        {GerFamily::I4GER8, {AccumulateMode::None, AccumulateMode::PP}},
    };
    return fams;
}

std::array<int64_t, 5> corner_values(ElementFormat f) {
    if (f == ElementFormat::Uint8) return {0, 1, 127, 254, 255};
    return {int_format_min(f), -1, 0, 1, int_format_max(f)};
}

Vsr128 uniform_rows_vsr(ElementFormat f, int k, int rows, const std::array<int64_t, 5>& corners,
                        int assignment) {
    Vsr128 v;
    for (int i = 0; i < rows; i++) {
        const int64_t value = corners[assignment % 5];
        assignment /= 5;
        for (int t = 0; t < k; t++) set_lane(v, f, i * k + t, encode_int_lane(f, value));
    }
    return v;
}

AccRows int32_filled_rows(int32_t fill) {
    AccRows rows{};
    for (int r = 0; r < 4; r++)
        for (int c = 0; c < 4; c++) set_lane(rows[r], ElementFormat::Int32, c, (uint32_t)fill);
    return rows;
}

std::string describe_int_case(GerFamily fam, AccumulateMode mode, const Vsr128& x, const Vsr128& y,
                              const AccRows& acc_in) {
    return mnemonic_of(fam, mode, false) + " x=" + to_hex(x) + " y=" + to_hex(y) +
           " acc0=" + to_hex(acc_in[0]);
}

} // namespace

CheckResult check_integer_oracle(const CheckConfig& cfg) {
    CheckResult res{.name = "integer updates vs exact reference", .pass = true};
    MachineState m(true);
    SplitMix64 rng(cfg.seed * 0x9E37u + 1);

    for (const FamilyModes& fm : int_family_modes()) {
        const FamilyInfo& info = family_info(fm.family);
        const auto cx = corner_values(info.x_fmt);
        const auto cy = corner_values(info.y_fmt);
        static const int32_t acc_corners[5] = {INT32_MIN, -1, 0, 1, INT32_MAX};

        auto run_case = [&](const Vsr128& x, const Vsr128& y, AccumulateMode mode,
                            const AccRows& acc_in) {
            AccRows got = run_ger_once(m, fm.family, mode, std::nullopt, x, Vsr128{}, y, acc_in);
            AccRows want = acc_in;
            oracle_int_update(fm.family, mode, all_ones_masks(fm.family), x, y, want);
            res.trials++;
            if (got != want)
                fail(res, "mismatch: " + describe_int_case(fm.family, mode, x, y, acc_in));
        };

        // Corner patterns: every per-row assignment of {min, -1, 0, 1, max}
        // to the four X rows and four Y rows, against corner accumulators.
        if (cfg.int_corner_exhaustive) {
            for (int xa = 0; xa < 625; xa++) {
                const Vsr128 x = uniform_rows_vsr(info.x_fmt, info.rank, 4, cx, xa);
                for (int ya = 0; ya < 625; ya++) {
                    const Vsr128 y = uniform_rows_vsr(info.y_fmt, info.rank, 4, cy, ya);
                    for (AccumulateMode mode : fm.modes) {
                        if (accumulating(mode)) {
                            for (int32_t fill : acc_corners)
                                run_case(x, y, mode, int32_filled_rows(fill));
                        } else {
                            run_case(x, y, mode, AccRows{});
                        }
                    }
                }
            }
        } else {
            for (int n = 0; n < cfg.int_corner_samples; n++) {
                const Vsr128 x = uniform_rows_vsr(info.x_fmt, info.rank, 4, cx, (int)rng.below(625));
                const Vsr128 y = uniform_rows_vsr(info.y_fmt, info.rank, 4, cy, (int)rng.below(625));
                for (AccumulateMode mode : fm.modes) {
                    if (accumulating(mode))
                        run_case(x, y, mode, int32_filled_rows(acc_corners[rng.below(5)]));
                    else
                        run_case(x, y, mode, AccRows{});
                }
            }
        }

        // Random lane bytes and random accumulator contents.
        for (int n = 0; n < cfg.int_random_trials; n++) {
            const Vsr128 x = random_vsr(rng);
            const Vsr128 y = random_vsr(rng);
            for (AccumulateMode mode : fm.modes)
                run_case(x, y, mode,
                         accumulating(mode)
                             ? AccRows{random_vsr(rng), random_vsr(rng), random_vsr(rng), random_vsr(rng)}
                             : AccRows{});
        }
    }

    // Pinned boundary case: two int16 maxima against a saturated
    // accumulator separates the modulo and saturating accumulates.
    {
        const FamilyInfo& info = family_info(GerFamily::I16GER2);
        Vsr128 x, y;
        for (int lane = 0; lane < 8; lane++) {
            set_lane(x, info.x_fmt, lane, encode_int_lane(info.x_fmt, 32767));
            set_lane(y, info.y_fmt, lane, encode_int_lane(info.y_fmt, 32767));
        }
        AccRows full = int32_filled_rows(INT32_MAX);
        AccRows wrapped = run_ger_once(m, GerFamily::I16GER2, AccumulateMode::PP, std::nullopt, x,
                                       Vsr128{}, y, full);
        AccRows clamped = run_ger_once(m, GerFamily::I16GER2, AccumulateMode::SPP, std::nullopt, x,
                                       Vsr128{}, y, full);
        res.trials += 2;
        const int64_t wrap_elem =
            decode_int_lane(ElementFormat::Int32, get_lane(wrapped[0], ElementFormat::Int32, 0));
        const int64_t clamp_elem =
            decode_int_lane(ElementFormat::Int32, get_lane(clamped[0], ElementFormat::Int32, 0));
        if (wrap_elem != -131071)
            fail(res, "2*32767^2 + INT32_MAX should wrap to -131071, got " +
                          std::to_string(wrap_elem));
        if (clamp_elem != INT32_MAX)
            fail(res, "2*32767^2 + INT32_MAX should clamp to INT32_MAX, got " +
                          std::to_string(clamp_elem));
    }

    if (res.pass) res.detail = "exact match across corner and random operands";
    return res;
}

namespace {

MaskSet random_masks(SplitMix64& rng, const FamilyInfo& info) {
    MaskSet ms;
    ms.x = (uint8_t)rng.below(16);
    ms.y = (uint8_t)rng.below(1u << info.y_rows);
    ms.p = info.p_mask_width ? (uint8_t)rng.below(1u << info.p_mask_width) : 1;
    switch (rng.below(8)) {
        case 1: ms.x = 0; break;
        case 2: ms.y = 0; break;
        case 3:
            if (info.p_mask_width)
                ms.p = 0;
            else
                ms.x = 0;
            break;
        default: break;
    }
    return ms;
}

bool masks_all_zero(const FamilyInfo& info, const MaskSet& ms) {
    return ms.x == 0 || ms.y == 0 || (info.p_mask_width > 0 && ms.p == 0);
}

Vsr128 zero_disabled_x(const FamilyInfo& info, Vsr128 x, const MaskSet& ms) {
    for (int i = 0; i < 4; i++)
        for (int t = 0; t < info.rank; t++)
            if (!ms.x_on(i) || !ms.p_on(t)) set_lane(x, info.x_fmt, i * info.rank + t, 0);
    return x;
}

Vsr128 zero_disabled_y(const FamilyInfo& info, Vsr128 y, const MaskSet& ms) {
    for (int j = 0; j < info.y_rows; j++)
        for (int t = 0; t < info.rank; t++)
            if (!ms.y_on(j) || !ms.p_on(t)) set_lane(y, info.y_fmt, j * info.rank + t, 0);
    return y;
}

const GerFamily kAllFamilies[] = {GerFamily::I16GER2,  GerFamily::I8GER4, GerFamily::I4GER8,
                                  GerFamily::BF16GER2, GerFamily::F16GER2, GerFamily::F32GER,
                                  GerFamily::F64GER};

std::vector<AccumulateMode> allowed_modes(GerFamily f) {
    std::vector<AccumulateMode> out;
    for (AccumulateMode m : {AccumulateMode::None, AccumulateMode::S, AccumulateMode::PP,
                             AccumulateMode::SPP, AccumulateMode::NP, AccumulateMode::PN,
                             AccumulateMode::NN})
        if (mode_allowed(f, m)) out.push_back(m);
    return out;
}

} // namespace

CheckResult check_mask_laws(const CheckConfig& cfg) {
    CheckResult res{.name = "mask laws", .pass = true};
    MachineState m(true);
    SplitMix64 rng(cfg.seed * 0xA5A5u + 2);

    for (GerFamily fam : kAllFamilies) {
        const FamilyInfo& info = family_info(fam);
        const std::vector<AccumulateMode> modes = allowed_modes(fam);
        for (int n = 0; n < cfg.mask_trials; n++) {
            const Vsr128 x = random_vsr(rng);
            const Vsr128 x2 = random_vsr(rng);
            const Vsr128 y = random_vsr(rng);
            const AccRows acc_in{random_vsr(rng), random_vsr(rng), random_vsr(rng),
                                 random_vsr(rng)};
            const MaskSet ms = random_masks(rng, info);
            const MaskSet ones = all_ones_masks(fam);

            for (AccumulateMode mode : modes) {
                res.trials++;

                // All-ones masked form is the conventional form.
                AccRows with_masks = run_ger_once(m, fam, mode, ones, x, x2, y, acc_in);
                AccRows plain = run_ger_once(m, fam, mode, std::nullopt, x, x2, y, acc_in);
                if (with_masks != plain) {
                    fail(res, "all-ones mask diverges from conventional " +
                                  mnemonic_of(fam, mode, true));
                    continue;
                }

                AccRows masked = run_ger_once(m, fam, mode, ms, x, x2, y, acc_in);
                if (masks_all_zero(info, ms)) {
                    if (accumulating(mode)) {
                        // Nothing enabled: accumulator bits must survive.
                        if (masked != acc_in)
                            fail(res, "all-zero mask disturbed accumulator in " +
                                          mnemonic_of(fam, mode, true));
                    } else {
                        if (masked != AccRows{} || m.acc(0).state != AccState::Primed)
                            fail(res, "all-zero mask should zero-fill and prime in " +
                                          mnemonic_of(fam, mode, true));
                    }
                }

                // Masking equals zeroing the disabled inputs for the integer
                // modulo forms.
                if (info.is_int && (mode == AccumulateMode::None || mode == AccumulateMode::PP)) {
                    AccRows zeroed = run_ger_once(m, fam, mode, std::nullopt,
                                                  zero_disabled_x(info, x, ms), x2,
                                                  zero_disabled_y(info, y, ms), acc_in);
                    if (masked != zeroed)
                        fail(res, "mask vs zeroed-input decomposition failed for " +
                                      mnemonic_of(fam, mode, true));
                }
            }
        }
    }
    if (res.pass) res.detail = "all-ones, all-zero and decomposition laws hold";
    return res;
}

namespace {

// Exactly representable test data: X and Y lanes hold small even integers,
// accumulators hold small odd integers.  Sums of products stay far below
// every format's exact-integer limit, and no product sum can collide with
// the accumulator value, so sign identities must hold bit for bit.
Vsr128 even_int_vsr(SplitMix64& rng, ElementFormat f) {
    Vsr128 v;
    for (int lane = 0; lane < lanes_per_vsr(f); lane++)
        set_lane(v, f, lane, encode_real_lane(f, (double)(2 * rng.range(-4, 4))));
    return v;
}

AccRows odd_int_rows(SplitMix64& rng, ElementFormat f) {
    AccRows rows{};
    for (int r = 0; r < 4; r++)
        for (int lane = 0; lane < lanes_per_vsr(f); lane++)
            set_lane(rows[r], f, lane, encode_real_lane(f, (double)(2 * rng.range(-5, 4) + 1)));
    return rows;
}

Vsr128 negate_lanes(const Vsr128& v, ElementFormat f) {
    Vsr128 out = v;
    const int top = lane_bits(f) - 1;
    for (int lane = 0; lane < lanes_per_vsr(f); lane++)
        set_lane(out, f, lane, get_lane(v, f, lane) ^ (1ull << top));
    return out;
}

AccRows negate_rows(const AccRows& rows, ElementFormat f) {
    AccRows out;
    for (int r = 0; r < 4; r++) out[r] = negate_lanes(rows[r], f);
    return out;
}

} // namespace

CheckResult check_sign_algebra(const CheckConfig& cfg) {
    CheckResult res{.name = "sign-suffix algebra", .pass = true};
    MachineState m(true);
    SplitMix64 rng(cfg.seed * 0xC3C3u + 3);

    for (GerFamily fam :
         {GerFamily::BF16GER2, GerFamily::F16GER2, GerFamily::F32GER, GerFamily::F64GER}) {
        const FamilyInfo& info = family_info(fam);
        const ElementFormat acc_fmt = acc_layout_format(info.layout);
        for (int n = 0; n < cfg.sign_trials; n++) {
            const Vsr128 x = even_int_vsr(rng, info.x_fmt);
            const Vsr128 x2 = even_int_vsr(rng, info.x_fmt);
            const Vsr128 y = even_int_vsr(rng, info.y_fmt);
            const AccRows acc_in = odd_int_rows(rng, acc_fmt);
            const Vsr128 nx = negate_lanes(x, info.x_fmt);
            const Vsr128 nx2 = negate_lanes(x2, info.x_fmt);
            res.trials++;

            AccRows pp = run_ger_once(m, fam, AccumulateMode::PP, std::nullopt, x, x2, y, acc_in);
            AccRows np = run_ger_once(m, fam, AccumulateMode::NP, std::nullopt, x, x2, y, acc_in);
            AccRows pn = run_ger_once(m, fam, AccumulateMode::PN, std::nullopt, x, x2, y, acc_in);
            AccRows nn = run_ger_once(m, fam, AccumulateMode::NN, std::nullopt, x, x2, y, acc_in);

            if (np != run_ger_once(m, fam, AccumulateMode::PP, std::nullopt, nx, nx2, y, acc_in))
                fail(res, "np != pp(-X) for " + std::string(info.root));
            if (pn != run_ger_once(m, fam, AccumulateMode::NN, std::nullopt, nx, nx2, y, acc_in))
                fail(res, "pn != nn(-X) for " + std::string(info.root));
            if (pn != negate_rows(np, acc_fmt))
                fail(res, "pn != -np for " + std::string(info.root));
            if (nn != negate_rows(pp, acc_fmt))
                fail(res, "nn != -pp for " + std::string(info.root));
        }
    }
    if (res.pass) res.detail = "np/pn/nn related to pp exactly as written";
    return res;
}

namespace {

int biased_vsr(SplitMix64& rng) {
    return rng.below(2) ? (int)rng.below(32) : 32 + (int)rng.below(32);
}

TraceProgram random_program(SplitMix64& rng) {
    TraceProgram p;
    const int len = 1 + (int)rng.below(12);
    for (int i = 0; i < len; i++) {
        const int line = i + 1;
        switch (rng.below(8)) {
            case 0:
                p.push(SetVsrStmt{biased_vsr(rng), true, ElementFormat::Fp64, random_vsr(rng)}, line);
                break;
            case 1: {
                GerInstruction instr;
                instr.family = kAllFamilies[rng.below(7)];
                const auto modes = allowed_modes(instr.family);
                instr.mode = modes[rng.below(modes.size())];
                instr.acc = (int)rng.below(8);
                instr.x_vsr = instr.family == GerFamily::F64GER ? 2 * (int)rng.below(31)
                                                                : biased_vsr(rng);
                instr.y_vsr = biased_vsr(rng);
                if (rng.below(10) < 3) instr.masks = random_masks(rng, family_info(instr.family));
                p.push(GerStmt{instr}, line);
                break;
            }
            case 2: p.push(MoveStmt{MoveKind::SetAccZ, (int)rng.below(8), {}}, line); break;
            case 3: p.push(MoveStmt{MoveKind::MoveTo, (int)rng.below(8), {}}, line); break;
            case 4: p.push(MoveStmt{MoveKind::MoveFrom, (int)rng.below(8), {}}, line); break;
            case 5: {
                MoveStmt s{MoveKind::Assemble, (int)rng.below(8), {}};
                for (int k = 0; k < 4; k++) s.vsrs[k] = biased_vsr(rng);
                p.push(s, line);
                break;
            }
            case 6: {
                MoveStmt s{MoveKind::Disassemble, (int)rng.below(8), {}};
                for (int k = 0; k < 4; k++) s.vsrs[k] = biased_vsr(rng);
                p.push(s, line);
                break;
            }
            case 7: {
                const AccLayout layouts[] = {AccLayout::Fp64_4x2, AccLayout::Fp32_4x4,
                                             AccLayout::Int32_4x4};
                p.push(DumpStmt{(int)rng.below(8), layouts[rng.below(3)]}, line);
                break;
            }
        }
    }
    return p;
}

} // namespace

CheckResult check_lint_lifecycle(const CheckConfig& cfg) {
    CheckResult res{.name = "lint vs strict execution", .pass = true};
    SplitMix64 rng(cfg.seed * 0xD7D7u + 4);
    uint64_t rejected = 0;

    for (int n = 0; n < cfg.lint_traces; n++) {
        const TraceProgram p = random_program(rng);
        const std::vector<LintDiag> diags = lint_trace(p);
        const bool lint_err = lint_has_error(diags);

        MachineState m(true);
        const RunReport report = run_trace(p, m);
        const bool run_err = report.abort.has_value();
        res.trials++;
        if (run_err) rejected++;

        if (lint_err != run_err) {
            fail(res, std::string(run_err ? "runtime rejected" : "runtime accepted") +
                          " a trace the linter " + (lint_err ? "flagged" : "missed") + ":\n" +
                          render_trace(p));
            continue;
        }
        if (run_err) {
            int first_line = 0;
            for (const LintDiag& d : diags) {
                if (d.severity == LintSeverity::Error) {
                    first_line = d.line;
                    break;
                }
            }
            if (first_line != report.abort->line)
                fail(res, "lint error line " + std::to_string(first_line) +
                              " != abort line " + std::to_string(report.abort->line) + ":\n" +
                              render_trace(p));
        }
    }
    if (res.pass)
        res.detail = std::to_string(rejected) + " of " + std::to_string(res.trials) +
                     " random traces rejected, all agreed";
    return res;
}

MatrixF64 random_dgemm_operand(SplitMix64& rng, int cols) {
    MatrixF64 m(8, cols);
    for (double& v : m.data) {
        const uint64_t cls = rng.below(16);
        uint64_t exp;
        if (cls == 0)
            exp = 0; // zero or subnormal
        else if (cls == 1)
            exp = 1 + rng.below(64); // deep underflow range
        else if (cls == 2)
            exp = 1982 + rng.below(64); // near overflow
        else
            exp = 1023 - 40 + rng.below(81); // everyday magnitudes
        const uint64_t sign = rng.below(2) << 63;
        const uint64_t mant = rng.next() & ((1ull << 52) - 1);
        v = std::bit_cast<double>(sign | (exp << 52) | mant);
    }
    return m;
}

CheckResult check_dgemm(const CheckConfig& cfg) {
    CheckResult res{.name = "dgemm kernel vs fused-madd reference", .pass = true};
    SplitMix64 rng(cfg.seed * 0xE1E1u + 5);

    try {
        MatrixF64 empty(8, 0);
        dgemm_kernel(empty, empty);
        fail(res, "N=0 should raise EmptyMultiply");
    } catch (const MmaError& e) {
        if (e.code() != ErrCode::EmptyMultiply) fail(res, "N=0 raised the wrong error");
    }

    for (int n : cfg.dgemm_sizes) {
        for (int s = 0; s < cfg.dgemm_seeds_per_size; s++) {
            const MatrixF64 x = random_dgemm_operand(rng, n);
            const MatrixF64 y = random_dgemm_operand(rng, n);
            KernelReport rep;
            const MatrixF64 got = dgemm_kernel(x, y, &rep);
            const MatrixF64 want = dgemm_oracle(x, y);
            res.trials++;
            for (int i = 0; i < 64 && res.pass; i++)
                if (std::bit_cast<uint64_t>(got.data[i]) != std::bit_cast<uint64_t>(want.data[i]))
                    fail(res, "value mismatch at N=" + std::to_string(n) + " element " +
                                  std::to_string(i));
            if (rep.stats.ger_count != (uint64_t)8 * n)
                fail(res, "expected " + std::to_string(8 * n) + " update instructions, counted " +
                              std::to_string(rep.stats.ger_count));
            if (rep.stats.flops != (uint64_t)128 * n)
                fail(res, "expected " + std::to_string(128 * n) + " flops, counted " +
                              std::to_string(rep.stats.flops));
            if (!rep.all_deprimed) fail(res, "kernel left a primed accumulator behind");
        }

        // Power-of-two scaling is exact: scale X, the result scales.
        for (int s = 0; s < 5; s++) {
            MatrixF64 x(8, n), y(8, n);
            for (double& v : x.data) v = std::ldexp(rng.symmetric(), (int)rng.below(20) - 10);
            for (double& v : y.data) v = std::ldexp(rng.symmetric(), (int)rng.below(20) - 10);
            const int e = (int)rng.below(9) - 4;
            MatrixF64 xs = x;
            for (double& v : xs.data) v = std::ldexp(v, e);
            const MatrixF64 c = dgemm_kernel(x, y);
            const MatrixF64 cs = dgemm_kernel(xs, y);
            res.trials++;
            for (int i = 0; i < 64 && res.pass; i++)
                if (std::bit_cast<uint64_t>(cs.data[i]) !=
                    std::bit_cast<uint64_t>(std::ldexp(c.data[i], e)))
                    fail(res, "power-of-two scaling not exact at N=" + std::to_string(n));
        }
    }
    if (res.pass) res.detail = "bit-exact across sizes, counters exact";
    return res;
}

ConvProblem random_conv_problem(SplitMix64& rng, bool positive_values) {
    ConvProblem p;
    const int k = 1 + (int)rng.below(8);
    const int rows = 3 + (int)rng.below(3);
    p.n = 18 + (int)rng.below(14);
    p.row = (int)rng.below(rows - 2);
    auto fill = [&](MatrixF32& m, int r, int c) {
        m = MatrixF32(r, c);
        for (float& v : m.data)
            v = (float)(positive_values ? rng.unit() : rng.symmetric());
    };
    fill(p.h, k, 27);
    fill(p.r, rows, p.n);
    fill(p.g, rows, p.n);
    fill(p.b, rows, p.n);
    return p;
}

CheckResult check_sconv(const CheckConfig& cfg) {
    CheckResult res{.name = "sconv kernel vs shifted-window reference", .pass = true};
    SplitMix64 rng(cfg.seed * 0xF5F5u + 6);

    for (int s = 0; s < cfg.sconv_seeds; s++) {
        const bool positive = (s % 2) == 1;
        const ConvProblem p = random_conv_problem(rng, positive);
        KernelReport rep;
        const MatrixF32 got = sconv_kernel(p, &rep);
        const MatrixF32 want = conv_oracle_gemm(p);
        const MatrixF64 ref = naive_conv_oracle(p);
        res.trials++;

        for (int i = 0; i < 128 && res.pass; i++)
            if (std::bit_cast<uint32_t>(got.data[i]) != std::bit_cast<uint32_t>(want.data[i]))
                fail(res, "kernel diverged from the rounding-faithful reference at element " +
                              std::to_string(i));
        for (int i = 0; i < 128 && res.pass; i++) {
            const double kv = got.data[i], nv = ref.data[i];
            const double err = std::fabs(kv - nv);
            // Positive data cannot cancel, so a pure relative bound applies;
            // signed data is held to the same bound relative to max(1, |ref|).
            const double bound = positive ? 1e-5 * std::fabs(nv) : 1e-5 * std::max(1.0, std::fabs(nv));
            if (!(err <= bound))
                fail(res, "fp32 pipeline drifted from double reference: got " + std::to_string(kv) +
                              " want " + std::to_string(nv));
        }
        if (rep.stats.ger_count != 216)
            fail(res, "expected 216 update instructions, counted " +
                          std::to_string(rep.stats.ger_count));
        if (rep.stats.flops != 216 * 32)
            fail(res, "expected 6912 flops, counted " + std::to_string(rep.stats.flops));
        if (!rep.all_deprimed) fail(res, "kernel left a primed accumulator behind");
    }

    // A single center-tap delta filter must reproduce the shifted window of
    // the first plane exactly, and leave the padded filter rows at zero.
    {
        SplitMix64 drng(cfg.seed * 0xABCDu + 7);
        ConvProblem p = random_conv_problem(drng, /*positive_values=*/true);
        p.h = MatrixF32(1, 27);
        p.h.at(0, 4) = 1.0f; // plane 0, u = 1, v = 1
        const MatrixF32 c = sconv_kernel(p);
        res.trials++;
        for (int j = 0; j < 16 && res.pass; j++)
            if (std::bit_cast<uint32_t>(c.at(0, j)) !=
                std::bit_cast<uint32_t>(p.r.at(p.row + 1, j + 1)))
                fail(res, "center-tap delta did not reproduce the shifted window");
        for (int f = 1; f < 8 && res.pass; f++)
            for (int j = 0; j < 16; j++)
                if (c.at(f, j) != 0.0f) fail(res, "padded filter rows must stay zero");
    }

    if (res.pass) res.detail = "bit-exact vs reference, within 1e-5 of double";
    return res;
}

CheckResult check_numerics_roundtrip(const CheckConfig& cfg) {
    (void)cfg;
    CheckResult res{.name = "lane format round-trips and int32 folding", .pass = true};

    for (ElementFormat f : {ElementFormat::Fp16, ElementFormat::Bf16}) {
        for (uint32_t bits = 0; bits < 0x10000; bits++) {
            const double v = decode_real_lane(f, bits);
            const uint64_t back = encode_real_lane(f, v);
            res.trials++;
            if (std::isnan(v)) {
                if (!std::isnan(decode_real_lane(f, back)))
                    fail(res, std::string(format_name(f)) + " NaN did not stay NaN");
            } else if (back != bits) {
                fail(res, std::string(format_name(f)) + " round-trip broke at 0x" +
                              std::to_string(bits));
            }
        }
    }

    for (ElementFormat f :
         {ElementFormat::Int16, ElementFormat::Int8, ElementFormat::Uint8, ElementFormat::Int4}) {
        const uint64_t patterns = 1ull << lane_bits(f);
        for (uint64_t bits = 0; bits < patterns; bits++) {
            const int64_t v = decode_int_lane(f, bits);
            res.trials++;
            if (encode_int_lane(f, v) != bits)
                fail(res, std::string(format_name(f)) + " round-trip broke");
            if (v < int_format_min(f) || v > int_format_max(f))
                fail(res, std::string(format_name(f)) + " decoded outside its range");
        }
    }

    // Wrap and saturate around every interesting boundary, against plain
    // modular arithmetic.
    const int64_t bases[] = {0,
                             INT32_MAX,
                             INT32_MIN,
                             (int64_t)1 << 31,
                             -((int64_t)1 << 31),
                             (int64_t)1 << 32,
                             -((int64_t)1 << 32),
                             3 * ((int64_t)1 << 31),
                             -3 * ((int64_t)1 << 31),
                             4294836225};
    for (int64_t base : bases) {
        for (int64_t d = -3; d <= 3; d++) {
            const int64_t v = base + d;
            res.trials++;
            const int64_t mod = ((v % 4294967296) + 4294967296) % 4294967296;
            const int64_t wrapped_ref = mod >= 2147483648 ? mod - 4294967296 : mod;
            if (wrap_to_int32(v) != wrapped_ref) fail(res, "wrap mismatch at " + std::to_string(v));
            const int64_t clamp_ref = v > INT32_MAX ? INT32_MAX : (v < INT32_MIN ? INT32_MIN : v);
            if (saturate_to_int32(v) != clamp_ref)
                fail(res, "saturate mismatch at " + std::to_string(v));
            if (saturate_to_int32(saturate_to_int32(v)) != saturate_to_int32(v))
                fail(res, "saturate is not idempotent");
            if (wrap_to_int32(v + 4294967296) != wrap_to_int32(v))
                fail(res, "wrap is not periodic");
        }
    }
    if (wrap_to_int32(4294836225) != -131071) fail(res, "pinned wrap case failed");
    if (saturate_to_int32(4294836225) != INT32_MAX) fail(res, "pinned saturate case failed");

    // One-rounding narrowing and fused-madd identities.
    if (fp32_round_bits(1.0 + 0x1.0p-25) != 0x3F800000u)
        fail(res, "1 + 2^-25 must round to 1.0f");
    if (fp32_round_bits(0x1.0p128) != 0x7F800000u || fp32_round_bits(-0x1.0p128) != 0xFF800000u)
        fail(res, "overflow must narrow to infinity");
    if (fp32_round_bits(std::numeric_limits<double>::quiet_NaN()) != kCanonicalNanFp32)
        fail(res, "NaN must narrow to the canonical pattern");
    if (fused_multiply_add_fp64(1.0 + 0x1.0p-52, 1.0 - 0x1.0p-52, -1.0) != -0x1.0p-104)
        fail(res, "fused madd must keep the low product bits");

    if (res.pass) res.detail = "all patterns round-trip, folds exact";
    return res;
}

std::vector<CheckResult> run_all_checks(const CheckConfig& cfg) {
    return {check_integer_oracle(cfg), check_mask_laws(cfg),       check_sign_algebra(cfg),
            check_lint_lifecycle(cfg), check_dgemm(cfg),           check_sconv(cfg),
            check_numerics_roundtrip(cfg)};
}

} // namespace mma
