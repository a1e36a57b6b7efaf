#include "mma/isa.hpp"

#include <bit>
#include <cassert>

namespace mma {

namespace {

constexpr FamilyInfo kFamilies[] = {
    {GerFamily::I16GER2, "xvi16ger2", 2, ElementFormat::Int16, ElementFormat::Int16, 4,
     AccLayout::Int32_4x4, true, 2},
    {GerFamily::I8GER4, "xvi8ger4", 4, ElementFormat::Int8, ElementFormat::Uint8, 4,
     AccLayout::Int32_4x4, true, 4},
    {GerFamily::I4GER8, "xvi4ger8", 8, ElementFormat::Int4, ElementFormat::Int4, 4,
     AccLayout::Int32_4x4, true, 8},
    {GerFamily::BF16GER2, "xvbf16ger2", 2, ElementFormat::Bf16, ElementFormat::Bf16, 4,
     AccLayout::Fp32_4x4, false, 2},
    {GerFamily::F16GER2, "xvf16ger2", 2, ElementFormat::Fp16, ElementFormat::Fp16, 4,
     AccLayout::Fp32_4x4, false, 2},
    {GerFamily::F32GER, "xvf32ger", 1, ElementFormat::Fp32, ElementFormat::Fp32, 4,
     AccLayout::Fp32_4x4, false, 0},
    {GerFamily::F64GER, "xvf64ger", 1, ElementFormat::Fp64, ElementFormat::Fp64, 2,
     AccLayout::Fp64_4x2, false, 0},
};

std::string_view suffix_of(AccumulateMode m) {
    switch (m) {
        case AccumulateMode::None: return "";
        case AccumulateMode::PP: return "pp";
        case AccumulateMode::NP: return "np";
        case AccumulateMode::PN: return "pn";
        case AccumulateMode::NN: return "nn";
        case AccumulateMode::S: return "s";
        case AccumulateMode::SPP: return "spp";
    }
    return "";
}

} // namespace

const FamilyInfo& family_info(GerFamily f) {
    for (const FamilyInfo& info : kFamilies)
        if (info.family == f) return info;
    assert(false);
    return kFamilies[0];
}

bool mode_allowed(GerFamily f, AccumulateMode m) {
    switch (f) {
        case GerFamily::I16GER2:
            return m == AccumulateMode::None || m == AccumulateMode::S ||
                   m == AccumulateMode::PP || m == AccumulateMode::SPP;
        case GerFamily::I8GER4:
            return m == AccumulateMode::None || m == AccumulateMode::PP ||
                   m == AccumulateMode::SPP;
        case GerFamily::I4GER8:
            return m == AccumulateMode::None || m == AccumulateMode::PP;
        default:
            return m == AccumulateMode::None || m == AccumulateMode::PP ||
                   m == AccumulateMode::NP || m == AccumulateMode::PN ||
                   m == AccumulateMode::NN;
    }
}

MaskSet all_ones_masks(GerFamily f) {
    const FamilyInfo& info = family_info(f);
    MaskSet ms;
    ms.x = 0xF;
    ms.y = (uint8_t)((1u << info.y_rows) - 1);
    ms.p = info.p_mask_width ? (uint8_t)((1u << info.p_mask_width) - 1) : 1;
    return ms;
}

uint8_t mask_from_string(std::string_view s, int width) {
    if ((int)s.size() != width)
        throw MmaError(ErrCode::MaskWidthError, "mask \"" + std::string(s) + "\" must have " +
                                                    std::to_string(width) + " bits");
    uint8_t bits = 0;
    for (int i = 0; i < width; i++) {
        if (s[i] == '1')
            bits |= (uint8_t)(1u << i);
        else if (s[i] != '0')
            throw MmaError(ErrCode::MaskWidthError, "mask bits must be 0 or 1");
    }
    return bits;
}

std::string mask_to_string(uint8_t bits, int width) {
    std::string out((size_t)width, '0');
    for (int i = 0; i < width; i++)
        if ((bits >> i) & 1) out[i] = '1';
    return out;
}

DecodedMnemonic decode_mnemonic(std::string_view text) {
    std::string_view rest = text;
    bool prefixed = false;
    if (rest.starts_with("pm")) {
        prefixed = true;
        rest.remove_prefix(2);
    }
    for (const FamilyInfo& info : kFamilies) {
        if (!rest.starts_with(info.root)) continue;
        std::string_view suffix = rest.substr(info.root.size());
        AccumulateMode mode;
        if (suffix == "")
            mode = AccumulateMode::None;
        else if (suffix == "s")
            mode = AccumulateMode::S;
        else if (suffix == "pp")
            mode = AccumulateMode::PP;
        else if (suffix == "spp")
            mode = AccumulateMode::SPP;
        else if (suffix == "np")
            mode = AccumulateMode::NP;
        else if (suffix == "pn")
            mode = AccumulateMode::PN;
        else if (suffix == "nn")
            mode = AccumulateMode::NN;
        else
            throw MmaError(ErrCode::UnknownMnemonic, std::string(text));
        if (!mode_allowed(info.family, mode))
            throw MmaError(ErrCode::IllegalSuffix,
                           "\"" + std::string(suffix) + "\" is not valid for " +
                               std::string(info.root));
        return {info.family, mode, prefixed};
    }
    throw MmaError(ErrCode::UnknownMnemonic, std::string(text));
}

std::string mnemonic_of(GerFamily f, AccumulateMode m, bool prefixed) {
    std::string out = prefixed ? "pm" : "";
    out += family_info(f).root;
    out += suffix_of(m);
    return out;
}

std::string mnemonic_of(const GerInstruction& instr) {
    return mnemonic_of(instr.family, instr.mode, instr.masks.has_value());
}

namespace {

void validate_masks(const FamilyInfo& info, const MaskSet& ms) {
    if (ms.x & ~0xF)
        throw MmaError(ErrCode::MaskWidthError, "x mask wider than 4 bits");
    if (ms.y & ~((1u << info.y_rows) - 1))
        throw MmaError(ErrCode::MaskWidthError,
                       "y mask wider than " + std::to_string(info.y_rows) + " bits");
    const uint32_t p_width = info.p_mask_width ? info.p_mask_width : 1;
    if (ms.p & ~((1u << p_width) - 1))
        throw MmaError(ErrCode::MaskWidthError,
                       "p mask wider than " + std::to_string(p_width) + " bits");
}

} // namespace

void execute_ger(MachineState& m, const GerInstruction& instr) {
    const FamilyInfo& info = family_info(instr.family);

    if (!mode_allowed(instr.family, instr.mode))
        throw MmaError(ErrCode::IllegalSuffix, "mode not valid for " + std::string(info.root));
    if (instr.acc < 0 || instr.acc > 7)
        throw MmaError(ErrCode::OperandError, "acc index out of range");
    if (instr.x_vsr < 0 || instr.x_vsr > 63 || instr.y_vsr < 0 || instr.y_vsr > 63)
        throw MmaError(ErrCode::OperandError, "vsr index out of range");

    const bool paired_x = instr.family == GerFamily::F64GER;
    if (paired_x && ((instr.x_vsr & 1) || instr.x_vsr > 62))
        throw MmaError(ErrCode::InvalidVsrPair,
                       "x operand of xvf64ger must be an even:odd register pair");

    MaskSet ms = instr.masks ? *instr.masks : all_ones_masks(instr.family);
    if (instr.masks) validate_masks(info, ms);

    // Operands must avoid the target's VSR group entirely, and in strict
    // mode must not be locked by any other primed accumulator.
    const int group_lo = 4 * instr.acc;
    const int x_ops = paired_x ? 2 : 1;
    for (int k = 0; k < x_ops; k++) {
        int v = instr.x_vsr + k;
        if (v >= group_lo && v < group_lo + 4)
            throw MmaError(ErrCode::OperandOverlapsAccumulator,
                           "x operand vsr" + std::to_string(v) + " lies in acc" +
                               std::to_string(instr.acc) + "'s group");
    }
    if (instr.y_vsr >= group_lo && instr.y_vsr < group_lo + 4)
        throw MmaError(ErrCode::OperandOverlapsAccumulator,
                       "y operand vsr" + std::to_string(instr.y_vsr) + " lies in acc" +
                           std::to_string(instr.acc) + "'s group");

    const bool acc_mode = accumulating(instr.mode);
    if (m.strict()) {
        for (int k = 0; k < x_ops; k++)
            if (m.vsr_locked(instr.x_vsr + k))
                throw MmaError(ErrCode::VsrLocked, "x operand vsr" + std::to_string(instr.x_vsr + k) +
                                                       " is locked by a primed accumulator");
        if (m.vsr_locked(instr.y_vsr))
            throw MmaError(ErrCode::VsrLocked, "y operand vsr" + std::to_string(instr.y_vsr) +
                                                   " is locked by a primed accumulator");
        if (acc_mode && m.acc(instr.acc).state != AccState::Primed)
            throw MmaError(ErrCode::AccNotPrimed,
                           mnemonic_of(instr) + " needs acc" + std::to_string(instr.acc) +
                               " primed, found " +
                               std::string(acc_state_name(m.acc(instr.acc).state)));
    }

    const int k_rank = info.rank;
    const int y_rows = info.y_rows;

    // Decode the 4xK and (y_rows)xK operand matrices.  Element (i, t) of a
    // 4xK input sits in lane i*K + t; the fp64 X vector spans two registers
    // with two lanes each.
    double xd[4][8], yd[4][8];
    int64_t xi[4][8], yi[4][8];
    if (instr.family == GerFamily::F64GER) {
        const Vsr128& x0 = m.peek_vsr(instr.x_vsr);
        const Vsr128& x1 = m.peek_vsr(instr.x_vsr + 1);
        for (int i = 0; i < 4; i++) {
            const Vsr128& src = i < 2 ? x0 : x1;
            xd[i][0] = decode_real_lane(ElementFormat::Fp64, get_lane(src, ElementFormat::Fp64, i & 1));
        }
        const Vsr128& y = m.peek_vsr(instr.y_vsr);
        for (int j = 0; j < 2; j++)
            yd[j][0] = decode_real_lane(ElementFormat::Fp64, get_lane(y, ElementFormat::Fp64, j));
    } else {
        const Vsr128& x = m.peek_vsr(instr.x_vsr);
        const Vsr128& y = m.peek_vsr(instr.y_vsr);
        for (int i = 0; i < 4; i++) {
            for (int t = 0; t < k_rank; t++) {
                uint64_t xr = get_lane(x, info.x_fmt, i * k_rank + t);
                uint64_t yr = get_lane(y, info.y_fmt, i * k_rank + t);
                if (info.is_int) {
                    xi[i][t] = decode_int_lane(info.x_fmt, xr);
                    yi[i][t] = decode_int_lane(info.y_fmt, yr);
                } else {
                    xd[i][t] = decode_real_lane(info.x_fmt, xr);
                    yd[i][t] = decode_real_lane(info.y_fmt, yr);
                }
            }
        }
    }

    Accumulator& acc = m.acc_mut(instr.acc);
    const ElementFormat acc_fmt = acc_layout_format(info.layout);

    for (int i = 0; i < 4; i++) {
        for (int j = 0; j < y_rows; j++) {
            int enabled = 0;
            for (int t = 0; t < k_rank; t++)
                if (ms.x_on(i) && ms.y_on(j) && ms.p_on(t)) enabled |= 1 << t;

            if (!enabled) {
                // No product feeds this element: non-accumulating modes
                // zero-fill it, accumulating modes must not touch it.
                if (!acc_mode) set_lane(acc.rows[i], acc_fmt, j, 0);
                continue;
            }

            if (info.is_int) {
                WideInt s = 0;
                for (int t = 0; t < k_rank; t++)
                    if ((enabled >> t) & 1) s += xi[i][t] * yi[j][t];
                int32_t out;
                switch (instr.mode) {
                    case AccumulateMode::None: out = wrap_to_int32(s); break;
                    case AccumulateMode::S: out = saturate_to_int32(s); break;
                    case AccumulateMode::PP:
                        out = wrap_to_int32(s + decode_int_lane(ElementFormat::Int32,
                                                                get_lane(acc.rows[i], acc_fmt, j)));
                        break;
                    case AccumulateMode::SPP:
                        out = saturate_to_int32(
                            s + decode_int_lane(ElementFormat::Int32, get_lane(acc.rows[i], acc_fmt, j)));
                        break;
                    default:
                        throw MmaError(ErrCode::IllegalSuffix, "integer families have no np/pn/nn form");
                }
                set_lane(acc.rows[i], acc_fmt, j, (uint32_t)out);
            } else if (instr.family == GerFamily::F64GER) {
                const double prod = xd[i][0] * yd[j][0];
                double out;
                switch (instr.mode) {
                    case AccumulateMode::None: out = prod; break;
                    case AccumulateMode::PP:
                        out = fused_multiply_add_fp64(
                            xd[i][0], yd[j][0],
                            decode_real_lane(ElementFormat::Fp64, get_lane(acc.rows[i], acc_fmt, j)));
                        break;
                    case AccumulateMode::NP:
                        out = fused_multiply_add_fp64(
                            -xd[i][0], yd[j][0],
                            decode_real_lane(ElementFormat::Fp64, get_lane(acc.rows[i], acc_fmt, j)));
                        break;
                    case AccumulateMode::PN:
                        out = fused_multiply_add_fp64(
                            xd[i][0], yd[j][0],
                            -decode_real_lane(ElementFormat::Fp64, get_lane(acc.rows[i], acc_fmt, j)));
                        break;
                    case AccumulateMode::NN:
                        out = fused_multiply_add_fp64(
                            -xd[i][0], yd[j][0],
                            -decode_real_lane(ElementFormat::Fp64, get_lane(acc.rows[i], acc_fmt, j)));
                        break;
                    default:
                        throw MmaError(ErrCode::IllegalSuffix, "xvf64ger has no s/spp form");
                }
                set_lane(acc.rows[i], acc_fmt, j, std::bit_cast<uint64_t>(fp64_writeback(out)));
            } else {
                // fp32-target families: exact binary64 products, summed left
                // to right, one narrowing at the end.
                double s = 0.0;
                bool first = true;
                for (int t = 0; t < k_rank; t++) {
                    if (!((enabled >> t) & 1)) continue;
                    const double term = xd[i][t] * yd[j][t];
                    s = first ? term : s + term;
                    first = false;
                }
                double wide;
                switch (instr.mode) {
                    case AccumulateMode::None: wide = s; break;
                    case AccumulateMode::PP:
                        wide = s + decode_real_lane(ElementFormat::Fp32, get_lane(acc.rows[i], acc_fmt, j));
                        break;
                    case AccumulateMode::NP:
                        wide = -s + decode_real_lane(ElementFormat::Fp32, get_lane(acc.rows[i], acc_fmt, j));
                        break;
                    case AccumulateMode::PN:
                        wide = s - decode_real_lane(ElementFormat::Fp32, get_lane(acc.rows[i], acc_fmt, j));
                        break;
                    case AccumulateMode::NN:
                        wide = -s - decode_real_lane(ElementFormat::Fp32, get_lane(acc.rows[i], acc_fmt, j));
                        break;
                    default:
                        throw MmaError(ErrCode::IllegalSuffix, "s/spp are integer-only forms");
                }
                set_lane(acc.rows[i], acc_fmt, j, fp32_round_bits(wide));
            }
        }
    }

    if (!acc_mode) acc.state = AccState::Primed;

    // Counters: one multiply-add per enabled product per element.
    const uint64_t cx = (uint64_t)std::popcount(ms.x);
    const uint64_t cy = (uint64_t)std::popcount((uint8_t)(ms.y & ((1u << y_rows) - 1)));
    const uint64_t cp =
        info.p_mask_width ? (uint64_t)std::popcount((uint8_t)(ms.p & ((1u << k_rank) - 1))) : 1;
    const uint64_t madds = cx * cy * cp;
    if (info.is_int)
        m.stats().int_ops += madds;
    else
        m.stats().flops += 2 * madds;
    m.stats().record(mnemonic_of(instr), /*is_ger=*/true);
}

} // namespace mma
