#ifndef MMA_ISA_HPP
#define MMA_ISA_HPP

#include "mma/machine.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace mma {

// Rank-k outer-product update families.  Every family consumes a 4xK input
// matrix X and a 4xK (2xK for F64GER) input matrix Y and updates the target
// accumulator with X * Y^T.
enum class GerFamily {
    I16GER2,  // k=2, int16 x int16   -> int32 4x4
    I8GER4,   // k=4, int8  x uint8   -> int32 4x4
    I4GER8,   // k=8, int4  x int4    -> int32 4x4
    BF16GER2, // k=2, bf16  x bf16    -> fp32  4x4
    F16GER2,  // k=2, fp16  x fp16    -> fp32  4x4
    F32GER,   // k=1, fp32  x fp32    -> fp32  4x4
    F64GER,   // k=1, fp64  x fp64    -> fp64  4x2 (X spans a vsr pair)
};

// Suffix on the mnemonic.  None writes X*Y^T and primes the target; S is the
// saturating non-accumulating form; the two-letter forms accumulate with the
// written product/accumulator signs.  SPP is the saturating accumulate.
enum class AccumulateMode { None, PP, NP, PN, NN, S, SPP };

struct FamilyInfo {
    GerFamily family;
    std::string_view root; // base mnemonic, e.g. "xvi16ger2"
    int rank;              // K, products per element
    ElementFormat x_fmt;
    ElementFormat y_fmt;
    int y_rows; // 4, except 2 for F64GER
    AccLayout layout;
    bool is_int;
    int p_mask_width; // rank for k>=2 families, 0 for rank-1
};

const FamilyInfo& family_info(GerFamily f);
bool mode_allowed(GerFamily f, AccumulateMode m);
constexpr bool accumulating(AccumulateMode m) {
    return m == AccumulateMode::PP || m == AccumulateMode::NP || m == AccumulateMode::PN ||
           m == AccumulateMode::NN || m == AccumulateMode::SPP;
}

// Row/column/product enable masks for the pm-prefixed forms.  Bit i of each
// field enables index i; to_string renders index 0 first, which matches the
// written order in trace files ("1010" enables indices 0 and 2).
struct MaskSet {
    uint8_t x = 0xF;
    uint8_t y = 0xF;
    uint8_t p = 0xFF;

    bool x_on(int i) const { return (x >> i) & 1; }
    bool y_on(int j) const { return (y >> j) & 1; }
    bool p_on(int t) const { return (p >> t) & 1; }

    bool operator==(const MaskSet&) const = default;
};

MaskSet all_ones_masks(GerFamily f);
// Parse a written mask string such as "1010" (index 0 first).
uint8_t mask_from_string(std::string_view s, int width);
std::string mask_to_string(uint8_t bits, int width);

struct GerInstruction {
    GerFamily family = GerFamily::F32GER;
    AccumulateMode mode = AccumulateMode::None;
    int acc = 0;
    int x_vsr = 0; // for F64GER the even register of the even:odd pair
    int y_vsr = 0;
    std::optional<MaskSet> masks; // engaged iff this is a pm-prefixed form

    bool operator==(const GerInstruction&) const = default;
};

struct DecodedMnemonic {
    GerFamily family;
    AccumulateMode mode;
    bool prefixed;
};

// "pmxvf16ger2pp" -> {F16GER2, PP, true}.  Raises UnknownMnemonic for an
// unrecognized root or suffix and IllegalSuffix for a recognized suffix the
// family does not support (e.g. "xvi4ger8np").
DecodedMnemonic decode_mnemonic(std::string_view text);

std::string mnemonic_of(GerFamily f, AccumulateMode m, bool prefixed);
std::string mnemonic_of(const GerInstruction& instr);

// Execute one rank-k update against machine state.
//
// Semantics per element (i, j) of the target:
//   enabled products: t with x_mask[i], y_mask[j], p_mask[t] all set
//   integer:  S = sum of X[i][t]*Y[j][t] over enabled t, exact in 64 bits,
//             then exactly one wrap (modulo) or saturate to int32
//   float:    products widened exactly to binary64, summed left to right,
//             accumulator applied with the mode's signs, then one rounding
//             to the target width (fp64 accumulate uses a fused madd)
// Elements with no enabled product are written as zero by non-accumulating
// modes and left untouched (bit-identical) by accumulating modes.
//
// Non-accumulating modes prime the target; accumulating modes require it
// primed (strict mode).  Operand registers must not lie in the target's
// group; in strict mode they must not be locked by any primed accumulator.
void execute_ger(MachineState& m, const GerInstruction& instr);

} // namespace mma

#endif
