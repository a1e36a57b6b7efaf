#ifndef MMA_NUMERICS_HPP
#define MMA_NUMERICS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mma {

// Scalar lane formats that can appear in a 128-bit vector register or in an
// accumulator row.  Fp16 is IEEE binary16, Bf16 is bfloat16 (the top 16 bits
// of an IEEE binary32).  Int4 lanes are signed two's complement nibbles.
enum class ElementFormat {
    Fp64,
    Fp32,
    Fp16,
    Bf16,
    Int32,
    Int16,
    Int8,
    Uint8,
    Int4,
};

constexpr int lane_bits(ElementFormat f) {
    switch (f) {
        case ElementFormat::Fp64: return 64;
        case ElementFormat::Fp32: return 32;
        case ElementFormat::Fp16: return 16;
        case ElementFormat::Bf16: return 16;
        case ElementFormat::Int32: return 32;
        case ElementFormat::Int16: return 16;
        case ElementFormat::Int8: return 8;
        case ElementFormat::Uint8: return 8;
        case ElementFormat::Int4: return 4;
    }
    return 0;
}

constexpr int lanes_per_vsr(ElementFormat f) { return 128 / lane_bits(f); }

constexpr bool is_integer_format(ElementFormat f) {
    switch (f) {
        case ElementFormat::Int32:
        case ElementFormat::Int16:
        case ElementFormat::Int8:
        case ElementFormat::Uint8:
        case ElementFormat::Int4:
            return true;
        default:
            return false;
    }
}

std::string_view format_name(ElementFormat f);
std::optional<ElementFormat> parse_format(std::string_view name);

// Inclusive value range of an integer lane format.
int64_t int_format_min(ElementFormat f);
int64_t int_format_max(ElementFormat f);

// Wide integer type used for exact dot-product accumulation.  The largest
// intermediate (8 int16*int16 products plus a 32-bit addend) stays well below
// 2^63, so plain int64 arithmetic is exact everywhere it is used.
using WideInt = int64_t;

// Integer lane <-> value.  Raw bits are right-aligned in the uint64 and must
// not exceed lane_bits(f); encode requires the value to be in range.
int64_t decode_int_lane(ElementFormat f, uint64_t raw);
uint64_t encode_int_lane(ElementFormat f, int64_t value);

// Float lane <-> value.  Every Fp16/Bf16/Fp32 value converts exactly to
// double, so double is used as the universal scalar carrier.  Encoding
// rounds to nearest-even, overflows to infinity, and canonicalizes NaNs.
double decode_real_lane(ElementFormat f, uint64_t raw);
uint64_t encode_real_lane(ElementFormat f, double value);

// Canonical quiet NaN patterns emitted on writeback.
inline constexpr uint16_t kCanonicalNanFp16 = 0x7E00;
inline constexpr uint16_t kCanonicalNanBf16 = 0x7FC0;
inline constexpr uint32_t kCanonicalNanFp32 = 0x7FC00000u;
inline constexpr uint64_t kCanonicalNanFp64 = 0x7FF8000000000000ull;

int32_t saturate_to_int32(WideInt v);
int32_t wrap_to_int32(WideInt v);

// One round-to-nearest-even narrowing of a double intermediate to binary32.
// NaN inputs produce the canonical quiet NaN.
float fp32_round(double v);
uint32_t fp32_round_bits(double v);

// Writeback policy for fp64 results: NaNs are canonicalized, everything
// else passes through unchanged.
double fp64_writeback(double v);

// round(a*b + c) with exactly one rounding (IEEE 754 fusedMultiplyAdd).
double fused_multiply_add_fp64(double a, double b, double c);

} // namespace mma

#endif
