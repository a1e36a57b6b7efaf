#include "mma/numerics.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <limits>

namespace mma {

std::string_view format_name(ElementFormat f) {
    switch (f) {
        case ElementFormat::Fp64: return "fp64";
        case ElementFormat::Fp32: return "fp32";
        case ElementFormat::Fp16: return "fp16";
        case ElementFormat::Bf16: return "bf16";
        case ElementFormat::Int32: return "int32";
        case ElementFormat::Int16: return "int16";
        case ElementFormat::Int8: return "int8";
        case ElementFormat::Uint8: return "uint8";
        case ElementFormat::Int4: return "int4";
    }
    return "?";
}

std::optional<ElementFormat> parse_format(std::string_view name) {
    for (ElementFormat f : {ElementFormat::Fp64, ElementFormat::Fp32, ElementFormat::Fp16,
                            ElementFormat::Bf16, ElementFormat::Int32, ElementFormat::Int16,
                            ElementFormat::Int8, ElementFormat::Uint8, ElementFormat::Int4}) {
        if (name == format_name(f)) return f;
    }
    return std::nullopt;
}

int64_t int_format_min(ElementFormat f) {
    switch (f) {
        case ElementFormat::Int32: return INT32_MIN;
        case ElementFormat::Int16: return INT16_MIN;
        case ElementFormat::Int8: return INT8_MIN;
        case ElementFormat::Uint8: return 0;
        case ElementFormat::Int4: return -8;
        default: assert(false); return 0;
    }
}

int64_t int_format_max(ElementFormat f) {
    switch (f) {
        case ElementFormat::Int32: return INT32_MAX;
        case ElementFormat::Int16: return INT16_MAX;
        case ElementFormat::Int8: return INT8_MAX;
        case ElementFormat::Uint8: return 255;
        case ElementFormat::Int4: return 7;
        default: assert(false); return 0;
    }
}

int64_t decode_int_lane(ElementFormat f, uint64_t raw) {
    switch (f) {
        case ElementFormat::Int32: return (int32_t)(uint32_t)raw;
        case ElementFormat::Int16: return (int16_t)(uint16_t)raw;
        case ElementFormat::Int8: return (int8_t)(uint8_t)raw;
        case ElementFormat::Uint8: return (uint8_t)raw;
        case ElementFormat::Int4: {
            uint64_t n = raw & 0xF;
            return n >= 8 ? (int64_t)n - 16 : (int64_t)n;
        }
        default:
            assert(false);
            return 0;
    }
}

uint64_t encode_int_lane(ElementFormat f, int64_t value) {
    assert(value >= int_format_min(f) && value <= int_format_max(f));
    return (uint64_t)value & ((lane_bits(f) == 64) ? ~0ull : ((1ull << lane_bits(f)) - 1));
}

namespace {

// Decode a binary16/bfloat16 bit pattern.  Both formats embed exactly in
// double, so no rounding happens here.
double decode_small_float(uint64_t raw, int exp_bits, int man_bits) {
    const int bias = (1 << (exp_bits - 1)) - 1;
    const uint64_t man_mask = (1ull << man_bits) - 1;
    const int sign = (raw >> (exp_bits + man_bits)) & 1;
    const int exp = (int)((raw >> man_bits) & ((1ull << exp_bits) - 1));
    const uint64_t man = raw & man_mask;

    double mag;
    if (exp == (1 << exp_bits) - 1) {
        if (man != 0) return std::numeric_limits<double>::quiet_NaN();
        mag = std::numeric_limits<double>::infinity();
    } else if (exp == 0) {
        mag = std::ldexp((double)man, 1 - bias - man_bits);
    } else {
        mag = std::ldexp((double)(man | (1ull << man_bits)), exp - bias - man_bits);
    }
    return sign ? -mag : mag;
}

// Round a double to a small binary float with one round-to-nearest-even
// step, handling subnormals and overflow-to-infinity.
uint64_t encode_small_float(double value, int exp_bits, int man_bits, uint64_t canonical_nan) {
    const int bias = (1 << (exp_bits - 1)) - 1;
    const uint64_t exp_max = (1ull << exp_bits) - 1;

    if (std::isnan(value)) return canonical_nan;

    const uint64_t dbits = std::bit_cast<uint64_t>(value);
    const uint64_t sign = (dbits >> 63) << (exp_bits + man_bits);
    int dexp = (int)((dbits >> 52) & 0x7FF);
    uint64_t dman = dbits & ((1ull << 52) - 1);

    if (dexp == 0x7FF) // infinity (NaN handled above)
        return sign | (exp_max << man_bits);
    if (dexp == 0 && dman == 0) return sign;

    // Normalize to sig * 2^(e2) with bit 52 of sig set.
    if (dexp == 0) {
        int lead = std::countl_zero(dman) - 11;
        dman <<= lead + 1;
        dexp = -lead;
    }
    uint64_t sig = dman | (1ull << 52);
    int unbiased = dexp - 1023;

    int target_exp = unbiased + bias; // tentative biased target exponent
    int shift = 52 - man_bits;
    if (target_exp <= 0) {
        shift += 1 - target_exp;
        target_exp = 0;
    }
    if (shift >= 63) return sign; // far below the smallest subnormal

    uint64_t keep = sig >> shift;
    const uint64_t rem = sig & ((1ull << shift) - 1);
    const uint64_t half = 1ull << (shift - 1);
    if (rem > half || (rem == half && (keep & 1))) keep++;

    if (target_exp == 0) {
        // A carry into the implicit-bit position encodes as the smallest
        // normal (exponent field 1, mantissa 0), which is what we want.
        return sign | keep;
    }
    if (keep >> (man_bits + 1)) { // mantissa carry, e.g. 1.111.. -> 10.00..
        keep >>= 1;
        target_exp++;
    }
    if ((uint64_t)target_exp >= exp_max) // overflow
        return sign | (exp_max << man_bits);
    return sign | ((uint64_t)target_exp << man_bits) | (keep & ((1ull << man_bits) - 1));
}

} // namespace

double decode_real_lane(ElementFormat f, uint64_t raw) {
    switch (f) {
        case ElementFormat::Fp64:
            return std::bit_cast<double>(raw);
        case ElementFormat::Fp32:
            return (double)std::bit_cast<float>((uint32_t)raw);
        case ElementFormat::Fp16:
            return decode_small_float(raw & 0xFFFF, 5, 10);
        case ElementFormat::Bf16:
            return (double)std::bit_cast<float>((uint32_t)(raw & 0xFFFF) << 16);
        default:
            assert(false);
            return 0;
    }
}

uint64_t encode_real_lane(ElementFormat f, double value) {
    switch (f) {
        case ElementFormat::Fp64:
            return std::bit_cast<uint64_t>(fp64_writeback(value));
        case ElementFormat::Fp32:
            return fp32_round_bits(value);
        case ElementFormat::Fp16:
            return encode_small_float(value, 5, 10, kCanonicalNanFp16);
        case ElementFormat::Bf16:
            return encode_small_float(value, 8, 7, kCanonicalNanBf16);
        default:
            assert(false);
            return 0;
    }
}

int32_t saturate_to_int32(WideInt v) {
    if (v > INT32_MAX) return INT32_MAX;
    if (v < INT32_MIN) return INT32_MIN;
    return (int32_t)v;
}

int32_t wrap_to_int32(WideInt v) { return (int32_t)(uint32_t)(uint64_t)v; }

float fp32_round(double v) {
    if (std::isnan(v)) return std::bit_cast<float>(kCanonicalNanFp32);
    // Hardware double->float conversion is a single round-to-nearest-even
    // with overflow to infinity, which is exactly the semantics wanted here.
    return (float)v;
}

uint32_t fp32_round_bits(double v) { return std::bit_cast<uint32_t>(fp32_round(v)); }

double fp64_writeback(double v) {
    if (std::isnan(v)) return std::bit_cast<double>(kCanonicalNanFp64);
    return v;
}

double fused_multiply_add_fp64(double a, double b, double c) { return std::fma(a, b, c); }

} // namespace mma
