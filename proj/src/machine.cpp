#include "mma/machine.hpp"

#include <cassert>
#include <cstring>

namespace mma {

uint64_t get_lane(const Vsr128& v, ElementFormat f, int lane) {
    const int bits = lane_bits(f);
    assert(lane >= 0 && lane < lanes_per_vsr(f));
    if (bits == 4) {
        uint8_t byte = v.b[lane / 2];
        return (lane & 1) ? (byte >> 4) : (byte & 0xF);
    }
    const int nbytes = bits / 8;
    uint64_t out = 0;
    for (int i = 0; i < nbytes; i++)
        out |= (uint64_t)v.b[lane * nbytes + i] << (8 * i);
    return out;
}

void set_lane(Vsr128& v, ElementFormat f, int lane, uint64_t bits) {
    const int width = lane_bits(f);
    assert(lane >= 0 && lane < lanes_per_vsr(f));
    if (width == 4) {
        uint8_t& byte = v.b[lane / 2];
        if (lane & 1)
            byte = (uint8_t)((byte & 0x0F) | ((bits & 0xF) << 4));
        else
            byte = (uint8_t)((byte & 0xF0) | (bits & 0xF));
        return;
    }
    const int nbytes = width / 8;
    for (int i = 0; i < nbytes; i++)
        v.b[lane * nbytes + i] = (uint8_t)(bits >> (8 * i));
}

std::string to_hex(const Vsr128& v) {
    static const char* digits = "0123456789abcdef";
    std::string out(32, '0');
    for (int i = 0; i < 16; i++) {
        out[2 * i] = digits[v.b[i] >> 4];
        out[2 * i + 1] = digits[v.b[i] & 0xF];
    }
    return out;
}

static int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

Vsr128 vsr_from_hex(std::string_view hex) {
    if (hex.size() != 32)
        throw MmaError(ErrCode::SyntaxError, "hex literal must be exactly 32 digits");
    Vsr128 v;
    for (int i = 0; i < 16; i++) {
        int hi = hex_digit(hex[2 * i]);
        int lo = hex_digit(hex[2 * i + 1]);
        if (hi < 0 || lo < 0)
            throw MmaError(ErrCode::SyntaxError, "bad hex digit in register literal");
        v.b[i] = (uint8_t)((hi << 4) | lo);
    }
    return v;
}

std::string_view acc_state_name(AccState s) {
    switch (s) {
        case AccState::Unprimed: return "unprimed";
        case AccState::Primed: return "primed";
        case AccState::Deprimed: return "deprimed";
    }
    return "?";
}

std::optional<AccLayout> parse_acc_layout(std::string_view name) {
    if (name == "fp64") return AccLayout::Fp64_4x2;
    if (name == "fp32") return AccLayout::Fp32_4x4;
    if (name == "int32") return AccLayout::Int32_4x4;
    return std::nullopt;
}

std::string_view acc_layout_name(AccLayout l) {
    switch (l) {
        case AccLayout::Fp64_4x2: return "fp64";
        case AccLayout::Fp32_4x4: return "fp32";
        case AccLayout::Int32_4x4: return "int32";
    }
    return "?";
}

uint64_t StatCounters::total_instructions() const {
    uint64_t n = 0;
    for (const auto& [_, c] : instructions) n += c;
    return n;
}

void MachineState::check_vsr_index(int idx) const {
    if (idx < 0 || idx > 63)
        throw MmaError(ErrCode::OperandError, "vsr index out of range: " + std::to_string(idx));
}

void MachineState::check_acc_index(int idx) const {
    if (idx < 0 || idx > 7)
        throw MmaError(ErrCode::OperandError, "acc index out of range: " + std::to_string(idx));
}

bool MachineState::vsr_locked(int idx) const {
    int owner = owning_acc(idx);
    return owner >= 0 && acc_[owner].state == AccState::Primed;
}

void MachineState::check_unlocked(int idx) const {
    if (strict_ && vsr_locked(idx))
        throw MmaError(ErrCode::VsrLocked,
                       "vsr" + std::to_string(idx) + " belongs to primed acc" +
                           std::to_string(owning_acc(idx)));
}

const Vsr128& MachineState::read_vsr(int idx) const {
    check_vsr_index(idx);
    check_unlocked(idx);
    return vsr_[idx];
}

void MachineState::write_vsr(int idx, const Vsr128& v) {
    check_vsr_index(idx);
    check_unlocked(idx);
    vsr_[idx] = v;
}

const Vsr128& MachineState::peek_vsr(int idx) const {
    check_vsr_index(idx);
    return vsr_[idx];
}

const Accumulator& MachineState::acc(int idx) const {
    check_acc_index(idx);
    return acc_[idx];
}

Accumulator& MachineState::acc_mut(int idx) {
    check_acc_index(idx);
    return acc_[idx];
}

void MachineState::set_acc_state(int idx, AccState s) {
    check_acc_index(idx);
    acc_[idx].state = s;
}

void MachineState::xxsetaccz(int acc) {
    check_acc_index(acc);
    acc_[acc].rows = {};
    acc_[acc].state = AccState::Primed;
    stats_.record("xxsetaccz");
}

void MachineState::xxmtacc(int acc) {
    check_acc_index(acc);
    if (strict_ && acc_[acc].state == AccState::Primed)
        throw MmaError(ErrCode::AccAlreadyPrimed, "xxmtacc on primed acc" + std::to_string(acc));
    for (int r = 0; r < 4; r++) acc_[acc].rows[r] = vsr_[4 * acc + r];
    acc_[acc].state = AccState::Primed;
    stats_.record("xxmtacc");
}

void MachineState::xxmfacc(int acc) {
    check_acc_index(acc);
    if (strict_ && acc_[acc].state != AccState::Primed)
        throw MmaError(ErrCode::AccNotPrimed, "xxmfacc on acc" + std::to_string(acc) + " in state " +
                                                  std::string(acc_state_name(acc_[acc].state)));
    for (int r = 0; r < 4; r++) vsr_[4 * acc + r] = acc_[acc].rows[r];
    acc_[acc].state = AccState::Deprimed;
    stats_.record("xxmfacc");
}

void MachineState::assemble_acc(int acc, const std::array<int, 4>& sources) {
    check_acc_index(acc);
    for (int s : sources) {
        check_vsr_index(s);
        check_unlocked(s);
    }
    for (int r = 0; r < 4; r++) acc_[acc].rows[r] = vsr_[sources[r]];
    acc_[acc].state = AccState::Primed;
    stats_.record("assemble");
}

void MachineState::disassemble_acc(int acc, const std::array<int, 4>& dests) {
    check_acc_index(acc);
    if (strict_ && acc_[acc].state != AccState::Primed)
        throw MmaError(ErrCode::AccNotPrimed,
                       "disassemble of acc" + std::to_string(acc) + " in state " +
                           std::string(acc_state_name(acc_[acc].state)));
    // Depriming first makes the accumulator's own group a legal destination.
    acc_[acc].state = AccState::Deprimed;
    for (int d : dests) {
        check_vsr_index(d);
        check_unlocked(d);
    }
    for (int r = 0; r < 4; r++) vsr_[dests[r]] = acc_[acc].rows[r];
    stats_.record("disassemble");
}

AccView MachineState::view_acc(int acc, AccLayout layout) const {
    check_acc_index(acc);
    if (strict_ && acc_[acc].state != AccState::Primed)
        throw MmaError(ErrCode::AccNotPrimed, "view of acc" + std::to_string(acc) + " in state " +
                                                  std::string(acc_state_name(acc_[acc].state)));
    AccView out;
    out.layout = layout;
    const ElementFormat f = acc_layout_format(layout);
    for (int r = 0; r < 4; r++) {
        for (int c = 0; c < acc_layout_cols(layout); c++) {
            uint64_t raw = get_lane(acc_[acc].rows[r], f, c);
            out.v[r][c] = is_integer_format(f) ? (double)decode_int_lane(f, raw)
                                               : decode_real_lane(f, raw);
        }
    }
    return out;
}

} // namespace mma
