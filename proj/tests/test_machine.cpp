#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mma/machine.hpp"

using namespace mma;

namespace {

Vsr128 patterned(uint8_t seed) {
    Vsr128 v;
    for (int i = 0; i < 16; i++) v.b[i] = (uint8_t)(seed + 17 * i);
    return v;
}

} // namespace

TEST_CASE("lane accessors") {
    Vsr128 v;
    set_lane(v, ElementFormat::Int8, 0, 0xAB);
    set_lane(v, ElementFormat::Int8, 15, 0xCD);
    CHECK(v.b[0] == 0xAB);
    CHECK(v.b[15] == 0xCD);
    CHECK(get_lane(v, ElementFormat::Int8, 0) == 0xAB);

    v = Vsr128{};
    set_lane(v, ElementFormat::Int16, 1, 0x1234);
    CHECK(v.b[2] == 0x34); // little-endian within the lane
    CHECK(v.b[3] == 0x12);
    CHECK(get_lane(v, ElementFormat::Int16, 1) == 0x1234);

    v = Vsr128{};
    set_lane(v, ElementFormat::Int4, 0, 0xA);
    set_lane(v, ElementFormat::Int4, 1, 0xB);
    CHECK(v.b[0] == 0xBA); // even lane in the low nibble
    CHECK(get_lane(v, ElementFormat::Int4, 0) == 0xA);
    CHECK(get_lane(v, ElementFormat::Int4, 1) == 0xB);
    set_lane(v, ElementFormat::Int4, 31, 0x7);
    CHECK(v.b[15] == 0x70);

    v = Vsr128{};
    set_lane(v, ElementFormat::Fp64, 1, 0x0102030405060708ull);
    CHECK(v.b[8] == 0x08);
    CHECK(v.b[15] == 0x01);
    CHECK(get_lane(v, ElementFormat::Fp64, 1) == 0x0102030405060708ull);
}

TEST_CASE("hex serialization") {
    Vsr128 v;
    for (int i = 0; i < 16; i++) v.b[i] = (uint8_t)i;
    CHECK(to_hex(v) == "000102030405060708090a0b0c0d0e0f");
    CHECK(vsr_from_hex("000102030405060708090a0b0c0d0e0f") == v);
    CHECK_THROWS_AS(vsr_from_hex("00"), MmaError);
    CHECK_THROWS_AS(vsr_from_hex("zz0102030405060708090a0b0c0d0e0f"), MmaError);
}

TEST_CASE("fresh machine") {
    MachineState m(true);
    CHECK(m.strict());
    for (int i = 0; i < 64; i++) {
        CHECK(m.peek_vsr(i) == Vsr128{});
        CHECK(!m.vsr_locked(i));
    }
    for (int a = 0; a < 8; a++) CHECK(m.acc(a).state == AccState::Unprimed);
    CHECK(m.stats().total_instructions() == 0);
}

TEST_CASE("register file access checks") {
    MachineState m(true);
    CHECK_THROWS_AS(m.read_vsr(64), MmaError);
    CHECK_THROWS_AS(m.write_vsr(-1, Vsr128{}), MmaError);
    m.write_vsr(5, patterned(3));
    CHECK(m.read_vsr(5) == patterned(3));
}

TEST_CASE("priming locks the register group in strict mode") {
    MachineState m(true);
    m.write_vsr(8, patterned(1)); // acc2's group
    m.xxsetaccz(2);
    CHECK(m.acc(2).state == AccState::Primed);
    for (int i = 8; i < 12; i++) CHECK(m.vsr_locked(i));
    CHECK(!m.vsr_locked(7));
    CHECK(!m.vsr_locked(12));

    CHECK_THROWS_AS(m.read_vsr(8), MmaError);
    CHECK_THROWS_AS(m.write_vsr(11, Vsr128{}), MmaError);
    CHECK(m.peek_vsr(8) == patterned(1)); // peek bypasses the lock

    try {
        m.read_vsr(8);
    } catch (const MmaError& e) {
        CHECK(e.code() == ErrCode::VsrLocked);
    }
}

TEST_CASE("registers 32..63 never lock") {
    MachineState m(true);
    for (int a = 0; a < 8; a++) m.xxsetaccz(a);
    for (int i = 0; i < 32; i++) CHECK(m.vsr_locked(i));
    for (int i = 32; i < 64; i++) {
        CHECK(!m.vsr_locked(i));
        m.write_vsr(i, patterned((uint8_t)i)); // must not throw
    }
    CHECK(MachineState::owning_acc(0) == 0);
    CHECK(MachineState::owning_acc(31) == 7);
    CHECK(MachineState::owning_acc(32) == -1);
}

TEST_CASE("xxsetaccz zeroes and primes, even when already primed") {
    MachineState m(true);
    m.write_vsr(0, patterned(9));
    m.xxmtacc(0);
    CHECK(m.acc(0).rows[0] == patterned(9));
    m.xxsetaccz(0);
    CHECK(m.acc(0).state == AccState::Primed);
    CHECK(m.acc(0).rows[0] == Vsr128{});
}

TEST_CASE("xxmtacc and xxmfacc round-trip") {
    MachineState m(true);
    for (int r = 0; r < 4; r++) m.write_vsr(4 + r, patterned((uint8_t)(40 + r)));
    m.xxmtacc(1);
    CHECK(m.acc(1).state == AccState::Primed);
    for (int r = 0; r < 4; r++) CHECK(m.acc(1).rows[r] == patterned((uint8_t)(40 + r)));

    CHECK_THROWS_AS(m.xxmtacc(1), MmaError); // already primed

    m.xxmfacc(1);
    CHECK(m.acc(1).state == AccState::Deprimed);
    for (int r = 0; r < 4; r++) CHECK(m.read_vsr(4 + r) == patterned((uint8_t)(40 + r)));

    CHECK_THROWS_AS(m.xxmfacc(1), MmaError); // no longer primed
}

TEST_CASE("assemble and disassemble") {
    MachineState m(true);
    for (int r = 0; r < 4; r++) m.write_vsr(40 + r, patterned((uint8_t)(7 * r + 1)));
    m.assemble_acc(3, {40, 41, 42, 43});
    CHECK(m.acc(3).state == AccState::Primed);
    for (int r = 0; r < 4; r++) CHECK(m.acc(3).rows[r] == patterned((uint8_t)(7 * r + 1)));

    // re-assembling a primed accumulator is a fresh prime, not an error
    m.assemble_acc(3, {40, 40, 40, 40});
    CHECK(m.acc(3).rows[3] == patterned(1));

    m.disassemble_acc(3, {50, 51, 52, 53});
    CHECK(m.acc(3).state == AccState::Deprimed);
    for (int r = 0; r < 4; r++) CHECK(m.read_vsr(50 + r) == patterned(1));

    CHECK_THROWS_AS(m.disassemble_acc(3, {50, 51, 52, 53}), MmaError); // deprimed
}

TEST_CASE("disassemble may target its own register group") {
    MachineState m(true);
    m.write_vsr(44, patterned(5));
    m.assemble_acc(0, {44, 44, 44, 44});
    m.disassemble_acc(0, {0, 1, 2, 3});
    CHECK(m.acc(0).state == AccState::Deprimed);
    for (int r = 0; r < 4; r++) CHECK(m.read_vsr(r) == patterned(5));
}

TEST_CASE("disassemble cannot write another primed group") {
    MachineState m(true);
    m.write_vsr(44, patterned(5));
    m.assemble_acc(0, {44, 44, 44, 44});
    m.xxsetaccz(1);
    CHECK_THROWS_AS(m.disassemble_acc(0, {4, 5, 6, 7}), MmaError);
    // the failed move still deprimed the source
    CHECK(m.acc(0).state == AccState::Deprimed);
}

TEST_CASE("assemble cannot read a locked group") {
    MachineState m(true);
    m.xxsetaccz(1);
    CHECK_THROWS_AS(m.assemble_acc(0, {4, 5, 6, 7}), MmaError);
}

TEST_CASE("permissive mode observes violations") {
    MachineState m(false);
    CHECK(!m.strict());
    m.xxsetaccz(0);
    CHECK(m.vsr_locked(0)); // the condition is still reported...
    m.write_vsr(0, patterned(1)); // ...but not enforced
    CHECK(m.read_vsr(0) == patterned(1));
    m.xxmtacc(0);            // re-prime without complaint
    m.xxmfacc(0);
    m.xxmfacc(0);            // move-from a deprimed accumulator: tolerated
    CHECK(m.acc(0).state == AccState::Deprimed);
}

TEST_CASE("accumulator views decode by layout") {
    MachineState m(true);
    Vsr128 row;
    set_lane(row, ElementFormat::Fp32, 0, encode_real_lane(ElementFormat::Fp32, 1.5));
    set_lane(row, ElementFormat::Fp32, 1, encode_real_lane(ElementFormat::Fp32, -2.0));
    set_lane(row, ElementFormat::Fp32, 2, encode_real_lane(ElementFormat::Fp32, 0.25));
    set_lane(row, ElementFormat::Fp32, 3, encode_real_lane(ElementFormat::Fp32, 8.0));
    m.write_vsr(44, row);
    m.assemble_acc(0, {44, 44, 44, 44});

    const AccView v32 = m.view_acc(0, AccLayout::Fp32_4x4);
    CHECK(v32.cols() == 4);
    CHECK(v32.v[0][0] == 1.5);
    CHECK(v32.v[3][1] == -2.0);
    CHECK(v32.v[2][2] == 0.25);
    CHECK(v32.v[1][3] == 8.0);

    const AccView vi = m.view_acc(0, AccLayout::Int32_4x4);
    CHECK(vi.v[0][0] == (double)(int32_t)0x3FC00000); // same bits, integer reading

    const AccView v64 = m.view_acc(0, AccLayout::Fp64_4x2);
    CHECK(v64.cols() == 2);

    MachineState s(true);
    CHECK_THROWS_AS(s.view_acc(0, AccLayout::Fp32_4x4), MmaError); // unprimed
}

TEST_CASE("statistics counters") {
    MachineState m(true);
    m.xxsetaccz(0);
    m.xxmfacc(0);
    m.stats().record("xvf32ger", true);
    CHECK(m.stats().total_instructions() == 3);
    CHECK(m.stats().ger_count == 1);
    CHECK(m.stats().instructions.at("xxsetaccz") == 1);
    CHECK(m.stats().instructions.at("xxmfacc") == 1);
}
