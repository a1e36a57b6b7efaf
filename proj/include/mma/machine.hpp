#ifndef MMA_MACHINE_HPP
#define MMA_MACHINE_HPP

#include "mma/error.hpp"
#include "mma/numerics.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>

namespace mma {

// One 128-bit vector-scalar register.  b[0] is the lowest-addressed byte;
// lane values are stored little-endian inside their lane, and lane 0 starts
// at byte 0.  Int4 lanes pack two per byte, even lane in the low nibble.
struct Vsr128 {
    std::array<uint8_t, 16> b{};
    bool operator==(const Vsr128&) const = default;
};

uint64_t get_lane(const Vsr128& v, ElementFormat f, int lane);
void set_lane(Vsr128& v, ElementFormat f, int lane, uint64_t bits);

std::string to_hex(const Vsr128& v); // 32 lowercase digits, byte 0 first
Vsr128 vsr_from_hex(std::string_view hex);

// Accumulator lifecycle.  Unprimed means never primed since reset; Deprimed
// means the contents were moved out and the accumulator must be primed again
// before further arithmetic.  The distinction matters for diagnostics only;
// both states reject accumulating reads.
enum class AccState { Unprimed, Primed, Deprimed };

std::string_view acc_state_name(AccState s);

// View layouts for a 512-bit accumulator: 4 rows of 128 bits, element (r, c)
// lives in lane c of row r.
enum class AccLayout { Fp64_4x2, Fp32_4x4, Int32_4x4 };

constexpr int acc_layout_cols(AccLayout l) { return l == AccLayout::Fp64_4x2 ? 2 : 4; }
constexpr ElementFormat acc_layout_format(AccLayout l) {
    switch (l) {
        case AccLayout::Fp64_4x2: return ElementFormat::Fp64;
        case AccLayout::Fp32_4x4: return ElementFormat::Fp32;
        case AccLayout::Int32_4x4: return ElementFormat::Int32;
    }
    return ElementFormat::Fp64;
}

std::optional<AccLayout> parse_acc_layout(std::string_view name);
std::string_view acc_layout_name(AccLayout l);

struct Accumulator {
    std::array<Vsr128, 4> rows{};
    AccState state = AccState::Unprimed;
};

// 4x4 (or 4x2) readout of an accumulator.  Every supported element type
// converts exactly to double, so double carries all three layouts.
struct AccView {
    AccLayout layout = AccLayout::Fp32_4x4;
    double v[4][4] = {};
    int cols() const { return acc_layout_cols(layout); }
};

struct StatCounters {
    std::map<std::string, uint64_t> instructions; // per-mnemonic counts
    uint64_t ger_count = 0;                       // rank-k update instructions only
    uint64_t flops = 0;                           // 2 per enabled float multiply-add
    uint64_t int_ops = 0;                         // enabled integer multiply-adds

    void record(const std::string& mnemonic, bool is_ger = false) {
        instructions[mnemonic]++;
        if (is_ger) ger_count++;
    }
    uint64_t total_instructions() const;
    bool operator==(const StatCounters&) const = default;
};

// Architectural state: 64 VSRs, 8 accumulators, counters.
//
// Accumulator j is associated with VSR[4j] .. VSR[4j+3].  While j is Primed,
// strict mode treats those four registers as locked: reading or writing them
// raises VsrLocked.  VSR[32..63] are never associated with an accumulator.
// Permissive mode (strict=false) skips lifecycle and lock enforcement so
// that tests can observe what a violating program would have computed.
class MachineState {
  public:
    explicit MachineState(bool strict = true) : strict_(strict) {}

    bool strict() const { return strict_; }
    void set_strict(bool s) { strict_ = s; }

    bool vsr_locked(int idx) const;
    // Index of the accumulator whose group contains the VSR, or -1.
    static int owning_acc(int idx) { return idx < 32 ? idx / 4 : -1; }

    const Vsr128& read_vsr(int idx) const;       // lock-checked in strict mode
    void write_vsr(int idx, const Vsr128& v);    // lock-checked in strict mode
    const Vsr128& peek_vsr(int idx) const;       // no lock check (inspection)

    const Accumulator& acc(int idx) const;

    // Prime target with all-zero contents.  Legal in any state; a Primed
    // target is simply re-zeroed.
    void xxsetaccz(int acc);

    // Prime target from its own VSR group.  Raises AccAlreadyPrimed on a
    // Primed target in strict mode.
    void xxmtacc(int acc);

    // Deprime target into its own VSR group.  Requires Primed.
    void xxmfacc(int acc);

    // Prime target from four arbitrary source VSRs (row 0 from sources[0]
    // and so on).  Sources must not be locked.
    void assemble_acc(int acc, const std::array<int, 4>& sources);

    // Deprime target into four arbitrary destination VSRs.  The target's own
    // group is a legal destination because depriming unlocks it first.
    void disassemble_acc(int acc, const std::array<int, 4>& dests);

    // Non-depriming readout.  Requires Primed in strict mode.
    AccView view_acc(int acc, AccLayout layout) const;

    StatCounters& stats() { return stats_; }
    const StatCounters& stats() const { return stats_; }

    // Low-level access for instruction execution and tests.
    Accumulator& acc_mut(int idx);
    void set_acc_state(int idx, AccState s);

  private:
    void check_vsr_index(int idx) const;
    void check_acc_index(int idx) const;
    void check_unlocked(int idx) const;

    bool strict_;
    std::array<Vsr128, 64> vsr_{};
    std::array<Accumulator, 8> acc_{};
    StatCounters stats_{};
};

} // namespace mma

#endif
