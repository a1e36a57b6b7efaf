#ifndef MMA_CHECKS_HPP
#define MMA_CHECKS_HPP

#include "mma/kernels.hpp"
#include "mma/rng.hpp"

#include <string>
#include <vector>

namespace mma {

// Shared verification suites.  The acceptance harness runs them at full
// trial counts; the CLI selftest runs the same code with reduced counts.
// Every suite draws its data from the given seed, so a failure reproduces.
struct CheckConfig {
    uint64_t seed = 1;
    int int_random_trials = 100000; // per integer family and mode
    bool int_corner_exhaustive = true;
    int int_corner_samples = 3000; // used when not exhaustive
    int mask_trials = 10000;       // per family
    int sign_trials = 10000;       // per float family
    int lint_traces = 10000;
    std::vector<int> dgemm_sizes = {1, 2, 3, 8, 64, 128, 512};
    int dgemm_seeds_per_size = 100;
    int sconv_seeds = 100;
};

CheckConfig acceptance_config();
CheckConfig selftest_config();

struct CheckResult {
    std::string name;
    bool pass = false;
    uint64_t trials = 0;
    std::string detail; // first failure description, or a summary when passing
};

// Integer rank-k updates against an independent exact-arithmetic reference,
// over exhaustive per-row corner patterns and random lane bytes.
CheckResult check_integer_oracle(const CheckConfig& cfg);

// Mask laws: all-ones masks match the conventional form; all-zero masks
// leave accumulating targets untouched and zero-fill non-accumulating ones;
// masking equals zeroing the disabled rows/columns for integer modulo forms.
CheckResult check_mask_laws(const CheckConfig& cfg);

// Sign-suffix algebra on exactly representable data: np equals pp with X
// negated, pn equals nn with X negated, and pn/nn are the elementwise
// negations of np/pp.
CheckResult check_sign_algebra(const CheckConfig& cfg);

// Random straight-line programs: strict execution rejects a trace exactly
// when the linter reports an error, and on the same line.
CheckResult check_lint_lifecycle(const CheckConfig& cfg);

// dgemm kernel: bit-exact against the fused-madd fold reference, exact
// instruction/flop counters, clean accumulator lifecycle, exact
// power-of-two scaling.
CheckResult check_dgemm(const CheckConfig& cfg);

// sconv kernel: bit-exact against the shifted-window product reference,
// close to a plain double convolution, exact counters, and the center-tap
// delta filter reproduces the shifted input window.
CheckResult check_sconv(const CheckConfig& cfg);

// Exhaustive encode/decode round-trips for every 16-bit float pattern and
// every integer lane pattern, plus wrap/saturate boundary behavior.
CheckResult check_numerics_roundtrip(const CheckConfig& cfg);

// All suites above, in order.
std::vector<CheckResult> run_all_checks(const CheckConfig& cfg);

// Seeded data generators, shared with the CLI's --random modes.
MatrixF64 random_dgemm_operand(SplitMix64& rng, int cols);
ConvProblem random_conv_problem(SplitMix64& rng, bool positive_values);

} // namespace mma

#endif
