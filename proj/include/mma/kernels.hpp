#ifndef MMA_KERNELS_HPP
#define MMA_KERNELS_HPP

#include "mma/machine.hpp"
#include "mma/trace.hpp"

#include <vector>

namespace mma {

template <typename T>
struct Matrix {
    int rows = 0, cols = 0;
    std::vector<T> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data((size_t)r * (size_t)c) {}

    T& at(int r, int c) { return data[(size_t)r * cols + c]; }
    const T& at(int r, int c) const { return data[(size_t)r * cols + c]; }
    bool operator==(const Matrix&) const = default;
};

using MatrixF64 = Matrix<double>;
using MatrixF32 = Matrix<float>;

// Execution record of one kernel invocation.
struct KernelReport {
    StatCounters stats;
    bool all_deprimed = false; // every accumulator left Deprimed on exit
};

// C = X * Y^T for X, Y of shape 8xN, computed on a private machine in strict
// mode through a virtual 8x8 fp64 accumulator: block (r, c) of the 2x4 block
// grid maps to accumulator 4r+c and covers rows 4r..4r+3, columns 2c..2c+1.
// Column t of X and Y feeds one rank-1 update per block: a non-accumulating
// xvf64ger for t=0, then xvf64gerpp, 8 instructions per step, 8N total.
// Results leave through disassemble, so every accumulator ends Deprimed.
//
// N == 0 raises EmptyMultiply: there is no product to prime the target with.
// If `recorded` is given, the instruction stream is appended as a runnable
// trace program with self-checking expect statements.
MatrixF64 dgemm_kernel(const MatrixF64& x, const MatrixF64& y, KernelReport* report = nullptr,
                       TraceProgram* recorded = nullptr);

// Reference for dgemm_kernel: per element, the same fold the accumulator
// performs: C_ij = x_i0*y_j0 rounded once, then one fused madd per column.
MatrixF64 dgemm_oracle(const MatrixF64& x, const MatrixF64& y);

// A 3x3 convolution of three input planes (a k-filter bank, k <= 8) posed as
// a matrix product.  h holds the filter taps laid out k x 27, plane-major:
// tap (plane c, row offset u, column offset v) of filter f sits at
// h[f][9c + 3u + v].
struct ConvProblem {
    MatrixF32 h;       // k x 27 filter taps, k <= 8
    MatrixF32 r, g, b; // input planes, each at least (row + 3) x n
    int row = 0;       // first input row of the window
    int n = 0;         // logical input row width, n >= 18
};

// Shifted-window operand: rows 3u + v of the result are A[i+u][v : v+n-2],
// so a k x 27 tap matrix times the three stacked windows computes the
// convolution as a plain product.  Requires A at least (i+3) x n, n >= 3.
MatrixF32 build_abar(const MatrixF32& a, int i, int n);

// One 8x16 output tile of the convolution, computed on a private machine in
// strict mode through a virtual 8x16 fp32 accumulator: block (r, c) maps to
// accumulator 4r+c and covers rows 4r..4r+3, columns 4c..4c+3.  The 27 taps
// are applied as rank-1 updates in plane-major order (plane, then u, then
// v): xvf32ger for the first, xvf32gerpp after, 8 instructions per tap,
// 216 total.  Output element (f, j) = sum of h[f][9c+3u+v] * plane_c[row+u][j+v].
MatrixF32 sconv_kernel(const ConvProblem& p, KernelReport* report = nullptr,
                       TraceProgram* recorded = nullptr);

// Reference for sconv_kernel by an independent route: h (zero-padded to
// 8 x 27) times the stacked build_abar windows, applying the 27 terms in the
// same order with one binary32 rounding per term.
MatrixF32 conv_oracle_gemm(const ConvProblem& p);

// Plain double-precision sliding-window convolution, no intermediate
// narrowing.  Anchors the fp32 pipelines to an accuracy reference.
MatrixF64 naive_conv_oracle(const ConvProblem& p);

} // namespace mma

#endif
