#include "mma/kernels.hpp"

#include "mma/isa.hpp"

#include <bit>
#include <cmath>

namespace mma {

namespace {

// Scratch register allocation shared by both kernels.  Everything lives in
// vsr32..vsr43, which no accumulator can ever lock, so the kernels stay
// clean under strict mode even while all eight accumulators are primed.
constexpr int kXBase = 32;    // X operands (two registers or two pairs)
constexpr int kYBase = 36;    // Y operands (four registers)
constexpr int kDisBase = 40;  // disassemble destinations

void put_vsr(MachineState& m, TraceProgram* rec, int idx, const Vsr128& v) {
    m.write_vsr(idx, v);
    if (rec) rec->push(SetVsrStmt{idx, /*hex=*/true, ElementFormat::Fp64, v});
}

void issue_ger(MachineState& m, TraceProgram* rec, const GerInstruction& instr) {
    execute_ger(m, instr);
    if (rec) rec->push(GerStmt{instr});
}

void record_expects(MachineState& m, TraceProgram* rec, AccLayout layout) {
    if (!rec) return;
    for (int a = 0; a < 8; a++) {
        AccView view = m.view_acc(a, layout);
        ExpectStmt e;
        e.acc = a;
        e.layout = layout;
        bool finite = true;
        for (int r = 0; r < 4; r++) {
            for (int c = 0; c < view.cols(); c++) {
                e.want[r][c] = view.v[r][c];
                finite = finite && std::isfinite(view.v[r][c]);
            }
        }
        // |got - want| <= tol can never hold for NaN or infinity, so a block
        // that produced them gets no self-check in the emitted trace.
        if (finite) rec->push(e);
    }
}

void disassemble_all(MachineState& m, TraceProgram* rec, auto&& consume_block) {
    for (int a = 0; a < 8; a++) {
        const std::array<int, 4> dests{kDisBase, kDisBase + 1, kDisBase + 2, kDisBase + 3};
        m.disassemble_acc(a, dests);
        if (rec) rec->push(MoveStmt{MoveKind::Disassemble, a, dests});
        consume_block(a, dests);
    }
}

} // namespace

MatrixF64 dgemm_kernel(const MatrixF64& x, const MatrixF64& y, KernelReport* report,
                       TraceProgram* recorded) {
    if (x.rows != 8 || y.rows != 8)
        throw MmaError(ErrCode::ShapeError, "dgemm operands must have 8 rows");
    if (x.cols != y.cols)
        throw MmaError(ErrCode::ShapeError, "dgemm operands must share the inner dimension");
    const int n = x.cols;
    if (n == 0)
        throw MmaError(ErrCode::EmptyMultiply, "no columns: nothing can prime the accumulators");

    MachineState m(/*strict=*/true);

    for (int t = 0; t < n; t++) {
        // Column t of X: rows 4r..4r+3 as the even:odd pair at kXBase+2r.
        for (int half = 0; half < 4; half++) {
            Vsr128 v;
            set_lane(v, ElementFormat::Fp64, 0, std::bit_cast<uint64_t>(x.at(2 * half, t)));
            set_lane(v, ElementFormat::Fp64, 1, std::bit_cast<uint64_t>(x.at(2 * half + 1, t)));
            put_vsr(m, recorded, kXBase + half, v);
        }
        // Column t of Y: columns 2c..2c+1 in the register at kYBase+c.
        for (int c = 0; c < 4; c++) {
            Vsr128 v;
            set_lane(v, ElementFormat::Fp64, 0, std::bit_cast<uint64_t>(y.at(2 * c, t)));
            set_lane(v, ElementFormat::Fp64, 1, std::bit_cast<uint64_t>(y.at(2 * c + 1, t)));
            put_vsr(m, recorded, kYBase + c, v);
        }
        for (int r = 0; r < 2; r++) {
            for (int c = 0; c < 4; c++) {
                GerInstruction instr;
                instr.family = GerFamily::F64GER;
                instr.mode = t == 0 ? AccumulateMode::None : AccumulateMode::PP;
                instr.acc = 4 * r + c;
                instr.x_vsr = kXBase + 2 * r;
                instr.y_vsr = kYBase + c;
                issue_ger(m, recorded, instr);
            }
        }
    }

    record_expects(m, recorded, AccLayout::Fp64_4x2);

    MatrixF64 out(8, 8);
    disassemble_all(m, recorded, [&](int a, const std::array<int, 4>& dests) {
        const int r = a / 4, c = a % 4;
        for (int i = 0; i < 4; i++) {
            const Vsr128& v = m.read_vsr(dests[i]);
            for (int j = 0; j < 2; j++)
                out.at(4 * r + i, 2 * c + j) = std::bit_cast<double>(
                    get_lane(v, ElementFormat::Fp64, j));
        }
    });

    if (report) {
        report->stats = m.stats();
        report->all_deprimed = true;
        for (int a = 0; a < 8; a++)
            if (m.acc(a).state != AccState::Deprimed) report->all_deprimed = false;
    }
    return out;
}

MatrixF64 dgemm_oracle(const MatrixF64& x, const MatrixF64& y) {
    if (x.rows != 8 || y.rows != 8 || x.cols != y.cols)
        throw MmaError(ErrCode::ShapeError, "dgemm operands must be 8xN");
    if (x.cols == 0) throw MmaError(ErrCode::EmptyMultiply, "no columns");
    MatrixF64 c(8, 8);
    for (int i = 0; i < 8; i++) {
        for (int j = 0; j < 8; j++) {
            double acc = fp64_writeback(x.at(i, 0) * y.at(j, 0));
            for (int t = 1; t < x.cols; t++)
                acc = fp64_writeback(fused_multiply_add_fp64(x.at(i, t), y.at(j, t), acc));
            c.at(i, j) = acc;
        }
    }
    return c;
}

MatrixF32 build_abar(const MatrixF32& a, int i, int n) {
    if (n < 3) throw MmaError(ErrCode::ShapeError, "window width must be at least 3");
    if (i < 0 || a.rows < i + 3)
        throw MmaError(ErrCode::ShapeError, "plane needs rows i .. i+2");
    if (a.cols < n) throw MmaError(ErrCode::ShapeError, "plane narrower than n");
    MatrixF32 out(9, n - 2);
    for (int u = 0; u < 3; u++)
        for (int v = 0; v < 3; v++)
            for (int j = 0; j < n - 2; j++) out.at(3 * u + v, j) = a.at(i + u, v + j);
    return out;
}

namespace {

void validate_conv(const ConvProblem& p) {
    if (p.h.cols != 27 || p.h.rows < 1 || p.h.rows > 8)
        throw MmaError(ErrCode::ShapeError, "filter bank must be kx27 with 1 <= k <= 8");
    if (p.n < 18)
        throw MmaError(ErrCode::ShapeError, "need n >= 18 input columns for a 16-wide tile");
    for (const MatrixF32* plane : {&p.r, &p.g, &p.b}) {
        if (p.row < 0 || plane->rows < p.row + 3)
            throw MmaError(ErrCode::ShapeError, "plane needs rows row .. row+2");
        if (plane->cols < p.n) throw MmaError(ErrCode::ShapeError, "plane narrower than n");
    }
}

// Zero-pad the filter bank to the full 8 accumulator rows.
MatrixF32 padded_taps(const MatrixF32& h) {
    MatrixF32 out(8, 27);
    for (int f = 0; f < h.rows; f++)
        for (int t = 0; t < 27; t++) out.at(f, t) = h.at(f, t);
    return out;
}

} // namespace

MatrixF32 sconv_kernel(const ConvProblem& p, KernelReport* report, TraceProgram* recorded) {
    validate_conv(p);
    const MatrixF32 hbar = padded_taps(p.h);
    const MatrixF32* planes[3] = {&p.r, &p.g, &p.b};

    MachineState m(/*strict=*/true);

    for (int t = 0; t < 27; t++) {
        const int plane = t / 9, u = (t % 9) / 3, v = t % 3;
        // Tap column t: eight filter coefficients, split across two registers.
        for (int half = 0; half < 2; half++) {
            Vsr128 xv;
            for (int l = 0; l < 4; l++)
                set_lane(xv, ElementFormat::Fp32, l,
                         std::bit_cast<uint32_t>(hbar.at(4 * half + l, t)));
            put_vsr(m, recorded, kXBase + half, xv);
        }
        // Sixteen pixels of the shifted window row, four registers.
        for (int q = 0; q < 4; q++) {
            Vsr128 yv;
            for (int l = 0; l < 4; l++)
                set_lane(yv, ElementFormat::Fp32, l,
                         std::bit_cast<uint32_t>(planes[plane]->at(p.row + u, v + 4 * q + l)));
            put_vsr(m, recorded, kYBase + q, yv);
        }
        for (int r = 0; r < 2; r++) {
            for (int c = 0; c < 4; c++) {
                GerInstruction instr;
                instr.family = GerFamily::F32GER;
                instr.mode = t == 0 ? AccumulateMode::None : AccumulateMode::PP;
                instr.acc = 4 * r + c;
                instr.x_vsr = kXBase + r;
                instr.y_vsr = kYBase + c;
                issue_ger(m, recorded, instr);
            }
        }
    }

    record_expects(m, recorded, AccLayout::Fp32_4x4);

    MatrixF32 out(8, 16);
    disassemble_all(m, recorded, [&](int a, const std::array<int, 4>& dests) {
        const int r = a / 4, c = a % 4;
        for (int i = 0; i < 4; i++) {
            const Vsr128& v = m.read_vsr(dests[i]);
            for (int l = 0; l < 4; l++)
                out.at(4 * r + i, 4 * c + l) =
                    std::bit_cast<float>((uint32_t)get_lane(v, ElementFormat::Fp32, l));
        }
    });

    if (report) {
        report->stats = m.stats();
        report->all_deprimed = true;
        for (int a = 0; a < 8; a++)
            if (m.acc(a).state != AccState::Deprimed) report->all_deprimed = false;
    }
    return out;
}

MatrixF32 conv_oracle_gemm(const ConvProblem& p) {
    validate_conv(p);
    const MatrixF32 hbar = padded_taps(p.h);

    // Stack the three shifted-window operands into one 27 x (n-2) matrix.
    MatrixF32 abar(27, p.n - 2);
    int next = 0;
    for (const MatrixF32* plane : {&p.r, &p.g, &p.b}) {
        MatrixF32 w = build_abar(*plane, p.row, p.n);
        for (int t = 0; t < 9; t++, next++)
            for (int j = 0; j < p.n - 2; j++) abar.at(next, j) = w.at(t, j);
    }

    MatrixF32 out(8, 16);
    for (int f = 0; f < 8; f++) {
        for (int j = 0; j < 16; j++) {
            float acc = 0.0f;
            for (int t = 0; t < 27; t++) {
                const double term = (double)hbar.at(f, t) * (double)abar.at(t, j);
                acc = t == 0 ? fp32_round(term) : fp32_round(term + (double)acc);
            }
            out.at(f, j) = acc;
        }
    }
    return out;
}

MatrixF64 naive_conv_oracle(const ConvProblem& p) {
    validate_conv(p);
    const MatrixF32 hbar = padded_taps(p.h);
    const MatrixF32* planes[3] = {&p.r, &p.g, &p.b};
    MatrixF64 out(8, 16);
    for (int f = 0; f < 8; f++) {
        for (int j = 0; j < 16; j++) {
            double sum = 0.0;
            for (int c = 0; c < 3; c++)
                for (int u = 0; u < 3; u++)
                    for (int v = 0; v < 3; v++)
                        sum += (double)hbar.at(f, 9 * c + 3 * u + v) *
                               (double)planes[c]->at(p.row + u, j + v);
            out.at(f, j) = sum;
        }
    }
    return out;
}

} // namespace mma
