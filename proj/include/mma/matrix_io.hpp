#ifndef MMA_MATRIX_IO_HPP
#define MMA_MATRIX_IO_HPP

#include "mma/kernels.hpp"

#include <string>

namespace mma {

// Binary matrix container: 16-byte header, then row-major little-endian
// element data.
//   bytes 0..3   magic "MMAT"
//   bytes 4..7   element type code (uint32 LE): 1 = fp64, 2 = fp32, 3 = int32
//   bytes 8..11  rows (uint32 LE)
//   bytes 12..15 cols (uint32 LE)
enum class MmatType : uint32_t { F64 = 1, F32 = 2, I32 = 3 };

void write_mmat(const std::string& path, const MatrixF64& m);
void write_mmat(const std::string& path, const MatrixF32& m);

MatrixF64 read_mmat_f64(const std::string& path);
MatrixF32 read_mmat_f32(const std::string& path);

} // namespace mma

#endif
