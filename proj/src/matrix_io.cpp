#include "mma/matrix_io.hpp"

#include "mma/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>

namespace mma {

namespace {

void put_u32(std::ofstream& out, uint32_t v) {
    uint8_t b[4] = {(uint8_t)v, (uint8_t)(v >> 8), (uint8_t)(v >> 16), (uint8_t)(v >> 24)};
    out.write((const char*)b, 4);
}

uint32_t get_u32(std::ifstream& in) {
    uint8_t b[4];
    in.read((char*)b, 4);
    return (uint32_t)b[0] | ((uint32_t)b[1] << 8) | ((uint32_t)b[2] << 16) | ((uint32_t)b[3] << 24);
}

std::ifstream open_mmat(const std::string& path, MmatType want, uint32_t& rows, uint32_t& cols) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MmaError(ErrCode::IoError, "cannot open \"" + path + "\"");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "MMAT", 4) != 0)
        throw MmaError(ErrCode::IoError, "\"" + path + "\" is not a matrix file (bad magic)");
    uint32_t dtype = get_u32(in);
    rows = get_u32(in);
    cols = get_u32(in);
    if (!in) throw MmaError(ErrCode::IoError, "truncated header in \"" + path + "\"");
    if (dtype != (uint32_t)want)
        throw MmaError(ErrCode::IoError, "\"" + path + "\" holds element type code " +
                                             std::to_string(dtype) + ", expected " +
                                             std::to_string((uint32_t)want));
    return in;
}

template <typename T>
void write_elems(std::ofstream& out, const Matrix<T>& m) {
    for (const T& v : m.data) {
        auto bits = std::bit_cast<std::array<uint8_t, sizeof(T)>>(v);
        if constexpr (std::endian::native == std::endian::big)
            std::reverse(bits.begin(), bits.end());
        out.write((const char*)bits.data(), sizeof(T));
    }
}

template <typename T>
void read_elems(std::ifstream& in, Matrix<T>& m, const std::string& path) {
    for (T& v : m.data) {
        std::array<uint8_t, sizeof(T)> bits;
        in.read((char*)bits.data(), sizeof(T));
        if constexpr (std::endian::native == std::endian::big)
            std::reverse(bits.begin(), bits.end());
        v = std::bit_cast<T>(bits);
    }
    if (!in) throw MmaError(ErrCode::IoError, "truncated matrix data in \"" + path + "\"");
}

} // namespace

void write_mmat(const std::string& path, const MatrixF64& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MmaError(ErrCode::IoError, "cannot create \"" + path + "\"");
    out.write("MMAT", 4);
    put_u32(out, (uint32_t)MmatType::F64);
    put_u32(out, (uint32_t)m.rows);
    put_u32(out, (uint32_t)m.cols);
    write_elems(out, m);
    if (!out) throw MmaError(ErrCode::IoError, "write failed for \"" + path + "\"");
}

void write_mmat(const std::string& path, const MatrixF32& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MmaError(ErrCode::IoError, "cannot create \"" + path + "\"");
    out.write("MMAT", 4);
    put_u32(out, (uint32_t)MmatType::F32);
    put_u32(out, (uint32_t)m.rows);
    put_u32(out, (uint32_t)m.cols);
    write_elems(out, m);
    if (!out) throw MmaError(ErrCode::IoError, "write failed for \"" + path + "\"");
}

MatrixF64 read_mmat_f64(const std::string& path) {
    uint32_t rows, cols;
    std::ifstream in = open_mmat(path, MmatType::F64, rows, cols);
    MatrixF64 m((int)rows, (int)cols);
    read_elems(in, m, path);
    return m;
}

MatrixF32 read_mmat_f32(const std::string& path) {
    uint32_t rows, cols;
    std::ifstream in = open_mmat(path, MmatType::F32, rows, cols);
    MatrixF32 m((int)rows, (int)cols);
    read_elems(in, m, path);
    return m;
}

} // namespace mma
