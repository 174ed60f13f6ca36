#include "kgalign/dense_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "kgalign/error.hpp"

namespace kgalign {
namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int k = 0; k < 8; ++k) bytes[k] = static_cast<char>((v >> (8 * k)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  std::uint64_t v = 0;
  for (int k = 7; k >= 0; --k) v = (v << 8) | bytes[k];
  return v;
}

void put_f32(std::ostream& out, float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  std::array<char, 4> bytes{};
  for (int k = 0; k < 4; ++k) bytes[k] = static_cast<char>((bits >> (8 * k)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename Matrix>
void write_impl(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  put_u64(out, static_cast<std::uint64_t>(m.rows()));
  put_u64(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) put_f32(out, static_cast<float>(m(i, j)));
  }
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace

void write_flat_binary(const std::filesystem::path& path, const RowMatrixD& m) { write_impl(path, m); }
void write_flat_binary(const std::filesystem::path& path, const RowMatrixF& m) { write_impl(path, m); }

RowMatrixF read_flat_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  const auto rows = get_u64(in);
  const auto cols = get_u64(in);
  if (!in) throw ParseError(path.string(), 0, "truncated header");
  const auto expected = 16 + rows * cols * 4;
  if (std::filesystem::file_size(path) != expected) {
    throw ParseError(path.string(), 0, "payload size does not match header");
  }
  RowMatrixF m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::vector<unsigned char> buf(cols * 4);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const auto* b = buf.data() + 4 * j;
      const std::uint32_t bits = std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
                                 (std::uint32_t(b[3]) << 24);
      m(i, j) = std::bit_cast<float>(bits);
    }
  }
  return m;
}

}  // namespace kgalign
