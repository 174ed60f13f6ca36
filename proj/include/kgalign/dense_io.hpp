#pragma once

#include <filesystem>

#include "kgalign/features.hpp"

namespace kgalign {

// Flat binary layout: rows and cols as 64-bit little-endian unsigned
// integers, then rows*cols 32-bit little-endian floats in row-major order.
void write_flat_binary(const std::filesystem::path& path, const RowMatrixD& m);
void write_flat_binary(const std::filesystem::path& path, const RowMatrixF& m);
RowMatrixF read_flat_binary(const std::filesystem::path& path);

inline void save_features(const std::filesystem::path& path, const FeatureMatrix& f) {
  write_flat_binary(path, f.values);
}
inline FeatureMatrix load_features(const std::filesystem::path& path) {
  return FeatureMatrix(read_flat_binary(path).cast<double>());
}

}  // namespace kgalign
