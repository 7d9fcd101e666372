#pragma once

#include <filesystem>

#include "tenas/nn/tensor.hpp"

namespace tenas::metrics {

// Raw tensor file: one ASCII header line "shape d0 d1 ...\n" followed by
// prod(d) little-endian float64 values. The leading dimension is the
// sample count.

nn::Tensor read_tensor_file(const std::filesystem::path& path);
void write_tensor_file(const std::filesystem::path& path, const nn::Tensor& tensor);

}  // namespace tenas::metrics
