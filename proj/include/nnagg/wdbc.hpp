#pragma once

#include <string>

#include "nnagg/dataset.hpp"

namespace nnagg {

inline constexpr std::size_t kWdbcFeatureCount = 30;

// Loads the Wisconsin diagnostic breast cancer file: 32 comma-separated
// columns per row (id, diagnosis M/B, 30 real-valued features), no header.
// The id column is dropped; diagnosis maps M -> 1, B -> 0.
Dataset load_wdbc(const std::string& path);

}  // namespace nnagg
