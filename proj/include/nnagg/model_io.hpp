#pragma once

#include <string>

#include "nnagg/mlp.hpp"

namespace nnagg {

// Versioned flat model file: a text header describing the architecture, a "---"
// separator line, then the parameters as little-endian 64-bit floats in flat
// order. Used to pass trained expert models between stages.
void save_model(const Mlp& mlp, const std::string& path);
Mlp load_model(const std::string& path);

}  // namespace nnagg
