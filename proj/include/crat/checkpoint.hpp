#pragma once

#include <string>

#include "crat/train.hpp"

namespace crat {

// Versioned text checkpoint of named arrays with shapes:
//   crat-checkpoint v1
//   <name> <rows> <cols>
//   <row-major values, full double precision>
void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

}  // namespace crat
