#pragma once

#include <string>

#include "dgasn/model.hpp"

namespace dgasn {

// Binary parameter container: magic "DGSNPRM1", u32 version, u32 tensor
// count, then per tensor {u32 name length, name bytes, u32 rows, u32 cols}
// forming the shape table, followed by all raw 64-bit float payloads in
// table order. Little-endian throughout. save -> load -> save is bit-exact.
void save_params(const std::string& path, const ModelParams& params);

// Fills an already-shaped ModelParams; throws on magic/version/shape-table
// mismatch.
void load_params(const std::string& path, ModelParams& params);

}  // namespace dgasn
