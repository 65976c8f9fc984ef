#pragma once

#include <filesystem>

#include "tdbem/assembly.hpp"

namespace tdbem {

/// Binary dump of lag blocks, all fields little-endian:
///   "TDBM", u32 version, i32 tag, i32 lag_min, i32 block count, i32 rows, i32 cols,
///   f64 dt, f64 row weight sigma, then per block i64 nnz and nnz triplets (i64 row, i64 col, f64 value).
void save_blocks(const ToeplitzBlocks& blocks, const std::filesystem::path& path);
ToeplitzBlocks load_blocks(const std::filesystem::path& path);

}  // namespace tdbem
