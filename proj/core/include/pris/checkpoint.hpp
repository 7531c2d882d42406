#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "pris/model.hpp"

namespace pris {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Versioned little-endian checkpoint:
///
///   "PRISCKPT" | u32 version
///   u32 n_blocks | u32 channels | u32 subnet_layers | u32 subnet_growth
///   u8 pre | u8 post | u8 domain | u8 reserved
///   u32 enhance_layers | u32 enhance_growth | u32 step_reached
///   u32 n_sets, then per set: u32 length + label bytes
///   u32 n_tensors, then per tensor: u32 length + name, u32 ndim,
///       i64 dims[ndim], f32 data[prod(dims)]
void save_checkpoint(const std::filesystem::path& path, PrisModel& model);

/// Rebuilds the model from the header and loads every tensor; a missing,
/// extra or mis-shaped tensor is a DataError.
PrisModel load_checkpoint(const std::filesystem::path& path);

/// Reads only the header.
ModelConfig peek_checkpoint_config(const std::filesystem::path& path);

/// FNV-1a 64 of the file bytes, hex encoded; identifies a model in reports.
std::string checkpoint_hash(const std::filesystem::path& path);

}  // namespace pris
