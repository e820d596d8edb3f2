// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>

#include "specsep/srinet.hpp"

namespace specsep {

inline constexpr char kCheckpointMagic[8] = {'S', 'P', 'S', 'P', 'A', 'R',
                                             'M', 'S'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Little-endian layout: magic[8], u32 version, u32 tensor count, then per
/// tensor u32 name length, name bytes, u32 rank, u32 dims[rank]; followed
/// by every tensor's float64 payload in the same order.
void save_checkpoint(const ModelParams& params,
                     const std::filesystem::path& path);
ModelParams load_checkpoint(const std::filesystem::path& path);

}  // namespace specsep
