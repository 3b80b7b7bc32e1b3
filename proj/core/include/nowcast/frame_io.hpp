#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "nowcast/grid.hpp"

namespace nowcast {

/// On-disk frame container:
///   "W4CF" | u16 version | u32 n_frames | u32 rows | u32 cols | u8 unit_tag
///   | n_frames*rows*cols float32, t-major row-major
/// All integers and floats little-endian.
inline constexpr char kFrameMagic[4] = {'W', '4', 'C', 'F'};
inline constexpr std::uint16_t kFrameVersion = 1;
inline constexpr std::size_t kFrameHeaderBytes = 4 + 2 + 4 + 4 + 4 + 1;

std::vector<char> encode_frames(const FrameSequence& seq);
FrameSequence decode_frames(std::vector<char> bytes);

FrameSequence load_frames(const std::filesystem::path& path);
void save_frames(const FrameSequence& seq, const std::filesystem::path& path);

}  // namespace nowcast
