#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "nowcast/model.hpp"

namespace nowcast::nn {

/// Parameter container:
///   "W4CP" | u16 version | u8 cell_kind | u8 skip | 6 x u32 channel widths | u32 n_arrays
///   then per array: u16 name_len | name | u8 ndim | ndim x u32 dims | float32 data
/// Little-endian throughout. Arrays appear in NetParams::for_each_conv order,
/// kernels before bias.
inline constexpr char kParamMagic[4] = {'W', '4', 'C', 'P'};
inline constexpr std::uint16_t kParamVersion = 1;

std::vector<char> encode_params(const NetParams<float>& p);
NetParams<float> decode_params(std::vector<char> bytes);

void save_params(const NetParams<float>& p, const std::filesystem::path& path);
NetParams<float> load_params(const std::filesystem::path& path);

}  // namespace nowcast::nn
