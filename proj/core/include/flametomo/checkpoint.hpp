#pragma once

#include <span>
#include <string>
#include <vector>

#include "flametomo/network.hpp"

namespace flametomo {

// Checkpoint layout (little-endian):
//   "FTCKPT\r\n" magic, u32 version (1)
//   encoding: i32 levels, u8 include_raw, f64 domain_center[3], f64 half_extent
//   shape:    i32 input_dim, i32 hidden_width, i32 hidden_layers, i32 skip_layer,
//             u32 reduce count, i32 reduce widths...
//   layer table: u32 layer count, then u32 out, u32 in per layer
//   parameters: per layer, weights row-major (out x in) then biases, f64
//   u32 CRC-32 of all preceding bytes
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> encode_checkpoint(const NetworkParams& params);
NetworkParams decode_checkpoint(std::span<const std::uint8_t> bytes,
                                const std::string& what = "checkpoint");

void write_checkpoint(const NetworkParams& params, const std::string& path);
NetworkParams read_checkpoint(const std::string& path);

}  // namespace flametomo
