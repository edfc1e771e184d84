#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gainprint::base64 {

/// RFC 4648 standard alphabet with '=' padding.
std::string encode(std::span<const std::uint8_t> bytes);
std::string encode(std::string_view text);

/// Strict decode: rejects characters outside the alphabet, lengths that are
/// not a multiple of four, misplaced padding and non-zero pad bits.
std::optional<std::vector<std::uint8_t>> decode(std::string_view text);

}  // namespace gainprint::base64
