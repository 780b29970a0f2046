#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace rgbdsde {

/// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace rgbdsde
