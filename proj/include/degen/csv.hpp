#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace degen {

/// Round-trippable float text: 17 significant digits, "%.17g".
std::string fmt_double(double v);

/// 64-bit FNV-1a digest, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace degen
