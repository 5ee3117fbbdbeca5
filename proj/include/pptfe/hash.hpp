#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

#include "pptfe/bytes.hpp"

namespace pptfe {

using Digest = std::array<std::uint8_t, 32>;

// SHA-256 over the concatenation of parts.
Digest sha256(std::initializer_list<ByteView> parts);

inline Digest sha256(ByteView data) { return sha256({data}); }

}  // namespace pptfe
