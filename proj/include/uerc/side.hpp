#pragma once

#include <string_view>

namespace uerc {

enum class Side { left, right, unknown };

std::string_view to_string(Side side);
Side parse_side(std::string_view text);

}  // namespace uerc
