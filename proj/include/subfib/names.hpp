#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace subfib::names {

// Generated identifiers are written tag{part;part;...}. Parts may nest.

std::string tuple(std::string_view tag, std::initializer_list<std::string_view> parts);
std::string tuple(std::string_view tag, const std::vector<std::string>& parts);

struct Decoded {
  std::string tag;
  std::vector<std::string> parts;
};

/// Splits the outermost tag{...} group; returns an empty tag and no parts
/// when the name is not a tuple.
Decoded decode(std::string_view name);

}  // namespace subfib::names
