#include "subfib/names.hpp"

namespace subfib::names {

std::string tuple(std::string_view tag, std::initializer_list<std::string_view> parts) {
  std::string out(tag);
  out += '{';
  bool first = true;
  for (auto p : parts) {
    if (!first) out += ';';
    out += p;
    first = false;
  }
  out += '}';
  return out;
}

std::string tuple(std::string_view tag, const std::vector<std::string>& parts) {
  std::string out(tag);
  out += '{';
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ';';
    out += parts[i];
  }
  out += '}';
  return out;
}

Decoded decode(std::string_view name) {
  Decoded d;
  auto open = name.find('{');
  if (open == std::string_view::npos || name.empty() || name.back() != '}') return d;
  d.tag = std::string(name.substr(0, open));
  int depth = 0;
  std::string cur;
  for (std::size_t i = open + 1; i + 1 < name.size(); ++i) {
    char c = name[i];
    if (c == '{') ++depth;
    if (c == '}') --depth;
    if (c == ';' && depth == 0) {
      d.parts.push_back(std::move(cur));
      cur.clear();
      continue;
    }
    cur += c;
  }
  d.parts.push_back(std::move(cur));
  return d;
}

}  // namespace subfib::names
