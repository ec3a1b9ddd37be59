#include "limits.hpp"

#include <charconv>

namespace netbench {

std::optional<Limits> parse_limits(std::string_view text, Limits base) {
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;

    const auto eq = item.find('=');
    if (eq == std::string_view::npos) return std::nullopt;
    const std::string_view key = item.substr(0, eq);
    const std::string_view num = item.substr(eq + 1);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), value);
    if (ec != std::errc() || ptr != num.data() + num.size() || num.empty()) return std::nullopt;

    if (key == "brute") {
      base.brute_plans = value;
    } else if (key == "states") {
      base.dp_cells = value;
    } else if (key == "ops") {
      base.compile_ops = value;
    } else {
      return std::nullopt;
    }
  }
  return base;
}

}  // namespace netbench
