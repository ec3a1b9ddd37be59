#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace netbench {

// Size guards. Exceeding one is an explicit refusal, never a truncated answer.
struct Limits {
  // Upper bound on sum_{d=0..k} |O|^d for brute-force enumeration.
  std::uint64_t brute_plans = 2'000'000;
  // Upper bound on (reachable states) x (k + 1) for table-based solvers.
  std::uint64_t dp_cells = 5'000'000;
  // Upper bound on the operator count of a compiled dialog.
  std::uint64_t compile_ops = 10'000;

  friend bool operator==(const Limits&, const Limits&) = default;
};

class LimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses "brute=<n>,states=<n>,ops=<n>" (any subset, any order) over the
// given base. Returns nullopt on malformed text.
std::optional<Limits> parse_limits(std::string_view text, Limits base = {});

}  // namespace netbench
