#pragma once

#include <optional>
#include <string_view>

namespace translim {

// Balance-control rule applied when an attempted purchase would take the
// balance over the limit.
//   Freeze: reject it and every later attempt in the period.
//   Retrial: reject it; later attempts that still fit are accepted.
//   NewsvendorTruncation: charge only what fits, so the balance is min(A(T), l).
enum class PolicyKind { Freeze, Retrial, NewsvendorTruncation };

std::string_view to_string(PolicyKind policy) noexcept;
std::optional<PolicyKind> parse_policy(std::string_view name) noexcept;

}  // namespace translim
