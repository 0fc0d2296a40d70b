#include "translim/policy.hpp"

namespace translim {

std::string_view to_string(PolicyKind policy) noexcept {
    switch (policy) {
        case PolicyKind::Freeze: return "freeze";
        case PolicyKind::Retrial: return "retrial";
        case PolicyKind::NewsvendorTruncation: return "truncation";
    }
    return "unknown";
}

std::optional<PolicyKind> parse_policy(std::string_view name) noexcept {
    if (name == "freeze") return PolicyKind::Freeze;
    if (name == "retrial") return PolicyKind::Retrial;
    if (name == "truncation" || name == "newsvendor") return PolicyKind::NewsvendorTruncation;
    return std::nullopt;
}

}  // namespace translim
