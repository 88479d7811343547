#ifndef AOI_POLICY_ID_HPP_
#define AOI_POLICY_ID_HPP_

#include <string_view>

namespace aoi {

enum class PolicyId { maxweight, aloha, aat, sat, gsat, randomized };

/// Throws std::invalid_argument for unknown names.
PolicyId parse_policy(std::string_view name);
std::string_view to_string(PolicyId policy);

}  // namespace aoi

#endif  // AOI_POLICY_ID_HPP_
