#pragma once

#include <string>
#include <string_view>

namespace safeplan {

/// Identifiers compare case-insensitively and treat '-' and '_' as the same
/// character. The canonical spelling is lowercase with underscores.
std::string canonical_identifier(std::string_view raw);

bool is_identifier(std::string_view text);

/// Display form used for action names in plans: MOVE_TO.
std::string display_action_name(std::string_view canonical);

} // namespace safeplan
