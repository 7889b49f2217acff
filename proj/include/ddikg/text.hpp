#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ddikg::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

// Lowercases, trims and collapses internal whitespace runs to one space.
std::string normalize(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_ws(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool starts_with_ci(std::string_view s, std::string_view prefix);

} // namespace ddikg::text
