#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "tokendrop/instances.hpp"

namespace tokendrop {

using Instance = std::variant<UndirectedGraph, TokenDropInstance, AssignmentInstance>;

// Line-oriented text format. First non-comment line is
// `kind <graph|tokendrop|assignment>`, then one record per line:
//   node <id>            edge <a> <b>           (tokendrop: child parent)
//   level <id> <int>     token <id>             (tokendrop only)
//   server <id>          customer <id> <sid>... (assignment only)
// Lines starting with `#` are comments. Unknown directives are parse errors.
std::string format_instance(const Instance& instance);
Instance parse_instance(std::string_view text);

void write_instance(const Instance& instance, const std::filesystem::path& path);
Instance read_instance(const std::filesystem::path& path);

}  // namespace tokendrop
