#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sppa {

/// Shortest text that round-trips a double exactly (%.17g).
std::string format_double(double v);

/// Strict double parse (whole-field, locale independent).
double parse_double(std::string_view text);  // throws std::invalid_argument
long long parse_int(std::string_view text);

/// Write via a temp file and rename, so interrupted runs never leave a
/// truncated output behind.
void atomic_write_file(const std::filesystem::path& path, std::string_view bytes);

/// Ordered key=value lines; `#` starts a comment. Used for manifests,
/// sidecars, and config files.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

std::string render_key_values(const KeyValues& kv);
KeyValues parse_key_values(std::string_view text, std::string_view source_name);
std::string_view find_key(const KeyValues& kv, std::string_view key);  // throws when absent

std::string read_file(const std::filesystem::path& path);

}  // namespace sppa
