#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chiral/params.hpp"

namespace chiral {

/// Flat `key = value` text, one entry per line. Recognized keys: omega0,
/// Omega0, J, g, phi, N, boundary. Blank lines and `#` comments are skipped.
/// Unknown keys throw std::invalid_argument.
ModelParams parse_config(std::string_view text, ModelParams base = {});
ModelParams load_config(const std::filesystem::path& path, ModelParams base = {});

/// Inverse of parse_config; doubles are written with round-trip precision.
std::string to_config_string(const ModelParams& params);

/// Sets a single named field from text. Used for both config lines and CLI
/// overrides.
void set_param(ModelParams& params, std::string_view key, std::string_view value);

/// Value of a small TOML subset: numbers, quoted strings, and flat arrays of
/// either.
using TomlScalar = std::variant<double, std::string>;
using TomlValue = std::variant<double, std::string, std::vector<TomlScalar>>;

/// Sections map to key/value tables; keys before any header live in "".
/// Supports `[section]` headers, `key = value`, `#` comments. No nested
/// tables, inline tables, or multi-line arrays.
using TomlDocument = std::map<std::string, std::map<std::string, TomlValue>>;

TomlDocument parse_toml(std::string_view text);

}  // namespace chiral
