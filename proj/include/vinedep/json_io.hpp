#pragma once

#include <string>

#include <json.hpp>

// Canonical JSON output: object keys sorted (nlohmann's default ordering),
// doubles printed with 12 significant digits.  Re-serializing a parsed
// document reproduces it byte for byte, which makes golden-file and
// determinism tests exact.

namespace vinedep {

using json = nlohmann::json;

std::string canonical_dump(const json& j, int indent = 2);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
json read_json_file(const std::string& path);

}  // namespace vinedep
