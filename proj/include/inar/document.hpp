#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace inar {

using json = nlohmann::json;

/// Reads a whole file. Throws Error(IoError) when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Parses a structured config document. `.yaml`/`.yml` files go through
/// yaml-cpp, everything else is parsed as JSON. Parse failures raise
/// Error(ParseError) with "file:line" in the message.
json load_document(const std::filesystem::path& path);
json parse_document(std::string_view text, std::string_view origin, bool yaml);

/// Throws SchemaMismatch unless doc["schema"] == expected.
void require_schema(const json& doc, std::string_view expected, std::string_view origin);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string file_sha256(const std::filesystem::path& path);

/// Canonical serialization used for hashing: sorted keys, no whitespace.
std::string canonical_dump(const json& doc);

}  // namespace inar
