#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace alertforge {

// Insertion-ordered JSON for every artifact we write: stable key order keeps
// reruns byte-identical.
using Json = nlohmann::ordered_json;

std::string base64_encode(const unsigned char* data, std::size_t len);
std::vector<unsigned char> base64_decode(const std::string& text);

// Little-endian IEEE-754 doubles <-> base64 text.
std::string doubles_to_base64(const std::vector<double>& values);
std::vector<double> base64_to_doubles(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Shortest round-trip decimal form of a double; locale-independent.
std::string format_double(double value);

std::uint64_t fnv1a64(const std::string& text);
std::string to_hex(std::uint64_t value);

// Validates `doc` against the subset of JSON Schema used by the bundled
// report schema (type, required, properties, items, enum, minimum, maximum).
// Returns an empty string on success, else the first violation found.
std::string validate_against_schema(const Json& schema, const Json& doc,
                                    const std::string& where = "$");

}  // namespace alertforge
