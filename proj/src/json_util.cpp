#include "alertforge/json_util.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "alertforge/errors.hpp"

namespace alertforge {

namespace {
constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int b64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}
}  // namespace

std::string base64_encode(const unsigned char* data, std::size_t len) {
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (std::size_t i = 0; i < len; i += 3) {
    const unsigned b0 = data[i];
    const unsigned b1 = (i + 1 < len) ? data[i + 1] : 0;
    const unsigned b2 = (i + 2 < len) ? data[i + 2] : 0;
    out.push_back(kB64Alphabet[b0 >> 2]);
    out.push_back(kB64Alphabet[((b0 & 0x3) << 4) | (b1 >> 4)]);
    out.push_back(i + 1 < len ? kB64Alphabet[((b1 & 0xf) << 2) | (b2 >> 6)] : '=');
    out.push_back(i + 2 < len ? kB64Alphabet[b2 & 0x3f] : '=');
  }
  return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
  std::vector<unsigned char> out;
  out.reserve(text.size() / 4 * 3);
  int acc = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=' || c == '\n' || c == '\r') continue;
    const int v = b64_value(c);
    if (v < 0) throw EncodingError("invalid base64 character");
    acc = (acc << 6) | v;
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<unsigned char>((acc >> bits) & 0xff));
    }
  }
  return out;
}

std::string doubles_to_base64(const std::vector<double>& values) {
  std::vector<unsigned char> bytes(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &values[i], 8);
    for (int b = 0; b < 8; ++b) {
      bytes[i * 8 + b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xff);
    }
  }
  return base64_encode(bytes.data(), bytes.size());
}

std::vector<double> base64_to_doubles(const std::string& text) {
  const std::vector<unsigned char> bytes = base64_decode(text);
  if (bytes.size() % 8 != 0) throw EncodingError("base64 payload is not doubles");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) {
      bits = (bits << 8) | bytes[i * 8 + static_cast<std::size_t>(b)];
    }
    std::memcpy(&out[i], &bits, 8);
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write file: " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string format_double(double value) {
  char buf[64];
  // %.17g round-trips every finite double.
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  double back = 0.0;
  std::sscanf(buf, "%lg", &back);
  if (back == value) {
    // Try shorter forms for readability while keeping exact round-trip.
    for (int prec = 1; prec < 17; ++prec) {
      char small[64];
      std::snprintf(small, sizeof(small), "%.*g", prec, value);
      double parsed = 0.0;
      std::sscanf(small, "%lg", &parsed);
      if (parsed == value) return small;
    }
  }
  return buf;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t value) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

namespace {

bool type_matches(const std::string& type, const Json& doc) {
  if (type == "object") return doc.is_object();
  if (type == "array") return doc.is_array();
  if (type == "string") return doc.is_string();
  if (type == "number") return doc.is_number();
  if (type == "integer") return doc.is_number_integer();
  if (type == "boolean") return doc.is_boolean();
  if (type == "null") return doc.is_null();
  return false;
}

}  // namespace

std::string validate_against_schema(const Json& schema, const Json& doc,
                                    const std::string& where) {
  if (schema.contains("type")) {
    const std::string type = schema["type"].get<std::string>();
    if (!type_matches(type, doc)) {
      return where + ": expected " + type;
    }
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& candidate : schema["enum"]) {
      if (candidate == doc) { found = true; break; }
    }
    if (!found) return where + ": value not in enum";
  }
  if (doc.is_number()) {
    const double v = doc.get<double>();
    if (schema.contains("minimum") && v < schema["minimum"].get<double>()) {
      return where + ": below minimum";
    }
    if (schema.contains("maximum") && v > schema["maximum"].get<double>()) {
      return where + ": above maximum";
    }
  }
  if (doc.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!doc.contains(key.get<std::string>())) {
          return where + ": missing required key " + key.get<std::string>();
        }
      }
    }
    if (schema.contains("properties")) {
      for (const auto& [key, sub] : schema["properties"].items()) {
        if (doc.contains(key)) {
          const std::string err =
              validate_against_schema(sub, doc.at(key), where + "." + key);
          if (!err.empty()) return err;
        }
      }
    }
  }
  if (doc.is_array() && schema.contains("items")) {
    std::size_t i = 0;
    for (const auto& element : doc) {
      const std::string err = validate_against_schema(
          schema["items"], element, where + "[" + std::to_string(i) + "]");
      if (!err.empty()) return err;
      ++i;
    }
  }
  return "";
}

}  // namespace alertforge
