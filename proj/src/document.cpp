#include "inar/document.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include "inar/error.hpp"

namespace inar {

namespace {

json yaml_to_json(const YAML::Node& node) {
    switch (node.Type()) {
        case YAML::NodeType::Null:
        case YAML::NodeType::Undefined:
            return nullptr;
        case YAML::NodeType::Sequence: {
            json out = json::array();
            for (const auto& item : node) out.push_back(yaml_to_json(item));
            return out;
        }
        case YAML::NodeType::Map: {
            json out = json::object();
            for (const auto& kv : node) out[kv.first.as<std::string>()] = yaml_to_json(kv.second);
            return out;
        }
        case YAML::NodeType::Scalar:
            break;
    }
    // Quoted scalars stay strings; plain scalars are typed by content.
    const std::string& text = node.Scalar();
    if (node.Tag() == "!") return text;
    if (text == "true" || text == "True") return true;
    if (text == "false" || text == "False") return false;
    if (text == "null" || text == "~") return nullptr;
    try {
        std::size_t used = 0;
        long long as_int = std::stoll(text, &used);
        if (used == text.size()) return as_int;
    } catch (const std::exception&) {
    }
    try {
        std::size_t used = 0;
        double as_double = std::stod(text, &used);
        if (used == text.size()) return as_double;
    } catch (const std::exception&) {
    }
    return text;
}

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

json parse_document(std::string_view text, std::string_view origin, bool yaml) {
    if (yaml) {
        try {
            return yaml_to_json(YAML::Load(std::string(text)));
        } catch (const YAML::Exception& e) {
            throw Error(ErrorCode::ParseError, std::string(origin) + ":" + std::to_string(e.mark.line + 1) +
                                                   ": " + e.msg);
        }
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError,
                    std::string(origin) + ":" + std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
    }
}

json load_document(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    const auto ext = path.extension().string();
    return parse_document(text, path.string(), ext == ".yaml" || ext == ".yml");
}

void require_schema(const json& doc, std::string_view expected, std::string_view origin) {
    if (!doc.is_object() || !doc.contains("schema") || !doc["schema"].is_string() ||
        doc["schema"].get<std::string>() != expected) {
        std::string found = "none";
        if (doc.is_object() && doc.contains("schema")) found = doc["schema"].dump();
        throw Error(ErrorCode::SchemaMismatch,
                    std::string(origin) + ": expected schema \"" + std::string(expected) + "\", found " + found);
    }
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

std::string file_sha256(const std::filesystem::path& path) { return sha256_hex(read_text_file(path)); }

std::string canonical_dump(const json& doc) { return doc.dump(); }

}  // namespace inar
