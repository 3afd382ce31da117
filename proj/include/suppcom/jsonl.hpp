#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "suppcom/error.hpp"

namespace suppcom {

// Writes `content` to a sibling temp file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

// One compact JSON document per line, '\n' terminated.
template <typename Range>
std::string to_jsonl(const Range& records) {
    std::string out;
    for (const auto& r : records) {
        out += nlohmann::json(r).dump();
        out.push_back('\n');
    }
    return out;
}

template <typename Range>
void write_jsonl(const std::filesystem::path& path, const Range& records) {
    write_file_atomic(path, to_jsonl(records));
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

template <typename T>
std::vector<T> read_jsonl_as(const std::filesystem::path& path) {
    std::vector<T> out;
    for (const auto& j : read_jsonl(path)) out.push_back(j.template get<T>());
    return out;
}

}  // namespace suppcom
