#include "overgaze/common/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "overgaze/common/error.hpp"

namespace fs = std::filesystem;

namespace og {

std::string read_text_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    std::string s((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return s;
}

std::vector<uint8_t> read_binary_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    std::vector<uint8_t> v((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return v;
}

namespace {

void write_and_rename(const fs::path& path, const char* data, size_t n) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
        f.write(data, static_cast<std::streamsize>(n));
        if (!f) throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

}  // namespace

void atomic_write_file(const fs::path& path, const std::string& content) {
    write_and_rename(path, content.data(), content.size());
}

void atomic_write_file(const fs::path& path, const std::vector<uint8_t>& content) {
    write_and_rename(path, reinterpret_cast<const char*>(content.data()), content.size());
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("mkdir " + dir.string() + ": " + ec.message());
}

std::vector<std::string> list_files(const fs::path& dir, const std::string& suffix) {
    std::vector<std::string> out;
    if (!fs::exists(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::string name = e.path().filename().string();
        if (name.size() >= suffix.size() &&
            name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
            out.push_back(name);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace og
