#include "output.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

#ifndef QUENCH_VERSION
#define QUENCH_VERSION "0.0.0"
#endif

namespace quench::cli {

namespace fs = std::filesystem;

std::string fmt(double x) {
    std::array<char, 40> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17e", x);
    return buf.data();
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    std::array<char, 1 << 15> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md.data(), &len);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    hex.reserve(2 * len);
    static const char* digits = "0123456789abcdef";
    for (unsigned int i = 0; i < len; ++i) {
        hex.push_back(digits[md[i] >> 4]);
        hex.push_back(digits[md[i] & 15]);
    }
    return hex;
}

OutputSet::OutputSet(fs::path dir) : dir_(std::move(dir)), start_(std::chrono::steady_clock::now()) {
    fs::create_directories(dir_);
}

void OutputSet::write_text(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + p.string());
    files_.push_back(name);
}

void OutputSet::write_json(const std::string& name, const nlohmann::json& j) {
    write_text(name, j.dump(2) + "\n");
}

void OutputSet::write_csv(const std::string& name, const std::vector<std::string>& header,
                          const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream s;
    auto line = [&s](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) s << (i ? "," : "") << cells[i];
        s << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    write_text(name, s.str());
}

void OutputSet::write_manifest(const std::string& command, const nlohmann::json& config) {
    nlohmann::json m;
    m["command"] = command;
    m["config"] = config;
    m["version"] = QUENCH_VERSION;
    m["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    nlohmann::json files = nlohmann::json::array();
    for (const auto& f : files_)
        files.push_back({{"path", f},
                         {"sha256", sha256_file(dir_ / f)},
                         {"bytes", fs::file_size(dir_ / f)}});
    m["files"] = files;
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    out << m.dump(2) << "\n";
    if (!out) throw std::runtime_error("cannot write manifest");
}

}  // namespace quench::cli
