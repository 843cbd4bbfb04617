#pragma once

// Output directory bookkeeping for the command-line tool: every file goes
// through OutputSet so that the run manifest can list it with its hash.

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace quench::cli {

/// Full-precision scientific notation used for every CSV number.
std::string fmt(double x);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir);

    const std::filesystem::path& dir() const noexcept { return dir_; }

    void write_text(const std::string& name, const std::string& content);
    void write_json(const std::string& name, const nlohmann::json& j);
    /// Header plus rows, comma separated.
    void write_csv(const std::string& name, const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows);

    /// Manifest with command line, config echo, version, wall time and the
    /// hash of every file written so far. Must be the last write.
    void write_manifest(const std::string& command, const nlohmann::json& config);

private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace quench::cli
