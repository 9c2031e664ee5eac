#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "tvbarc/errors.hpp"

namespace tvbarc {

/// Collects output files in a temporary sibling directory and renames them
/// into place only on commit, so a failed run never leaves partial outputs.
class OutputStager {
  public:
    explicit OutputStager(std::filesystem::path target_dir)
        : target_(std::move(target_dir)) {
        std::error_code ec;
        std::filesystem::create_directories(target_, ec);
        if (ec) throw data_error("cannot create output directory: " + target_.string());
        std::random_device rd;
        staging_ = target_ / (".staging-" + std::to_string(rd()) + std::to_string(rd()));
        if (!std::filesystem::create_directory(staging_, ec) || ec)
            throw data_error("cannot create staging directory: " + staging_.string());
    }

    OutputStager(const OutputStager&) = delete;
    OutputStager& operator=(const OutputStager&) = delete;

    ~OutputStager() {
        if (!committed_) {
            std::error_code ec;
            std::filesystem::remove_all(staging_, ec);
        }
    }

    /// Path to write a pending output to; remembered for commit().
    std::filesystem::path stage(const std::string& filename) {
        names_.push_back(filename);
        return staging_ / filename;
    }

    const std::filesystem::path& target_dir() const { return target_; }

    /// Move every staged file into the target directory, replacing existing
    /// files of the same name, then drop the staging directory.
    void commit() {
        for (const std::string& name : names_) {
            std::error_code ec;
            std::filesystem::rename(staging_ / name, target_ / name, ec);
            if (ec) {
                // rename cannot replace across some filesystems; copy+remove fallback
                std::filesystem::copy_file(staging_ / name, target_ / name,
                                           std::filesystem::copy_options::overwrite_existing, ec);
                if (ec) throw data_error("cannot move output into place: " + name);
                std::filesystem::remove(staging_ / name, ec);
            }
        }
        std::error_code ec;
        std::filesystem::remove_all(staging_, ec);
        committed_ = true;
    }

  private:
    std::filesystem::path target_;
    std::filesystem::path staging_;
    std::vector<std::string> names_;
    bool committed_ = false;
};

}  // namespace tvbarc
