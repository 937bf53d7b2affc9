#pragma once

#include <filesystem>
#include <random>
#include <string>

namespace testing {

    inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(CHI2TEX_FIXTURES) / name; }

    inline std::filesystem::path cli_binary() { return std::filesystem::path(CHI2TEX_CLI); }

    /// Fresh directory under the system temp dir, removed on destruction.
    class ScratchDir {
    public:
        ScratchDir() {
            std::random_device rd;
            path_ = std::filesystem::temp_directory_path() / ("chi2tex-test-" + std::to_string(rd()) + std::to_string(rd()));
            std::filesystem::create_directories(path_);
        }
        ~ScratchDir() {
            std::error_code ec;
            std::filesystem::remove_all(path_, ec);
        }
        ScratchDir(const ScratchDir&) = delete;
        ScratchDir& operator=(const ScratchDir&) = delete;

        const std::filesystem::path& path() const noexcept { return path_; }
        std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

    private:
        std::filesystem::path path_;
    };

} // namespace testing
