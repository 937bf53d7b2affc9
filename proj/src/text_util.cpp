#include "chi2tex/text_util.hpp"

#include <fmt/format.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <system_error>

namespace chi2tex {

    std::string_view trim(std::string_view s) noexcept {
        const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
        while (!s.empty() && ws(s.front())) {
            s.remove_prefix(1);
        }
        while (!s.empty() && ws(s.back())) {
            s.remove_suffix(1);
        }
        return s;
    }

    std::vector<std::string_view> split_lines(std::string_view text) {
        std::vector<std::string_view> lines;
        std::size_t pos = 0;
        while (pos < text.size()) {
            const auto nl = text.find('\n', pos);
            const auto end = nl == std::string_view::npos ? text.size() : nl;
            auto line = text.substr(pos, end - pos);
            if (!line.empty() && line.back() == '\r') {
                line.remove_suffix(1);
            }
            lines.push_back(line);
            pos = nl == std::string_view::npos ? text.size() : nl + 1;
        }
        return lines;
    }

    char32_t next_code_point(std::string_view s, std::size_t& pos) noexcept {
        const auto b0 = static_cast<unsigned char>(s[pos]);
        std::size_t len = 0;
        char32_t cp = 0;
        if (b0 < 0x80) {
            ++pos;
            return b0;
        }
        if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        }
        else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        }
        else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
        }
        else {
            ++pos;
            return 0xFFFD;
        }
        if (pos + len > s.size()) {
            ++pos;
            return 0xFFFD;
        }
        for (std::size_t i = 1; i < len; ++i) {
            const auto b = static_cast<unsigned char>(s[pos + i]);
            if ((b & 0xC0) != 0x80) {
                ++pos;
                return 0xFFFD;
            }
            cp = (cp << 6) | (b & 0x3F);
        }
        pos += len;
        return cp;
    }

    std::size_t count_code_points(std::string_view s) noexcept {
        std::size_t n = 0;
        for (std::size_t pos = 0; pos < s.size(); ++n) {
            next_code_point(s, pos);
        }
        return n;
    }

    std::string hex_bytes(std::string_view bytes) {
        std::string out;
        out.reserve(bytes.size() * 2);
        for (const char c : bytes) {
            out += fmt::format("{:02x}", static_cast<unsigned char>(c));
        }
        return out;
    }

    std::string read_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw std::system_error(errno, std::generic_category(), path);
        }
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }

    void write_file_atomic(const std::string& path, std::string_view contents) {
        namespace fs = std::filesystem;
        const fs::path target(path);
        fs::path tmp = target;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) {
                throw std::system_error(errno, std::generic_category(), tmp.string());
            }
            out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
            out.flush();
            if (!out) {
                throw std::system_error(errno, std::generic_category(), tmp.string());
            }
        }
        std::error_code ec;
        fs::rename(tmp, target, ec);
        if (ec) {
            throw std::system_error(ec, path);
        }
    }

} // namespace chi2tex
