#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace chi2tex {

    std::string_view trim(std::string_view s) noexcept;

    /// Splits on '\n'; a trailing '\r' is removed from each line. A final
    /// empty segment after a terminating newline is not returned.
    std::vector<std::string_view> split_lines(std::string_view text);

    /// Decodes one UTF-8 code point at `pos` and advances it. Malformed bytes
    /// decode as U+FFFD and advance by one.
    char32_t next_code_point(std::string_view s, std::size_t& pos) noexcept;

    std::size_t count_code_points(std::string_view s) noexcept;

    std::string hex_bytes(std::string_view bytes);

    std::string read_file(const std::string& path);

    /// Writes through a temporary sibling and renames over `path`.
    void write_file_atomic(const std::string& path, std::string_view contents);

} // namespace chi2tex
