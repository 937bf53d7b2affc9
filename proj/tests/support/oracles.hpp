#pragma once

// Reference implementations used only by tests. Each one is written
// independently of the library code it checks.

#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace oracle {

    // CRC-32, one bit at a time, no table.
    inline std::uint32_t crc32_bitwise(std::string_view data) {
        std::uint32_t crc = 0xFFFFFFFFu;
        for (const unsigned char byte : data) {
            crc ^= byte;
            for (int bit = 0; bit < 8; ++bit) {
                const bool low = crc & 1u;
                crc >>= 1;
                if (low) {
                    crc ^= 0xEDB88320u;
                }
            }
        }
        return ~crc;
    }

    struct StepCell {
        int row;
        int col;
        int font;
        unsigned char code;

        auto operator<=>(const StepCell&) const = default;
    };

    struct StepResult {
        std::vector<StepCell> cells;
        std::size_t dropped = 0;
        int font = 0;
    };

    // Walks raw line bytes directly with a cursor, without a token stream.
    inline StepResult step_grid(std::string_view raw, int font, int max_rows) {
        StepResult out;
        int row = 0;
        int col = 0;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            const unsigned char c = raw[i];
            if (c == '\\' && i + 1 < raw.size()) {
                const unsigned char e = raw[++i];
                if (e >= '0' && e <= '9') {
                    font = e - '0';
                }
                else if (e == '^') {
                    row -= 1;
                }
                else if (e == ',') {
                    row += 1;
                }
                else if (e == ' ') {
                    col += 1;
                }
                continue;  // \& and unknown escapes move nothing
            }
            if (c == '\\') {
                continue;  // lone trailing backslash
            }
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                col += 1;
                continue;
            }
            if (std::abs(row) > max_rows) {
                ++out.dropped;
            }
            else {
                out.cells.push_back({row, col, font, c});
            }
            col += 1;
        }
        out.font = font;
        return out;
    }

    // ЙЦУКЕН keyboard, one physical key row at a time.
    inline const std::map<char, std::u32string>& jcuken_keyboard() {
        static const std::map<char, std::u32string> table = [] {
            std::map<char, std::u32string> t;
            const std::tuple<std::string_view, std::u32string_view> rows[] = {
                {"qwertyuiop[]", U"йцукенгшщзхъ"}, {"asdfghjkl;'", U"фывапролджэ"}, {"zxcvbnm,.", U"ячсмитьбю"},
                {"`", U"ё"},
                {"QWERTYUIOP{}", U"ЙЦУКЕНГШЩЗХЪ"}, {"ASDFGHJKL:\"", U"ФЫВАПРОЛДЖЭ"}, {"ZXCVBNM<>", U"ЯЧСМИТЬБЮ"},
                {"~", U"Ё"},
            };
            for (const auto& [keys, letters] : rows) {
                for (std::size_t i = 0; i < keys.size(); ++i) {
                    t[keys[i]] = std::u32string(1, letters[i]);
                }
            }
            return t;
        }();
        return table;
    }

    inline std::optional<char> key_for_letter(char32_t letter) {
        for (const auto& [key, l] : jcuken_keyboard()) {
            if (l.front() == letter) {
                return key;
            }
        }
        return std::nullopt;
    }

} // namespace oracle
