#include "chi2tex/latex_check.hpp"

#include "chi2tex/text_util.hpp"

#include <fmt/format.h>

namespace chi2tex {

    namespace {

        template <typename OnChar>
        void scan(std::string_view s, OnChar on_char) {
            for (std::size_t i = 0; i < s.size(); ++i) {
                const char c = s[i];
                if (c == '\\') {
                    ++i;  // escaped character, or the first letter of a control word
                    continue;
                }
                if (c == '%') {
                    while (i < s.size() && s[i] != '\n') {
                        ++i;
                    }
                    continue;
                }
                if (!on_char(c, i)) {
                    return;
                }
            }
        }

        bool is_ascii_letter(char32_t c) noexcept { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

        bool is_letter(char32_t c) noexcept {
            return is_ascii_letter(c) || (c >= 0x0370 && c <= 0x03FF) || (c >= 0x0400 && c <= 0x04FF);
        }

        bool is_space(char32_t c) noexcept { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

    } // namespace

    bool braces_balanced(std::string_view latex) noexcept {
        int depth = 0;
        bool ok = true;
        scan(latex, [&](char c, std::size_t) {
            if (c == '{') {
                ++depth;
            }
            else if (c == '}' && --depth < 0) {
                ok = false;
                return false;
            }
            return true;
        });
        return ok && depth == 0;
    }

    std::optional<std::string> check_balance(std::string_view latex) {
        int depth = 0;
        std::size_t dollars = 0;
        std::optional<std::string> problem;
        scan(latex, [&](char c, std::size_t i) {
            if (c == '{') {
                ++depth;
            }
            else if (c == '}') {
                if (--depth < 0) {
                    problem = fmt::format("unmatched '}}' at byte {}", i);
                    return false;
                }
            }
            else if (c == '$') {
                ++dollars;
            }
            return true;
        });
        if (problem) {
            return problem;
        }
        if (depth != 0) {
            return fmt::format("{} unclosed '{{'", depth);
        }
        if (dollars % 2 != 0) {
            return std::string("unpaired '$'");
        }
        return std::nullopt;
    }

    bool has_inline_math_delimiter(std::string_view latex) noexcept {
        bool found = false;
        scan(latex, [&](char c, std::size_t) {
            if (c == '$') {
                found = true;
                return false;
            }
            return true;
        });
        return found;
    }

    std::vector<std::string> latex_tokens(std::string_view latex) {
        std::vector<std::string> tokens;
        std::size_t pos = 0;
        while (pos < latex.size()) {
            const std::size_t start = pos;
            const char32_t c = next_code_point(latex, pos);
            if (is_space(c)) {
                continue;
            }
            if (c == '\\') {
                if (pos < latex.size()) {
                    std::size_t look = pos;
                    const char32_t n = next_code_point(latex, look);
                    if (is_ascii_letter(n)) {
                        pos = look;
                        while (pos < latex.size()) {
                            std::size_t peek = pos;
                            if (!is_ascii_letter(next_code_point(latex, peek))) {
                                break;
                            }
                            pos = peek;
                        }
                    }
                    else {
                        pos = look;
                    }
                }
                tokens.emplace_back(latex.substr(start, pos - start));
                continue;
            }
            if (is_letter(c)) {
                while (pos < latex.size()) {
                    std::size_t peek = pos;
                    if (!is_letter(next_code_point(latex, peek))) {
                        break;
                    }
                    pos = peek;
                }
            }
            tokens.emplace_back(latex.substr(start, pos - start));
        }
        return tokens;
    }

} // namespace chi2tex
