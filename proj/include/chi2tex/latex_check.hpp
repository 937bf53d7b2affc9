#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chi2tex {

    /// Unescaped braces pair up and never close below depth zero.
    bool braces_balanced(std::string_view latex) noexcept;

    /// Brace and `$` balance of a LaTeX snippet, skipping `%` comments and
    /// escaped characters. Returns a description of the first problem.
    std::optional<std::string> check_balance(std::string_view latex);

    /// True if `latex` contains an unescaped `$` outside comments.
    bool has_inline_math_delimiter(std::string_view latex) noexcept;

    /// Whitespace-insensitive LaTeX tokens: control sequences, maximal letter
    /// runs (Latin, Cyrillic, Greek), and single other code points.
    std::vector<std::string> latex_tokens(std::string_view latex);

} // namespace chi2tex
