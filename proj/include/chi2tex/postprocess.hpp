#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace chi2tex {

    enum class RuleScope {
        text,        // prose outside math and comments
        everywhere,  // the whole document
    };

    struct Rule {
        RuleScope scope = RuleScope::text;
        std::string pattern;      // Perl syntax, UTF-8, matched per code point
        std::string replacement;  // Perl format: $1, $&, ...
        std::size_t line = 0;     // source line in the rules file, 0 for builtins

        bool operator==(const Rule&) const = default;
    };

    /// Dash between words, repeated blanks in prose, trailing blanks.
    std::vector<Rule> builtin_rules();

    /// One rule per line: `scope ; /pattern/ ; replacement`. Scope is `text`
    /// or `everywhere`. The replacement may be double-quoted to keep
    /// surrounding blanks. Blank lines and lines starting with `#` are
    /// skipped. Throws RuleSyntax.
    std::vector<Rule> parse_rules(std::string_view text);

    struct Segment {
        bool is_text = true;
        std::string_view body;
    };

    /// Splits LaTeX into prose and protected spans: $...$, $$...$$,
    /// \[...\], equation environments and % comments. Escaped \$ and \%
    /// stay in prose.
    std::vector<Segment> segment_math(std::string_view latex);

    class Postprocessor {
    public:
        /// Compiles every rule up front; throws BadPattern.
        explicit Postprocessor(std::vector<Rule> rules);
        ~Postprocessor();
        Postprocessor(Postprocessor&&) noexcept;
        Postprocessor& operator=(Postprocessor&&) noexcept;

        std::string apply(std::string_view latex) const;
        const std::vector<Rule>& rules() const noexcept { return rules_; }

    private:
        struct Compiled;
        std::vector<Rule> rules_;
        std::unique_ptr<Compiled> compiled_;
    };

} // namespace chi2tex
