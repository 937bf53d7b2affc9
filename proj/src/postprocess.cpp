#include "chi2tex/postprocess.hpp"

#include "chi2tex/errors.hpp"
#include "chi2tex/text_util.hpp"

#include <boost/regex/icu.hpp>
#include <fmt/format.h>

namespace chi2tex {

    std::vector<Rule> builtin_rules() {
        return {
            {RuleScope::text, " - ", " --- ", 0},
            {RuleScope::text, " {2,}", " ", 0},
            {RuleScope::everywhere, "[ \\t]+$", "", 0},
        };
    }

    namespace {

        std::string unquote(std::string_view v, std::size_t line) {
            if (v.size() < 2 || !v.starts_with('"') || !v.ends_with('"')) {
                return std::string(v);
            }
            std::string out;
            for (std::size_t i = 1; i + 1 < v.size(); ++i) {
                if (v[i] == '\\' && i + 2 < v.size()) {
                    out += v[++i];
                    continue;
                }
                if (v[i] == '"') {
                    throw RuleSyntax(line, "unescaped quote inside replacement");
                }
                out += v[i];
            }
            return out;
        }

    } // namespace

    std::vector<Rule> parse_rules(std::string_view text) {
        std::vector<Rule> rules;
        std::size_t lineno = 0;
        for (const auto raw : split_lines(text)) {
            ++lineno;
            const auto line = trim(raw);
            if (line.empty() || line.front() == '#') {
                continue;
            }
            const auto semi = line.find(';');
            if (semi == std::string_view::npos) {
                throw RuleSyntax(lineno, "expected 'scope ; /pattern/ ; replacement'");
            }
            Rule r;
            r.line = lineno;
            const auto scope = trim(line.substr(0, semi));
            if (scope == "text") {
                r.scope = RuleScope::text;
            }
            else if (scope == "everywhere" || scope == "all") {
                r.scope = RuleScope::everywhere;
            }
            else {
                throw RuleSyntax(lineno, fmt::format("unknown scope '{}'", scope));
            }

            const auto rest = trim(line.substr(semi + 1));
            if (!rest.starts_with('/')) {
                throw RuleSyntax(lineno, "pattern must be enclosed in slashes");
            }
            std::size_t end = 1;
            while (end < rest.size() && rest[end] != '/') {
                end += rest[end] == '\\' ? 2 : 1;
            }
            if (end >= rest.size()) {
                throw RuleSyntax(lineno, "unterminated pattern");
            }
            r.pattern = std::string(rest.substr(1, end - 1));
            if (r.pattern.empty()) {
                throw RuleSyntax(lineno, "empty pattern");
            }
            const auto tail = trim(rest.substr(end + 1));
            if (!tail.starts_with(';')) {
                throw RuleSyntax(lineno, "expected ';' after pattern");
            }
            r.replacement = unquote(trim(tail.substr(1)), lineno);
            rules.push_back(std::move(r));
        }
        return rules;
    }

    std::vector<Segment> segment_math(std::string_view s) {
        std::vector<Segment> out;
        std::size_t text_start = 0;
        auto push = [&](bool is_text, std::size_t from, std::size_t to) {
            if (to > from) {
                out.push_back({is_text, s.substr(from, to - from)});
            }
        };
        auto protect_until = [&](std::size_t start, std::size_t body, std::string_view closer) {
            const auto close = s.find(closer, body);
            const std::size_t end = close == std::string_view::npos ? s.size() : close + closer.size();
            push(true, text_start, start);
            push(false, start, end);
            text_start = end;
            return end;
        };

        std::size_t i = 0;
        while (i < s.size()) {
            const char c = s[i];
            if (c == '\\') {
                const auto rest = s.substr(i);
                if (rest.starts_with("\\begin{equation*}")) {
                    i = protect_until(i, i + 1, "\\end{equation*}");
                }
                else if (rest.starts_with("\\begin{equation}")) {
                    i = protect_until(i, i + 1, "\\end{equation}");
                }
                else if (rest.starts_with("\\[")) {
                    i = protect_until(i, i + 2, "\\]");
                }
                else {
                    i += 2;
                }
                continue;
            }
            if (c == '%') {
                i = protect_until(i, i, "\n");
                continue;
            }
            if (c == '$') {
                if (s.substr(i).starts_with("$$")) {
                    i = protect_until(i, i + 2, "$$");
                    continue;
                }
                // Inline math ends at the next unescaped '$'.
                std::size_t j = i + 1;
                while (j < s.size() && s[j] != '$') {
                    j += s[j] == '\\' ? 2 : 1;
                }
                const std::size_t end = std::min(j + 1, s.size());
                push(true, text_start, i);
                push(false, i, end);
                text_start = i = end;
                continue;
            }
            ++i;
        }
        push(true, text_start, s.size());
        return out;
    }

    struct Postprocessor::Compiled {
        std::vector<boost::u32regex> patterns;
    };

    Postprocessor::Postprocessor(std::vector<Rule> rules) : rules_(std::move(rules)), compiled_(std::make_unique<Compiled>()) {
        for (const auto& r : rules_) {
            try {
                compiled_->patterns.push_back(boost::make_u32regex(r.pattern, boost::regex::perl));
            }
            catch (const std::exception& e) {
                throw BadPattern(r.line, fmt::format("/{}/: {}", r.pattern, e.what()));
            }
        }
    }

    Postprocessor::~Postprocessor() = default;
    Postprocessor::Postprocessor(Postprocessor&&) noexcept = default;
    Postprocessor& Postprocessor::operator=(Postprocessor&&) noexcept = default;

    std::string Postprocessor::apply(std::string_view latex) const {
        std::string doc(latex);
        for (std::size_t k = 0; k < rules_.size(); ++k) {
            const auto& re = compiled_->patterns[k];
            const auto& fmt_str = rules_[k].replacement;
            if (rules_[k].scope == RuleScope::everywhere) {
                doc = boost::u32regex_replace(doc, re, fmt_str, boost::format_perl);
                continue;
            }
            std::string next;
            next.reserve(doc.size());
            for (const auto& seg : segment_math(doc)) {
                if (seg.is_text) {
                    next += boost::u32regex_replace(std::string(seg.body), re, fmt_str, boost::format_perl);
                }
                else {
                    next += seg.body;
                }
            }
            doc = std::move(next);
        }
        return doc;
    }

} // namespace chi2tex
