#include "chi2tex/merge_store.hpp"

#include "chi2tex/errors.hpp"
#include "chi2tex/text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

namespace chi2tex {

    std::string_view to_string(ResolutionStatus s) noexcept {
        return s == ResolutionStatus::resolved ? "resolved" : "pending";
    }

    const Resolution* Sidecar::find(const LineKey& key) const noexcept {
        const auto it = std::find_if(entries.begin(), entries.end(), [&](const Resolution& r) { return r.key == key; });
        return it == entries.end() ? nullptr : &*it;
    }

    Resolution* Sidecar::find(const LineKey& key) noexcept {
        return const_cast<Resolution*>(std::as_const(*this).find(key));
    }

    namespace {

        std::string_view ltrim(std::string_view s) noexcept {
            const auto p = s.find_first_not_of(" \t");
            return p == std::string_view::npos ? std::string_view{} : s.substr(p);
        }

        template <typename T>
        std::optional<T> parse_number(std::string_view v, int base = 10) {
            T out{};
            const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out, base);
            if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
                return std::nullopt;
            }
            return out;
        }

        struct BlockState {
            Resolution entry;
            std::size_t start_line = 0;
            std::set<std::string, std::less<>> seen;
        };

        void finish(BlockState& b, Sidecar& out) {
            for (const std::string_view required : {"file", "index", "crc", "status"}) {
                if (!b.seen.contains(required)) {
                    throw SidecarSyntax(b.start_line, fmt::format("block is missing '{}'", required));
                }
            }
            if (b.entry.status == ResolutionStatus::resolved && !b.entry.latex) {
                throw SidecarSyntax(b.start_line, "resolved block has no latex");
            }
            if (out.find(b.entry.key)) {
                throw DuplicateKey(b.entry.key.file, b.entry.key.index);
            }
            out.entries.push_back(std::move(b.entry));
        }

    } // namespace

    Sidecar parse_sidecar(std::string_view text) {
        const auto lines = split_lines(text);
        Sidecar out;
        std::size_t i = 0;
        while (i < lines.size() && trim(lines[i]).empty()) {
            ++i;
        }
        if (i == lines.size() || trim(lines[i]) != sidecar_header) {
            throw SidecarSyntax(i + 1, fmt::format("expected header '{}'", sidecar_header));
        }
        ++i;

        std::optional<BlockState> block;
        for (; i < lines.size(); ++i) {
            const std::size_t lineno = i + 1;
            const auto t = trim(lines[i]);
            if (t.empty()) {
                continue;
            }
            if (t == "[line]") {
                if (block) {
                    finish(*block, out);
                }
                block.emplace();
                block->start_line = lineno;
                continue;
            }
            if (t.front() == '#') {
                if (block) {
                    auto c = ltrim(lines[i]).substr(1);
                    if (c.starts_with(' ')) {
                        c.remove_prefix(1);
                    }
                    block->entry.comments.emplace_back(c);
                }
                continue;
            }
            if (!block) {
                throw SidecarSyntax(lineno, "expected [line]");
            }
            const auto eq = t.find('=');
            if (eq == std::string_view::npos) {
                throw SidecarSyntax(lineno, "expected key = value");
            }
            const std::string key(trim(t.substr(0, eq)));
            const auto value = trim(t.substr(eq + 1));
            if (key.empty() || key.find_first_of(" \t") != std::string::npos) {
                throw SidecarSyntax(lineno, "malformed key");
            }
            if (!block->seen.insert(key).second) {
                throw SidecarSyntax(lineno, fmt::format("repeated key '{}'", key));
            }
            auto& e = block->entry;
            if (key == "file") {
                if (value.empty()) {
                    throw SidecarSyntax(lineno, "empty file name");
                }
                e.key.file = value;
            }
            else if (key == "index") {
                const auto n = parse_number<std::size_t>(value);
                if (!n) {
                    throw SidecarSyntax(lineno, "index must be a non-negative integer");
                }
                e.key.index = *n;
            }
            else if (key == "crc") {
                const bool prefixed = value.starts_with("0x") || value.starts_with("0X");
                const auto n = prefixed ? parse_number<std::uint32_t>(value.substr(2), 16) : std::nullopt;
                if (!n) {
                    throw SidecarSyntax(lineno, "crc must be 0x followed by hex digits");
                }
                e.crc = *n;
            }
            else if (key == "status") {
                if (value == "pending") {
                    e.status = ResolutionStatus::pending;
                }
                else if (value == "resolved") {
                    e.status = ResolutionStatus::resolved;
                }
                else {
                    throw SidecarSyntax(lineno, "status must be pending or resolved");
                }
            }
            else if (key == "override") {
                if (value != "true" && value != "false") {
                    throw SidecarSyntax(lineno, "override must be true or false");
                }
                e.override_auto = value == "true";
            }
            else if (key == "latex") {
                if (!value.starts_with("<<<")) {
                    e.latex = std::string(value);
                    continue;
                }
                const std::string terminator = std::string(value.substr(3)) + ">>>";
                std::string body;
                bool closed = false;
                bool first = true;
                for (++i; i < lines.size(); ++i) {
                    if (lines[i] == terminator) {
                        closed = true;
                        break;
                    }
                    if (!first) {
                        body += '\n';
                    }
                    body += lines[i];
                    first = false;
                }
                if (!closed) {
                    throw SidecarSyntax(lineno, "unterminated latex heredoc");
                }
                e.latex = std::move(body);
            }
            else {
                e.extra.emplace_back(key, value);
            }
        }
        if (block) {
            finish(*block, out);
        }
        return out;
    }

    namespace {

        bool has_line(std::string_view text, std::string_view line) {
            for (const auto l : split_lines(text)) {
                if (l == line) {
                    return true;
                }
            }
            return false;
        }

    } // namespace

    std::string write_sidecar(const Sidecar& sidecar) {
        std::string out(sidecar_header);
        out += '\n';
        for (const auto& e : sidecar.entries) {
            out += fmt::format("\n[line]\nfile = {}\nindex = {}\ncrc = 0x{:08X}\nstatus = {}\n", e.key.file,
                               e.key.index, e.crc, to_string(e.status));
            if (e.override_auto) {
                out += "override = true\n";
            }
            for (const auto& [k, v] : e.extra) {
                out += fmt::format("{} = {}\n", k, v);
            }
            for (const auto& c : e.comments) {
                for (const auto l : split_lines(c)) {
                    out += fmt::format("# {}\n", l);
                }
            }
            if (e.latex) {
                std::string tag;
                for (int n = 0; has_line(*e.latex, tag + ">>>"); ++n) {
                    tag = n == 0 ? "EOT" : fmt::format("EOT{}", n);
                }
                out += fmt::format("latex = <<<{}\n", tag);
                if (!e.latex->empty()) {
                    out += *e.latex;
                    out += '\n';
                }
                out += tag + ">>>\n";
            }
        }
        return out;
    }

    std::vector<Resolution> export_flags(const ChiDocument& doc, const FontTables& tables,
                                         const Thresholds& thresholds, const TranslatorOptions& options) {
        std::vector<Resolution> out;
        for (const auto& line : doc.lines) {
            const auto verdict = classify(extract_features(line, tables), thresholds);
            if (verdict.decision == Decision::AUTO) {
                continue;
            }
            Resolution r;
            r.key = {doc.source_path, line.index()};
            r.crc = line.crc();
            std::string reasons;
            for (const auto reason : verdict.reasons) {
                reasons += reasons.empty() ? "" : ", ";
                reasons += to_string(reason);
            }
            r.comments.push_back("reasons: " + reasons);
            if (const auto attempt = auto_attempt(line, tables, options)) {
                const auto rendered = render_fragment(*attempt, options);
                for (const auto l : split_lines(rendered)) {
                    r.comments.push_back(fmt::format("auto-attempt: {}", l));
                }
            }
            else {
                r.comments.emplace_back("auto-attempt: none");
            }
            out.push_back(std::move(r));
        }
        return out;
    }

    Sidecar refresh_sidecar(Sidecar existing, std::span<const Resolution> fresh, std::span<const std::string> files) {
        const auto covered = [&](const LineKey& k) { return std::find(files.begin(), files.end(), k.file) != files.end(); };
        Sidecar out;
        for (auto& e : existing.entries) {
            if (!covered(e.key)) {
                out.entries.push_back(std::move(e));
            }
        }
        for (const auto& f : fresh) {
            const auto* old = existing.find(f.key);
            if (old && old->crc == f.crc) {
                out.entries.push_back(*old);
                continue;
            }
            Resolution r = f;
            if (old && old->latex) {
                r.comments.push_back(fmt::format("stale: line changed since crc 0x{:08X}", old->crc));
                for (const auto l : split_lines(*old->latex)) {
                    r.comments.push_back(fmt::format("stale latex: {}", l));
                }
            }
            out.entries.push_back(std::move(r));
        }
        // Overrides of lines that are no longer flagged stay until merge checks them.
        for (const auto& e : existing.entries) {
            if (covered(e.key) && e.override_auto && !out.find(e.key)) {
                out.entries.push_back(e);
            }
        }
        std::stable_sort(out.entries.begin(), out.entries.end(),
                         [](const Resolution& a, const Resolution& b) { return a.key < b.key; });
        return out;
    }

    MergeReport merge_resolutions(std::vector<KeyedFragment>& fragments, const Sidecar& sidecar, MergeMode mode) {
        std::map<LineKey, std::size_t> by_key;
        std::set<std::string> files;
        for (std::size_t i = 0; i < fragments.size(); ++i) {
            by_key.emplace(fragments[i].key, i);
            files.insert(fragments[i].key.file);
        }

        MergeReport report;
        for (const auto& e : sidecar.entries) {
            const auto it = by_key.find(e.key);
            if (it == by_key.end()) {
                if (files.contains(e.key.file)) {
                    report.orphans.push_back(e.key);
                }
                continue;
            }
            const auto found = fragments[it->second].crc;
            if (found != e.crc) {
                throw CrcMismatch(e.key.file, e.key.index, e.crc, found);
            }
        }

        auto accepted = [&](const KeyedFragment& f) -> const Resolution* {
            const auto* e = sidecar.find(f.key);
            return e && e->status == ResolutionStatus::resolved && e->latex ? e : nullptr;
        };
        for (const auto& f : fragments) {
            if (f.verdict.decision == Decision::MANUAL && !accepted(f)) {
                report.unresolved.push_back(f.key);
            }
        }
        if (mode == MergeMode::strict && !report.unresolved.empty()) {
            std::vector<std::pair<std::string, std::size_t>> missing;
            for (const auto& k : report.unresolved) {
                missing.emplace_back(k.file, k.index);
            }
            throw UnresolvedManualLine(std::move(missing));
        }

        for (auto& f : fragments) {
            const auto* e = accepted(f);
            if (f.verdict.decision == Decision::MANUAL) {
                if (e) {
                    f.fragment = LatexFragment{FragmentMode::text, std::nullopt, *e->latex};
                    f.unresolved = false;
                    ++report.applied;
                }
                else {
                    f.fragment = LatexFragment{FragmentMode::text, std::nullopt, unresolved_placeholder(f.key.index)};
                    f.unresolved = true;
                }
            }
            else if (e) {
                if (e->override_auto) {
                    f.fragment = LatexFragment{FragmentMode::text, std::nullopt, *e->latex};
                    ++report.overrides;
                }
                else {
                    ++report.ignored_auto;
                }
            }
        }
        return report;
    }

} // namespace chi2tex
