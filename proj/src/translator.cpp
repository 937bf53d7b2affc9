#include "chi2tex/translator.hpp"

#include "chi2tex/errors.hpp"
#include "chi2tex/text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>

namespace chi2tex {

    namespace {

        bool ascii_letter(char c) noexcept { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

        // Accumulates LaTeX, separating a control word from a following letter.
        class Emitter {
        public:
            void append(std::string_view piece) {
                if (piece.empty()) {
                    return;
                }
                if (ascii_letter(piece.front()) && ends_with_control_word()) {
                    out_ += ' ';
                }
                out_ += piece;
            }

            void raw(std::string_view piece) { out_ += piece; }

            void space() {
                if (!out_.empty() && out_.back() != ' ') {
                    out_ += ' ';
                }
            }

            const std::string& str() const noexcept { return out_; }
            std::string take() { return std::move(out_); }

        private:
            bool ends_with_control_word() const noexcept {
                std::size_t i = out_.size();
                while (i > 0 && ascii_letter(out_[i - 1])) {
                    --i;
                }
                return i < out_.size() && i > 0 && out_[i - 1] == '\\';
            }

            std::string out_;
        };

        enum class NodeKind { text, neutral, math };

        NodeKind kind_of(const TreeNode& node) noexcept {
            if (node.has_scripts() || node.accent) {
                return NodeKind::math;
            }
            switch (node.base.symbol.cls) {
                case SymbolClass::cyrillic: return NodeKind::text;
                case SymbolClass::digit_punct: return NodeKind::neutral;
                default: return NodeKind::math;
            }
        }

        bool plain_cyrillic(const TreeNode& node) noexcept { return kind_of(node) == NodeKind::text; }

        bool big_operator(std::string_view latex) noexcept {
            static constexpr std::string_view ops[] = {"\\int", "\\iint", "\\oint", "\\sum", "\\prod", "\\lim"};
            return std::find(std::begin(ops), std::end(ops), latex) != std::end(ops);
        }

        // A baseline item: a node, or a horizontal gap between nodes.
        struct Item {
            const TreeNode* node = nullptr;
            bool gap() const noexcept { return node == nullptr; }
        };

        std::vector<Item> with_gaps(std::span<const TreeNode> nodes) {
            std::vector<Item> items;
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                if (i > 0 && nodes[i].first_col > nodes[i - 1].last_col + 1) {
                    items.push_back({});
                }
                items.push_back({&nodes[i]});
            }
            return items;
        }

        void emit_math(std::span<const Item> items, Emitter& em);

        std::string script_group(const std::vector<TreeNode>& script, bool force_braces) {
            Emitter inner;
            const auto items = with_gaps(script);
            emit_math(items, inner);
            auto s = inner.take();
            const bool simple = script.size() == 1 && !script.front().has_scripts() && !script.front().accent;
            if (!force_braces && simple && s.size() == 1) {
                return s;
            }
            return "{" + s + "}";
        }

        void emit_node(const TreeNode& node, Emitter& em) {
            const auto& sym = node.base.symbol;
            std::string base = sym.cls == SymbolClass::cyrillic ? "\\text{" + sym.latex + "}" : sym.latex;
            if (node.accent) {
                base = node.accent->latex + "{" + base + "}";
            }
            em.append(base);
            const bool big = big_operator(sym.latex);
            if (!node.subscript.empty()) {
                em.raw("_");
                em.raw(script_group(node.subscript, big));
            }
            if (!node.superscript.empty()) {
                em.raw("^");
                em.raw(script_group(node.superscript, big));
            }
        }

        void emit_math(std::span<const Item> items, Emitter& em) {
            for (std::size_t i = 0; i < items.size(); ++i) {
                if (items[i].gap()) {
                    em.space();
                    continue;
                }
                if (!plain_cyrillic(*items[i].node)) {
                    emit_node(*items[i].node, em);
                    continue;
                }
                // Cyrillic words inside math become one \text group, keeping inner gaps.
                std::string text;
                std::size_t j = i;
                while (j < items.size()) {
                    if (items[j].gap()) {
                        if (j + 1 < items.size() && !items[j + 1].gap() && plain_cyrillic(*items[j + 1].node)) {
                            text += ' ';
                            ++j;
                            continue;
                        }
                        break;
                    }
                    if (!plain_cyrillic(*items[j].node)) {
                        break;
                    }
                    text += items[j].node->base.symbol.latex;
                    ++j;
                }
                em.append("\\text{" + text + "}");
                i = j - 1;
            }
        }

        bool closer(const Item& item) noexcept {
            if (item.gap()) {
                return false;
            }
            const auto& l = item.node->base.symbol.latex;
            return l == ")" || l == "]" || l == "\\}";
        }

        void check_symbols(const MappedGrid& grid) {
            for (const auto& mc : grid) {
                if (mc.symbol.cls == SymbolClass::unknown) {
                    throw UnknownSymbol(mc.cell.font, mc.cell.code, mc.cell.row, mc.cell.col);
                }
            }
        }

        // Inline transduction. States: prose, or inside "$...$". Neutral
        // glyphs and gaps met inside math wait in `pending` until the next
        // node shows which side of the closing "$" they belong on.
        std::string transduce_inline(std::span<const TreeNode> baseline, const TranslatorOptions& options) {
            const auto items = with_gaps(baseline);
            std::string out;
            std::vector<Item> math;
            std::vector<Item> pending;
            bool in_math = false;

            auto open_math = [&] {
                if (options.pad_inline_math && !out.empty() && out.back() != ' ') {
                    out += ' ';
                }
                out += '$';
                in_math = true;
            };
            auto flush_math = [&](std::string_view close) {
                Emitter em;
                emit_math(math, em);
                out += trim(em.str());
                out += close;
                math.clear();
                in_math = false;
            };
            auto emit_text = [&](const Item& item) {
                if (item.gap()) {
                    if (!out.empty() && out.back() != ' ') {
                        out += ' ';
                    }
                }
                else {
                    out += item.node->base.symbol.latex;
                }
            };

            for (const auto& item : items) {
                if (!in_math) {
                    if (!item.gap() && kind_of(*item.node) == NodeKind::math) {
                        open_math();
                        math.push_back(item);
                    }
                    else {
                        emit_text(item);
                    }
                    continue;
                }
                if (item.gap() || kind_of(*item.node) == NodeKind::neutral) {
                    pending.push_back(item);
                    continue;
                }
                if (kind_of(*item.node) == NodeKind::math) {
                    math.insert(math.end(), pending.begin(), pending.end());
                    pending.clear();
                    math.push_back(item);
                    continue;
                }
                // Prose resumes: closing brackets stay with the formula.
                std::size_t keep = 0;
                while (keep < pending.size() && closer(pending[keep])) {
                    ++keep;
                }
                math.insert(math.end(), pending.begin(), pending.begin() + static_cast<std::ptrdiff_t>(keep));
                flush_math(options.pad_inline_math ? "$ " : "$");
                for (std::size_t k = keep; k < pending.size(); ++k) {
                    emit_text(pending[k]);
                }
                pending.clear();
                emit_text(item);
            }
            if (in_math) {
                while (!pending.empty() && pending.back().gap()) {
                    pending.pop_back();
                }
                math.insert(math.end(), pending.begin(), pending.end());
                flush_math("$");
            }
            return std::string(trim(out));
        }

        struct TagSpan {
            std::string digits;
            int open_col = 0;
            int close_col = 0;
        };

        std::optional<TagSpan> trailing_tag(const MappedGrid& grid, int tag_font) {
            std::vector<const MappedCell*> base;
            for (const auto& mc : grid) {
                if (mc.cell.row == 0) {
                    base.push_back(&mc);
                }
            }
            std::sort(base.begin(), base.end(), [](auto* a, auto* b) { return a->cell.col < b->cell.col; });
            auto is = [&](const MappedCell* mc, std::string_view latex) {
                return mc->cell.font == tag_font && mc->symbol.latex == latex;
            };
            if (base.size() < 3 || !is(base.back(), ")")) {
                return std::nullopt;
            }
            std::size_t i = base.size() - 1;
            std::string digits;
            while (i > 0) {
                const auto* mc = base[i - 1];
                const auto& l = mc->symbol.latex;
                if (mc->cell.font != tag_font || l.size() != 1 || l[0] < '0' || l[0] > '9' ||
                    mc->cell.col + 1 != base[i]->cell.col) {
                    break;
                }
                digits.insert(digits.begin(), l[0]);
                --i;
            }
            if (digits.empty() || i == 0 || !is(base[i - 1], "(") || base[i - 1]->cell.col + 1 != base[i]->cell.col) {
                return std::nullopt;
            }
            return TagSpan{digits, base[i - 1]->cell.col, base.back()->cell.col};
        }

    } // namespace

    std::optional<std::string> detect_display(const MappedGrid& grid, const TranslatorOptions& options) {
        const auto tag = trailing_tag(grid, options.tag_font);
        if (!tag) {
            return std::nullopt;
        }
        std::size_t math = 0;
        std::size_t prose = 0;
        for (const auto& mc : grid) {
            const auto& c = mc.cell;
            if (c.row != 0 && c.col >= tag->open_col && c.col <= tag->close_col + 1) {
                return std::nullopt;
            }
            if (c.row != 0 || c.col >= tag->open_col) {
                continue;
            }
            if (mc.symbol.cls == SymbolClass::cyrillic) {
                ++prose;
            }
            else if (is_math_class(mc.symbol.cls)) {
                ++math;
            }
        }
        if (math == 0 || static_cast<double>(math) < options.display_math_share * static_cast<double>(math + prose)) {
            return std::nullopt;
        }
        return tag->digits;
    }

    LatexFragment translate_grid(const MappedGrid& grid, const TranslatorOptions& options) {
        check_symbols(grid);
        const auto tree = attach_scripts(grid);
        LatexFragment frag;
        if (auto tag = detect_display(grid, options)) {
            const auto span = trailing_tag(grid, options.tag_font);
            std::vector<TreeNode> body;
            for (const auto& node : tree.baseline) {
                if (node.base.cell.col < span->open_col) {
                    body.push_back(node);
                }
            }
            Emitter em;
            const auto items = with_gaps(body);
            emit_math(items, em);
            frag.mode = FragmentMode::display;
            frag.tag = std::move(tag);
            frag.content = std::string(trim(em.str()));
            return frag;
        }
        frag.content = transduce_inline(tree.baseline, options);
        return frag;
    }

    LatexFragment translate_line(const LogicalLine& line, const FontTables& tables, const Thresholds& thresholds,
                                 const TranslatorOptions& options) {
        const auto grid = map_grid(line.cells(), tables);
        const auto layout = analyze_layout(grid);
        if (classify(extract_features(line, grid, layout), thresholds).decision != Decision::AUTO) {
            throw NotAuto(line.index());
        }
        return translate_grid(grid, options);
    }

    std::optional<LatexFragment> auto_attempt(const LogicalLine& line, const FontTables& tables,
                                              const TranslatorOptions& options) {
        try {
            return translate_grid(map_grid(line.cells(), tables), options);
        }
        catch (const Error&) {
            return std::nullopt;
        }
    }

    std::string render_fragment(const LatexFragment& fragment, const TranslatorOptions& options) {
        if (fragment.mode == FragmentMode::text) {
            return fragment.content;
        }
        const std::string tag = fragment.tag.value_or("");
        std::string out;
        if (options.fence_displays) {
            out += "%%\n";
        }
        out += tag.empty() ? "\\begin{equation*}\n" : fmt::format("\\begin{{equation*}}\\label{{{}}}\n", tag);
        out += fragment.content + "\n";
        if (!tag.empty()) {
            out += fmt::format("\\tag{{{}}}\n", tag);
        }
        out += "\\end{equation*}";
        if (options.fence_displays) {
            out += "\n%%";
        }
        return out;
    }

    std::vector<KeyedFragment> translate_document(const ChiDocument& doc, const FontTables& tables,
                                                  const Thresholds& thresholds, const TranslatorOptions& options) {
        std::vector<KeyedFragment> out;
        out.reserve(doc.lines.size());
        for (const auto& line : doc.lines) {
            KeyedFragment kf;
            kf.key = {doc.source_path, line.index()};
            kf.crc = line.crc();
            const auto grid = map_grid(line.cells(), tables);
            kf.verdict = classify(extract_features(line, grid, analyze_layout(grid)), thresholds);
            if (kf.verdict.decision == Decision::AUTO) {
                kf.fragment = translate_grid(grid, options);
            }
            else {
                kf.unresolved = true;
            }
            out.push_back(std::move(kf));
        }
        return out;
    }

    namespace {

        bool parse_bool(std::string_view v, std::size_t line) {
            if (v == "true" || v == "yes" || v == "1") {
                return true;
            }
            if (v == "false" || v == "no" || v == "0") {
                return false;
            }
            throw ConfigParseError(line, fmt::format("expected a boolean, got '{}'", v));
        }

        std::string usepackage(std::string_view pkg) {
            if (pkg.starts_with('[') || pkg.starts_with('{')) {
                return fmt::format("\\usepackage{}", pkg);
            }
            return fmt::format("\\usepackage{{{}}}", pkg);
        }

        bool loads(const std::vector<std::string>& packages, std::string_view name) {
            return std::any_of(packages.begin(), packages.end(), [&](const std::string& p) {
                return p == name || p.ends_with(fmt::format("{{{}}}", name));
            });
        }

    } // namespace

    OutputConfig parse_output_config(std::optional<std::string_view> text) {
        OutputConfig cfg;
        if (!text) {
            return cfg;
        }
        bool packages_replaced = false;
        std::size_t lineno = 0;
        for (const auto raw : split_lines(*text)) {
            ++lineno;
            const auto line = trim(raw);
            if (line.empty() || line.front() == '#') {
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ConfigParseError(lineno, "expected key = value");
            }
            const auto key = trim(line.substr(0, eq));
            const auto value = trim(line.substr(eq + 1));
            if (key == "class") {
                cfg.document_class = value;
            }
            else if (key == "options") {
                cfg.class_options = value;
            }
            else if (key == "package") {
                if (!packages_replaced) {
                    cfg.packages.clear();
                    packages_replaced = true;
                }
                cfg.packages.emplace_back(value);
            }
            else if (key == "line") {
                cfg.extra_lines.emplace_back(value);
            }
            else if (key == "fence_displays") {
                cfg.translator.fence_displays = parse_bool(value, lineno);
            }
            else if (key == "pad_inline_math") {
                cfg.translator.pad_inline_math = parse_bool(value, lineno);
            }
            else if (key == "display_math_share") {
                double share = 0.0;
                const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), share);
                if (ec != std::errc{} || ptr != value.data() + value.size() || share < 0.0 || share > 1.0) {
                    throw ConfigParseError(lineno, "display_math_share must be a number in [0, 1]");
                }
                cfg.translator.display_math_share = share;
            }
            else {
                throw ConfigParseError(lineno, fmt::format("unknown key '{}'", key));
            }
        }
        for (const std::string_view required : {"amsmath", "amssymb"}) {
            if (!loads(cfg.packages, required)) {
                cfg.packages.emplace_back(required);
            }
        }
        return cfg;
    }

    std::string unresolved_placeholder(std::size_t index) {
        return fmt::format("% chi2tex: UNRESOLVED line {}", index);
    }

    std::string assemble_document(std::span<const KeyedFragment> fragments, const OutputConfig& config, bool strict) {
        if (strict) {
            std::vector<std::pair<std::string, std::size_t>> missing;
            for (const auto& f : fragments) {
                if (f.unresolved) {
                    missing.emplace_back(f.key.file, f.key.index);
                }
            }
            if (!missing.empty()) {
                throw UnresolvedManualLine(std::move(missing));
            }
        }

        std::string out;
        out += config.class_options.empty()
                   ? fmt::format("\\documentclass{{{}}}\n", config.document_class)
                   : fmt::format("\\documentclass[{}]{{{}}}\n", config.class_options, config.document_class);
        for (const auto& p : config.packages) {
            out += usepackage(p) + "\n";
        }
        for (const auto& l : config.extra_lines) {
            out += l + "\n";
        }
        out += "\\begin{document}\n";
        const std::string* file = nullptr;
        for (const auto& f : fragments) {
            if (file && *file != f.key.file) {
                out += "\n";
            }
            file = &f.key.file;
            if (f.unresolved && f.fragment.content.empty()) {
                out += unresolved_placeholder(f.key.index);
            }
            else {
                out += render_fragment(f.fragment, config.translator);
            }
            out += "\n";
        }
        out += "\\end{document}\n";
        return out;
    }

} // namespace chi2tex
