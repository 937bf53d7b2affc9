#include "chi2tex/font_mapping.hpp"

#include "chi2tex/errors.hpp"
#include "chi2tex/latex_check.hpp"
#include "chi2tex/text_util.hpp"

#include <fmt/format.h>

#include <charconv>
#include <map>
#include <set>
#include <utility>

namespace chi2tex {

    std::string_view to_string(SymbolClass cls) noexcept {
        switch (cls) {
            case SymbolClass::cyrillic: return "cyrillic";
            case SymbolClass::math_latin: return "math-latin";
            case SymbolClass::greek: return "greek";
            case SymbolClass::operator_symbol: return "operator";
            case SymbolClass::digit_punct: return "digit-punct";
            case SymbolClass::accent_piece: return "accent-piece";
            case SymbolClass::unknown: return "unknown";
        }
        return "unknown";
    }

    std::optional<SymbolClass> parse_symbol_class(std::string_view name) noexcept {
        for (auto cls : {SymbolClass::cyrillic, SymbolClass::math_latin, SymbolClass::greek,
                         SymbolClass::operator_symbol, SymbolClass::digit_punct, SymbolClass::accent_piece,
                         SymbolClass::unknown}) {
            if (to_string(cls) == name) {
                return cls;
            }
        }
        return std::nullopt;
    }

    bool is_math_class(SymbolClass cls) noexcept {
        return cls == SymbolClass::math_latin || cls == SymbolClass::greek || cls == SymbolClass::operator_symbol ||
               cls == SymbolClass::accent_piece;
    }

    std::string utf8_encode(char32_t cp) {
        std::string out;
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        }
        else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
        else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
        else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
        return out;
    }

    namespace {

        // ЙЦУКЕН keys. Row i of `keys` sits on the same physical key as row i
        // of `letters`; the upper half is the shifted layer.
        constexpr std::string_view jcuken_keys = "qwertyuiop[]asdfghjkl;'zxcvbnm,.`"
                                                 "QWERTYUIOP{}ASDFGHJKL:\"ZXCVBNM<>~";
        constexpr std::u32string_view jcuken_cyrillic = U"йцукенгшщзхъфывапролджэячсмитьбюё"
                                                        U"ЙЦУКЕНГШЩЗХЪФЫВАПРОЛДЖЭЯЧСМИТЬБЮЁ";
        static_assert(jcuken_keys.size() == 66);
        static_assert(jcuken_cyrillic.size() == 66);

        constexpr std::array<char32_t, 256> make_jcuken_table() {
            std::array<char32_t, 256> t{};
            for (std::size_t b = 0; b < 256; ++b) {
                t[b] = static_cast<char32_t>(b);
            }
            for (std::size_t i = 0; i < jcuken_keys.size(); ++i) {
                t[static_cast<unsigned char>(jcuken_keys[i])] = jcuken_cyrillic[i];
            }
            // Shifted digit row of the typewriter layer.
            t['^'] = U',';
            t['&'] = U'.';
            return t;
        }

        constexpr auto jcuken_table = make_jcuken_table();

    } // namespace

    char32_t jcuken_decode(std::uint8_t b) noexcept { return jcuken_table[b]; }

    std::optional<std::uint8_t> jcuken_encode(char32_t letter) noexcept {
        for (std::size_t i = 0; i < jcuken_cyrillic.size(); ++i) {
            if (jcuken_cyrillic[i] == letter) {
                return static_cast<std::uint8_t>(jcuken_keys[i]);
            }
        }
        return std::nullopt;
    }

    std::u32string_view jcuken_letters() noexcept { return jcuken_cyrillic; }

    namespace {

        bool is_ascii_letter(unsigned char c) noexcept { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

        // LaTeX for an ASCII punctuation or digit byte, valid in text and math
        // mode alike. Empty when the character has no safe single form.
        std::string punct_latex(char32_t c) {
            switch (c) {
                case U'#': return "\\#";
                case U'$': return "\\$";
                case U'%': return "\\%";
                case U'&': return "\\&";
                case U'_': return "\\_";
                case U'{': return "\\{";
                case U'}': return "\\}";
                case U'~':
                case U'^':
                case U'\\':
                case U'"':
                case U'`': return {};
                default: break;
            }
            if (c > 0x20 && c < 0x7F) {
                return std::string(1, static_cast<char>(c));
            }
            return {};
        }

        Symbol unknown_symbol(std::uint8_t code) {
            Symbol s;
            s.cls = SymbolClass::unknown;
            s.unicode = (code > 0x20 && code < 0x7F) ? std::string(1, static_cast<char>(code)) : utf8_encode(0xFFFD);
            return s;
        }

        Symbol punct_symbol(char32_t c, std::uint8_t code) {
            auto latex = punct_latex(c);
            if (latex.empty()) {
                return unknown_symbol(code);
            }
            return {SymbolClass::digit_punct, utf8_encode(c), std::move(latex)};
        }

        struct Entry {
            char key;
            char32_t unicode;
            std::string_view latex;
        };

        // Latin key -> Greek letter. Only r and v are attested in the
        // manuscripts; the rest is the usual phonetic assignment.
        constexpr Entry greek_entries[] = {
            {'a', U'α', "\\alpha"},   {'b', U'β', "\\beta"},       {'g', U'γ', "\\gamma"},   {'d', U'δ', "\\delta"},
            {'e', U'ε', "\\varepsilon"}, {'z', U'ζ', "\\zeta"},    {'h', U'η', "\\eta"},     {'q', U'θ', "\\theta"},
            {'i', U'ι', "\\iota"},    {'k', U'κ', "\\kappa"},      {'l', U'λ', "\\lambda"},  {'m', U'μ', "\\mu"},
            {'n', U'ν', "\\nu"},      {'x', U'ξ', "\\xi"},         {'o', U'ο', "o"},         {'p', U'π', "\\pi"},
            {'r', U'ρ', "\\rho"},     {'s', U'σ', "\\sigma"},      {'t', U'τ', "\\tau"},     {'u', U'υ', "\\upsilon"},
            {'v', U'φ', "\\varphi"},  {'f', U'ϕ', "\\phi"},        {'c', U'χ', "\\chi"},     {'y', U'ψ', "\\psi"},
            {'w', U'ω', "\\omega"},   {'G', U'Γ', "\\Gamma"},      {'D', U'Δ', "\\Delta"},   {'Q', U'Θ', "\\Theta"},
            {'L', U'Λ', "\\Lambda"},  {'X', U'Ξ', "\\Xi"},         {'P', U'Π', "\\Pi"},      {'S', U'Σ', "\\Sigma"},
            {'U', U'Υ', "\\Upsilon"}, {'F', U'Φ', "\\Phi"},        {'Y', U'Ψ', "\\Psi"},     {'W', U'Ω', "\\Omega"},
        };

        constexpr Entry operator_entries[] = {
            {'I', U'∫', "\\int"},     {'J', U'∮', "\\oint"},   {'S', U'∑', "\\sum"},     {'P', U'∏', "\\prod"},
            {'N', U'∇', "\\nabla"},   {'d', U'∂', "\\partial"}, {'8', U'∞', "\\infty"},  {'.', U'·', "\\cdot"},
            {'x', U'×', "\\times"},   {'+', U'±', "\\pm"},     {'<', U'≤', "\\leq"},     {'>', U'≥', "\\geq"},
            {'#', U'≠', "\\neq"},     {'~', U'≈', "\\approx"}, {'=', U'≡', "\\equiv"},   {'e', U'∈', "\\in"},
            {'A', U'∀', "\\forall"},  {'E', U'∃', "\\exists"}, {'L', U'ℒ', "\\mathcal{L}"}, {'H', U'ℋ', "\\mathcal{H}"},
            {'h', U'ℏ', "\\hbar"},    {'r', U'→', "\\to"},
        };

        // Accent pieces sit one row above their base glyph.
        constexpr Entry accent_entries[] = {
            {'a', U'→', "\\vec"},
            {'b', U'¯', "\\bar"},
            {'-', U'─', "\\overline"},
        };

        std::array<Symbol, 256> generate(SymbolClass cls) {
            std::array<Symbol, 256> symbols;
            for (int b = 0; b < 256; ++b) {
                symbols[b] = unknown_symbol(static_cast<std::uint8_t>(b));
            }
            const auto put = [&](const Entry& e, SymbolClass c) {
                symbols[static_cast<unsigned char>(e.key)] = {c, utf8_encode(e.unicode), std::string(e.latex)};
            };
            switch (cls) {
                case SymbolClass::cyrillic:
                    for (int b = 0x21; b < 0x7F; ++b) {
                        const char32_t d = jcuken_decode(static_cast<std::uint8_t>(b));
                        if (d >= 0x400 && d <= 0x4FF) {
                            symbols[b] = {SymbolClass::cyrillic, utf8_encode(d), utf8_encode(d)};
                        }
                        else {
                            symbols[b] = punct_symbol(d, static_cast<std::uint8_t>(b));
                        }
                    }
                    break;
                case SymbolClass::math_latin:
                    for (int b = 0x21; b < 0x7F; ++b) {
                        const auto c = static_cast<unsigned char>(b);
                        if (is_ascii_letter(c)) {
                            symbols[b] = {SymbolClass::math_latin, std::string(1, c), std::string(1, c)};
                        }
                        else {
                            symbols[b] = punct_symbol(c, c);
                        }
                    }
                    break;
                case SymbolClass::digit_punct:
                    for (int b = 0x21; b < 0x7F; ++b) {
                        const auto c = static_cast<unsigned char>(b);
                        if (!is_ascii_letter(c)) {
                            symbols[b] = punct_symbol(c, c);
                        }
                    }
                    break;
                case SymbolClass::greek:
                    for (const auto& e : greek_entries) {
                        put(e, SymbolClass::greek);
                    }
                    break;
                case SymbolClass::operator_symbol:
                    for (const auto& e : operator_entries) {
                        put(e, SymbolClass::operator_symbol);
                    }
                    for (const auto& e : accent_entries) {
                        put(e, SymbolClass::accent_piece);
                    }
                    break;
                case SymbolClass::accent_piece:
                    for (const auto& e : accent_entries) {
                        put(e, SymbolClass::accent_piece);
                    }
                    break;
                case SymbolClass::unknown: break;
            }
            return symbols;
        }

    } // namespace

    FontTables::FontTables() {
        for (int f = 0; f < font_slots; ++f) {
            slots_[f].cls = SymbolClass::unknown;
            slots_[f].symbols = generate(SymbolClass::unknown);
        }
    }

    const FontTables& FontTables::builtin() {
        static const FontTables tables = [] {
            FontTables t;
            t.set_slot_class(0, SymbolClass::digit_punct);
            t.set_slot_class(1, SymbolClass::math_latin);
            t.set_slot_class(default_operator_font, SymbolClass::operator_symbol);
            t.set_slot_class(5, SymbolClass::cyrillic);
            t.set_slot_class(7, SymbolClass::greek);
            return t;
        }();
        return tables;
    }

    const Symbol& FontTables::lookup(int font, std::uint8_t code) const noexcept {
        if (font < 0 || font >= font_slots) {
            static const auto unknown = [] {
                std::array<Symbol, 256> s;
                for (int b = 0; b < 256; ++b) {
                    s[b] = unknown_symbol(static_cast<std::uint8_t>(b));
                }
                return s;
            }();
            return unknown[code];
        }
        return slots_[font].symbols[code];
    }

    SymbolClass FontTables::slot_class(int font) const noexcept {
        if (font < 0 || font >= font_slots) {
            return SymbolClass::unknown;
        }
        return slots_[font].cls;
    }

    void FontTables::set_slot_class(int font, SymbolClass cls) {
        auto& slot = slots_.at(static_cast<std::size_t>(font));
        slot.cls = cls;
        slot.symbols = generate(cls);
    }

    void FontTables::set_symbol(int font, std::uint8_t code, Symbol symbol) {
        auto& slot = slots_.at(static_cast<std::size_t>(font));
        if (symbol.cls == SymbolClass::unknown) {
            symbol.latex.clear();
        }
        slot.symbols[code] = std::move(symbol);
    }

    const Symbol& map_cell(const Cell& cell, const FontTables& tables) noexcept {
        return tables.lookup(cell.font, cell.code);
    }

    namespace {

        std::optional<std::uint8_t> parse_hex_byte(std::string_view s) {
            if (s.empty() || s.size() > 2) {
                return std::nullopt;
            }
            unsigned value = 0;
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value, 16);
            if (ec != std::errc{} || ptr != s.data() + s.size()) {
                return std::nullopt;
            }
            return static_cast<std::uint8_t>(value);
        }

        struct PendingMap {
            std::size_t line;
            std::string unicode;
            std::string latex;
        };

        struct Section {
            int font = -1;
            std::size_t line = 0;
            std::map<std::uint8_t, PendingMap> maps;
            std::map<std::uint8_t, std::pair<std::size_t, SymbolClass>> classes;
        };

        void apply_section(FontTables& tables, const Section& sec) {
            for (const auto& [code, entry] : sec.classes) {
                if (!sec.maps.contains(code)) {
                    Symbol s = tables.lookup(sec.font, code);
                    s.cls = entry.second;
                    if (s.cls != SymbolClass::unknown && s.latex.empty()) {
                        throw ConfigParseError(entry.first,
                                               fmt::format("byte 0x{:02X} has no latex; add a map entry", code));
                    }
                    tables.set_symbol(sec.font, code, std::move(s));
                }
            }
            for (const auto& [code, entry] : sec.maps) {
                SymbolClass cls = tables.slot_class(sec.font);
                if (auto it = sec.classes.find(code); it != sec.classes.end()) {
                    cls = it->second.second;
                }
                if (cls == SymbolClass::unknown) {
                    throw ConfigParseError(entry.line, fmt::format("font {} has no class for byte 0x{:02X}", sec.font,
                                                                   code));
                }
                if (cls == SymbolClass::greek || cls == SymbolClass::math_latin ||
                    cls == SymbolClass::operator_symbol) {
                    const bool single_ascii =
                        entry.latex.size() == 1 && static_cast<unsigned char>(entry.latex[0]) < 0x80;
                    if (!(entry.latex.front() == '\\' || single_ascii) || !braces_balanced(entry.latex)) {
                        throw ConfigParseError(entry.line, "latex is not a valid math-mode symbol");
                    }
                }
                tables.set_symbol(sec.font, code, {cls, entry.unicode, entry.latex});
            }
        }

    } // namespace

    FontTables load_tables(std::optional<std::string_view> config) {
        FontTables tables = FontTables::builtin();
        if (!config) {
            return tables;
        }
        tables.set_provenance(FontTables::Provenance::file);

        std::set<std::pair<int, std::string>> seen_keys;
        std::optional<Section> section;
        std::size_t line_no = 0;
        for (std::string_view line : split_lines(*config)) {
            ++line_no;
            line = trim(line);
            if (line.empty() || line.front() == '#' || line.front() == ';') {
                continue;
            }
            if (line.front() == '[') {
                if (line.back() != ']') {
                    throw ConfigParseError(line_no, "unterminated section header");
                }
                const auto name = line.substr(1, line.size() - 2);
                if (!name.starts_with("font.")) {
                    throw ConfigParseError(line_no, fmt::format("unknown section [{}]", name));
                }
                const auto digits = name.substr(5);
                int font = -1;
                auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), font);
                if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size() || font < 0 ||
                    font >= font_slots) {
                    throw ConfigParseError(line_no, fmt::format("font slot must be 0-9, got [{}]", name));
                }
                if (section) {
                    apply_section(tables, *section);
                }
                section = Section{font, line_no, {}, {}};
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ConfigParseError(line_no, "expected key = value");
            }
            if (!section) {
                throw ConfigParseError(line_no, "key outside of a [font.N] section");
            }
            const auto key = trim(line.substr(0, eq));
            const auto value = trim(line.substr(eq + 1));

            if (key == "class") {
                const auto cls = parse_symbol_class(value);
                if (!cls) {
                    throw ConfigParseError(line_no, fmt::format("unknown class '{}'", value));
                }
                if (!seen_keys.insert({section->font, "class"}).second) {
                    throw ConfigParseError(line_no, fmt::format("class set twice for font {}", section->font));
                }
                if (!section->maps.empty() || !section->classes.empty()) {
                    throw ConfigParseError(line_no, "class must precede map./class. overrides");
                }
                tables.set_slot_class(section->font, *cls);
                continue;
            }

            const bool is_map = key.starts_with("map.");
            const bool is_class = key.starts_with("class.");
            if (!is_map && !is_class) {
                throw ConfigParseError(line_no, fmt::format("unknown key '{}'", key));
            }
            const auto code = parse_hex_byte(key.substr(is_map ? 4 : 6));
            if (!code) {
                throw ConfigParseError(line_no, fmt::format("bad hex byte in '{}'", key));
            }
            if (!seen_keys.insert({section->font, fmt::format("{}{:02X}", is_map ? "map." : "class.", *code)})
                     .second) {
                throw DuplicateOverride(line_no, section->font, *code);
            }
            if (is_map) {
                const auto sp = value.find_first_of(" \t");
                if (sp == std::string_view::npos) {
                    throw ConfigParseError(line_no, "map value needs '<unicode> <latex>'");
                }
                const auto latex = trim(value.substr(sp + 1));
                section->maps[*code] = {line_no, std::string(value.substr(0, sp)), std::string(latex)};
            }
            else {
                const auto cls = parse_symbol_class(value);
                if (!cls) {
                    throw ConfigParseError(line_no, fmt::format("unknown class '{}'", value));
                }
                section->classes[*code] = {line_no, *cls};
            }
        }
        if (section) {
            apply_section(tables, *section);
        }
        return tables;
    }

} // namespace chi2tex
