#include "chi2tex/chi_reader.hpp"

#include "chi2tex/errors.hpp"

#include <fmt/format.h>

#include <cstdlib>
#include <utility>

namespace chi2tex {

    std::string_view to_string(TokenKind kind) noexcept {
        switch (kind) {
            case TokenKind::FontSelect: return "FontSelect";
            case TokenKind::RowUp: return "RowUp";
            case TokenKind::RowDown: return "RowDown";
            case TokenKind::HardSpace: return "HardSpace";
            case TokenKind::SoftWrapMark: return "SoftWrapMark";
            case TokenKind::UnknownEscape: return "UnknownEscape";
            case TokenKind::Glyph: return "Glyph";
            case TokenKind::PlainSpace: return "PlainSpace";
        }
        return "?";
    }

    const EscapeTable& EscapeTable::chi_n() {
        static const EscapeTable table = [] {
            EscapeTable t;
            for (char d = '0'; d <= '9'; ++d) {
                t.kinds[static_cast<unsigned char>(d)] = TokenKind::FontSelect;
            }
            t.kinds['^'] = TokenKind::RowUp;
            t.kinds[','] = TokenKind::RowDown;
            t.kinds[' '] = TokenKind::HardSpace;
            t.kinds['&'] = TokenKind::SoftWrapMark;
            return t;
        }();
        return table;
    }

    namespace {

        bool is_plain_space(unsigned char c) noexcept { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

    } // namespace

    std::vector<Token> lex_content(std::string_view content, const EscapeTable& escapes, LexMode mode) {
        std::vector<Token> tokens;
        tokens.reserve(content.size());
        std::size_t pos = 0;
        while (pos < content.size()) {
            const auto c = static_cast<unsigned char>(content[pos]);
            if (c == '\\') {
                if (pos + 1 >= content.size()) {
                    if (mode == LexMode::strict) {
                        throw TruncatedEscape(pos);
                    }
                    tokens.push_back({TokenKind::UnknownEscape, pos, 1, 0});
                    ++pos;
                    continue;
                }
                const auto next = static_cast<unsigned char>(content[pos + 1]);
                const auto kind = escapes.kinds[next].value_or(TokenKind::UnknownEscape);
                std::uint8_t value = next;
                if (kind == TokenKind::FontSelect) {
                    value = static_cast<std::uint8_t>(next - '0');
                }
                tokens.push_back({kind, pos, 2, value});
                pos += 2;
                continue;
            }
            if (is_plain_space(c)) {
                tokens.push_back({TokenKind::PlainSpace, pos, 1, c});
            }
            else {
                tokens.push_back({TokenKind::Glyph, pos, 1, c});
            }
            ++pos;
        }
        return tokens;
    }

    std::string reserialize(std::span<const Token> tokens, std::string_view content) {
        std::string out;
        out.reserve(content.size());
        for (const auto& t : tokens) {
            out.append(content.substr(t.offset, t.length));
        }
        return out;
    }

    namespace {

        template <bool Strict>
        GridBuild interpret(std::span<const Token> tokens, const GridOptions& options) {
            GridBuild out;
            int row = 0;
            int col = 0;
            int font = options.initial_font;
            for (const auto& t : tokens) {
                switch (t.kind) {
                    case TokenKind::Glyph:
                        if (std::abs(row) > options.max_rows) {
                            if constexpr (Strict) {
                                throw RowOutOfRange(row, options.max_rows, t.offset);
                            }
                            ++out.dropped;
                        }
                        else {
                            out.cells.push_back({row, col, font, t.value});
                        }
                        ++col;
                        break;
                    case TokenKind::PlainSpace:
                    case TokenKind::HardSpace: ++col; break;
                    case TokenKind::RowUp: --row; break;
                    case TokenKind::RowDown: ++row; break;
                    case TokenKind::FontSelect: font = t.value; break;
                    case TokenKind::SoftWrapMark:
                    case TokenKind::UnknownEscape: break;
                }
            }
            out.final_font = font;
            return out;
        }

    } // namespace

    std::vector<Cell> build_grid(std::span<const Token> tokens, const GridOptions& options) {
        return interpret<true>(tokens, options).cells;
    }

    GridBuild build_grid_lenient(std::span<const Token> tokens, const GridOptions& options) {
        return interpret<false>(tokens, options);
    }

    namespace {

        constexpr std::array<std::uint32_t, 256> make_crc_table() {
            std::array<std::uint32_t, 256> table{};
            for (std::uint32_t i = 0; i < 256; ++i) {
                std::uint32_t c = i;
                for (int k = 0; k < 8; ++k) {
                    c = (c & 1U) ? (0xEDB88320U ^ (c >> 1)) : (c >> 1);
                }
                table[i] = c;
            }
            return table;
        }

        constexpr auto crc_table = make_crc_table();

    } // namespace

    std::uint32_t line_crc(std::string_view raw) noexcept {
        std::uint32_t crc = 0xFFFFFFFFU;
        for (const char ch : raw) {
            crc = crc_table[(crc ^ static_cast<unsigned char>(ch)) & 0xFFU] ^ (crc >> 8);
        }
        return crc ^ 0xFFFFFFFFU;
    }

    LogicalLine::LogicalLine(std::size_t index, std::string raw, std::vector<Token> tokens, GridBuild grid,
                             int initial_font)
        : index_(index),
          raw_(std::move(raw)),
          tokens_(std::move(tokens)),
          cells_(std::move(grid.cells)),
          crc_(line_crc(raw_)),
          initial_font_(initial_font),
          final_font_(grid.final_font),
          dropped_(grid.dropped) {}

    std::size_t LogicalLine::unknown_escapes() const noexcept {
        std::size_t n = 0;
        for (const auto& t : tokens_) {
            n += t.kind == TokenKind::UnknownEscape ? 1 : 0;
        }
        return n;
    }

    namespace {

        bool is_delimiter_line(std::string_view line) noexcept {
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
                line.remove_suffix(1);
            }
            return line == "\\+";
        }

        std::size_t strip_cr(std::string_view bytes, std::size_t begin, std::size_t end) noexcept {
            if (end > begin && bytes[end - 1] == '\r') {
                --end;
            }
            return end;
        }

    } // namespace

    ChiDocument parse_document(std::string_view bytes, std::string source_path, const ParseOptions& options) {
        ChiDocument doc;
        doc.source_path = std::move(source_path);

        int font = options.initial_font;
        const auto emit = [&](std::string_view raw) {
            const std::size_t index = doc.lines.size();
            auto tokens = lex_content(raw, *options.escapes, LexMode::lenient);
            if (!tokens.empty() && tokens.back().kind == TokenKind::UnknownEscape && tokens.back().length == 1) {
                doc.warnings.push_back({index, "line ends with a lone backslash"});
            }
            auto grid = build_grid_lenient(tokens, {font, options.max_rows});
            if (grid.dropped > 0) {
                doc.warnings.push_back(
                    {index, fmt::format("{} glyph(s) beyond row limit {} dropped", grid.dropped, options.max_rows)});
            }
            std::size_t unknown = 0;
            for (const auto& t : tokens) {
                unknown += t.kind == TokenKind::UnknownEscape ? 1 : 0;
            }
            if (unknown > 0) {
                doc.warnings.push_back({index, fmt::format("{} unknown escape(s)", unknown)});
            }
            const int initial = font;
            font = grid.final_font;
            doc.lines.emplace_back(index, std::string(raw), std::move(tokens), std::move(grid), initial);
        };

        bool seen_delimiter = false;
        std::size_t chunk_begin = 0;
        std::size_t chunk_end = 0;
        std::size_t pos = 0;
        while (pos < bytes.size()) {
            const std::size_t nl = bytes.find('\n', pos);
            const std::size_t line_end = nl == std::string_view::npos ? bytes.size() : nl;
            const std::size_t next = nl == std::string_view::npos ? bytes.size() : nl + 1;
            if (is_delimiter_line(bytes.substr(pos, line_end - pos))) {
                if (!seen_delimiter) {
                    if (pos > 0) {
                        doc.warnings.push_back(
                            {std::nullopt, fmt::format("header: {} byte(s) before first \\+ delimiter", pos)});
                    }
                    seen_delimiter = true;
                }
                else {
                    emit(bytes.substr(chunk_begin, chunk_end - chunk_begin));
                }
                chunk_begin = next;
                chunk_end = next;
            }
            else {
                chunk_end = strip_cr(bytes, pos, line_end);
            }
            pos = next;
        }

        if (!seen_delimiter) {
            if (!bytes.empty()) {
                doc.warnings.push_back(
                    {std::nullopt, fmt::format("header: {} byte(s) and no \\+ delimiter", bytes.size())});
            }
        }
        else {
            // An unterminated final chunk loses trailing line breaks; an empty one is not a line.
            while (chunk_end > chunk_begin && (bytes[chunk_end - 1] == '\n' || bytes[chunk_end - 1] == '\r')) {
                --chunk_end;
            }
            if (chunk_end > chunk_begin) {
                emit(bytes.substr(chunk_begin, chunk_end - chunk_begin));
            }
        }
        return doc;
    }

} // namespace chi2tex
