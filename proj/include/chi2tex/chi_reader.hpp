#pragma once

// Reader for ChiWriter 3.x manuscripts in the reconstructed CHI-N byte grammar:
//
//   \+        logical-line delimiter (alone on its physical line)
//   \0 .. \9  font select, persists across logical lines
//   \^        cursor up one row
//   \,        cursor down one row
//   \<space>  hard space
//   \&        soft-wrap marker (no layout effect)
//   \X        anything else is an UnknownEscape, kept verbatim
//
// Bytes are never decoded here; a glyph's meaning depends on its font slot
// and is resolved by font_mapping.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chi2tex {

    enum class TokenKind : std::uint8_t {
        FontSelect,
        RowUp,
        RowDown,
        HardSpace,
        SoftWrapMark,
        UnknownEscape,
        Glyph,
        PlainSpace,
    };

    std::string_view to_string(TokenKind kind) noexcept;

    struct Token {
        TokenKind kind{};
        std::size_t offset{};  // byte index into the line's raw content
        std::size_t length{};  // bytes covered: 1, or 2 for escapes
        std::uint8_t value{};  // font digit, glyph byte, or the escaped byte

        bool operator==(const Token&) const = default;
    };

    /// Maps the byte after a backslash to its escape kind. Bytes without an
    /// entry lex as UnknownEscape. Reassigning an escape is a table edit.
    struct EscapeTable {
        std::array<std::optional<TokenKind>, 256> kinds{};

        static const EscapeTable& chi_n();
    };

    enum class LexMode {
        strict,   // trailing lone backslash throws TruncatedEscape
        lenient,  // trailing lone backslash becomes a 1-byte UnknownEscape
    };

    std::vector<Token> lex_content(std::string_view content,
                                   const EscapeTable& escapes = EscapeTable::chi_n(),
                                   LexMode mode = LexMode::strict);

    /// Concatenates the byte spans of `tokens`; the inverse of lex_content.
    std::string reserialize(std::span<const Token> tokens, std::string_view content);

    struct Cell {
        int row{};  // 0 = baseline, negative = above
        int col{};
        int font{};
        std::uint8_t code{};

        bool operator==(const Cell&) const = default;
    };

    inline constexpr int default_max_rows = 4;

    struct GridOptions {
        int initial_font = 5;
        int max_rows = default_max_rows;
    };

    /// Cursor interpretation of a token stream. Throws RowOutOfRange when a
    /// glyph would land beyond +-max_rows.
    std::vector<Cell> build_grid(std::span<const Token> tokens, const GridOptions& options = {});

    struct GridBuild {
        std::vector<Cell> cells;
        std::size_t dropped = 0;  // glyphs outside the row limit
        int final_font = 0;
    };

    /// Same cursor semantics, but glyphs beyond the row limit are dropped
    /// and counted instead of throwing.
    GridBuild build_grid_lenient(std::span<const Token> tokens, const GridOptions& options = {});

    /// CRC-32 (reflected, poly 0xEDB88320, init/xorout 0xFFFFFFFF).
    std::uint32_t line_crc(std::string_view raw) noexcept;

    class LogicalLine {
    public:
        LogicalLine(std::size_t index, std::string raw, std::vector<Token> tokens, GridBuild grid,
                    int initial_font);

        std::size_t index() const noexcept { return index_; }
        const std::string& raw() const noexcept { return raw_; }
        const std::vector<Token>& tokens() const noexcept { return tokens_; }
        const std::vector<Cell>& cells() const noexcept { return cells_; }
        std::uint32_t crc() const noexcept { return crc_; }
        int initial_font() const noexcept { return initial_font_; }
        int final_font() const noexcept { return final_font_; }
        std::size_t dropped_cells() const noexcept { return dropped_; }
        std::size_t unknown_escapes() const noexcept;

        bool operator==(const LogicalLine&) const = default;

    private:
        std::size_t index_;
        std::string raw_;
        std::vector<Token> tokens_;
        std::vector<Cell> cells_;
        std::uint32_t crc_;
        int initial_font_;
        int final_font_;
        std::size_t dropped_;
    };

    struct Warning {
        std::optional<std::size_t> line;  // empty for the pre-delimiter header
        std::string message;

        bool operator==(const Warning&) const = default;
    };

    struct ChiDocument {
        std::string source_path;
        std::vector<LogicalLine> lines;
        std::vector<Warning> warnings;

        bool operator==(const ChiDocument&) const = default;
    };

    struct ParseOptions {
        const EscapeTable* escapes = &EscapeTable::chi_n();
        int initial_font = 5;
        int max_rows = default_max_rows;
    };

    /// Splits at `\+` delimiter lines and builds one LogicalLine per chunk.
    /// Never throws on malformed content; problems become warnings.
    ChiDocument parse_document(std::string_view bytes, std::string source_path, const ParseOptions& options = {});

} // namespace chi2tex
