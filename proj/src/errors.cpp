#include "chi2tex/errors.hpp"

#include <fmt/format.h>

namespace chi2tex {

    TruncatedEscape::TruncatedEscape(std::size_t offset)
        : Error(fmt::format("truncated escape: lone backslash at byte {}", offset)), offset_(offset) {}

    RowOutOfRange::RowOutOfRange(int row, int max_rows, std::size_t offset)
        : Error(fmt::format("row offset {} exceeds limit {} at byte {}", row, max_rows, offset)),
          row_(row),
          offset_(offset) {}

    ConfigParseError::ConfigParseError(std::size_t line, const std::string& what)
        : Error(fmt::format("config line {}: {}", line, what)), line_(line) {}

    DuplicateOverride::DuplicateOverride(std::size_t line, int font, std::uint8_t code)
        : Error(fmt::format("config line {}: duplicate override for font {} byte 0x{:02X}", line, font, code)),
          line_(line),
          font_(font),
          code_(code) {}

    AmbiguousAttachment::AmbiguousAttachment(int row, int first_col, std::size_t candidates)
        : Error(fmt::format("script run at row {} col {} has {} anchor candidates", row, first_col, candidates)),
          row_(row),
          first_col_(first_col),
          candidates_(candidates) {}

    UnrecognizedComposite::UnrecognizedComposite(int row, int col)
        : Error(fmt::format("unrecognized composite glyph at row {} col {}", row, col)) {}

    UnknownSymbol::UnknownSymbol(int font, std::uint8_t code, int row, int col)
        : Error(fmt::format("unknown symbol font {} byte 0x{:02X} at row {} col {}", font, code, row, col)) {}

    NotAuto::NotAuto(std::size_t index)
        : Error(fmt::format("line {} is classified MANUAL and cannot be translated automatically", index)) {}

    namespace {
        std::string describe_unresolved(const std::vector<std::pair<std::string, std::size_t>>& lines) {
            std::string out = "unresolved MANUAL lines:";
            for (const auto& [file, index] : lines) {
                out += fmt::format(" {}:{}", file, index);
            }
            return out;
        }
    } // namespace

    UnresolvedManualLine::UnresolvedManualLine(std::vector<std::pair<std::string, std::size_t>> lines)
        : Error(describe_unresolved(lines)), lines_(std::move(lines)) {}

    SidecarSyntax::SidecarSyntax(std::size_t line, const std::string& what)
        : Error(fmt::format("sidecar line {}: {}", line, what)), line_(line) {}

    DuplicateKey::DuplicateKey(std::string file, std::size_t index)
        : Error(fmt::format("duplicate resolution for {}:{}", file, index)), file_(std::move(file)), index_(index) {}

    CrcMismatch::CrcMismatch(std::string file, std::size_t index, std::uint32_t expected, std::uint32_t found)
        : Error(fmt::format("crc mismatch for {}:{}: resolution has 0x{:08X}, source has 0x{:08X}",
                            file, index, expected, found)),
          file_(std::move(file)),
          index_(index),
          expected_(expected),
          found_(found) {}

    RuleSyntax::RuleSyntax(std::size_t line, const std::string& what)
        : Error(fmt::format("rules line {}: {}", line, what)), line_(line) {}

    BadPattern::BadPattern(std::size_t line, const std::string& what)
        : Error(fmt::format("rules line {}: bad pattern: {}", line, what)), line_(line) {}

} // namespace chi2tex
