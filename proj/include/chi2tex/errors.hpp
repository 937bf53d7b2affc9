#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chi2tex {

    class Error : public std::runtime_error {
    public:
        using std::runtime_error::runtime_error;
    };

    // chi_reader

    class TruncatedEscape : public Error {
    public:
        explicit TruncatedEscape(std::size_t offset);
        std::size_t offset() const noexcept { return offset_; }

    private:
        std::size_t offset_;
    };

    class RowOutOfRange : public Error {
    public:
        RowOutOfRange(int row, int max_rows, std::size_t offset);
        int row() const noexcept { return row_; }
        std::size_t offset() const noexcept { return offset_; }

    private:
        int row_;
        std::size_t offset_;
    };

    // font_mapping, preamble

    class ConfigParseError : public Error {
    public:
        ConfigParseError(std::size_t line, const std::string& what);
        std::size_t line() const noexcept { return line_; }

    private:
        std::size_t line_;
    };

    class DuplicateOverride : public Error {
    public:
        DuplicateOverride(std::size_t line, int font, std::uint8_t code);
        std::size_t line() const noexcept { return line_; }
        int font() const noexcept { return font_; }
        std::uint8_t code() const noexcept { return code_; }

    private:
        std::size_t line_;
        int font_;
        std::uint8_t code_;
    };

    // classifier

    class EmptyCorpus : public Error {
    public:
        EmptyCorpus() : Error("corpus contains no logical lines") {}
    };

    // translator

    class AmbiguousAttachment : public Error {
    public:
        AmbiguousAttachment(int row, int first_col, std::size_t candidates);
        int row() const noexcept { return row_; }
        int first_col() const noexcept { return first_col_; }
        std::size_t candidates() const noexcept { return candidates_; }

    private:
        int row_;
        int first_col_;
        std::size_t candidates_;
    };

    class UnrecognizedComposite : public Error {
    public:
        UnrecognizedComposite(int row, int col);
    };

    class UnknownSymbol : public Error {
    public:
        UnknownSymbol(int font, std::uint8_t code, int row, int col);
    };

    class NotAuto : public Error {
    public:
        explicit NotAuto(std::size_t index);
    };

    class UnresolvedManualLine : public Error {
    public:
        explicit UnresolvedManualLine(std::vector<std::pair<std::string, std::size_t>> lines);
        const std::vector<std::pair<std::string, std::size_t>>& lines() const noexcept { return lines_; }

    private:
        std::vector<std::pair<std::string, std::size_t>> lines_;
    };

    // merge_store

    class SidecarSyntax : public Error {
    public:
        SidecarSyntax(std::size_t line, const std::string& what);
        std::size_t line() const noexcept { return line_; }

    private:
        std::size_t line_;
    };

    class DuplicateKey : public Error {
    public:
        DuplicateKey(std::string file, std::size_t index);
        const std::string& file() const noexcept { return file_; }
        std::size_t index() const noexcept { return index_; }

    private:
        std::string file_;
        std::size_t index_;
    };

    class CrcMismatch : public Error {
    public:
        CrcMismatch(std::string file, std::size_t index, std::uint32_t expected, std::uint32_t found);
        const std::string& file() const noexcept { return file_; }
        std::size_t index() const noexcept { return index_; }
        std::uint32_t expected() const noexcept { return expected_; }
        std::uint32_t found() const noexcept { return found_; }

    private:
        std::string file_;
        std::size_t index_;
        std::uint32_t expected_;
        std::uint32_t found_;
    };

    // postprocess

    class RuleSyntax : public Error {
    public:
        RuleSyntax(std::size_t line, const std::string& what);
        std::size_t line() const noexcept { return line_; }

    private:
        std::size_t line_;
    };

    class BadPattern : public Error {
    public:
        BadPattern(std::size_t line, const std::string& what);
        std::size_t line() const noexcept { return line_; }

    private:
        std::size_t line_;
    };

} // namespace chi2tex
