#pragma once

#include "chi2tex/chi_reader.hpp"
#include "chi2tex/classifier.hpp"
#include "chi2tex/font_mapping.hpp"
#include "chi2tex/layout.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chi2tex {

    enum class FragmentMode { text, display };

    struct LatexFragment {
        FragmentMode mode = FragmentMode::text;
        std::optional<std::string> tag;  // display only
        std::string content;

        bool operator==(const LatexFragment&) const = default;
    };

    struct TranslatorOptions {
        double display_math_share = 0.6;  // share of math glyphs among letter glyphs
        int tag_font = 1;                 // font of the trailing "(N)" equation number
        bool pad_inline_math = true;      // " $x$ " rather than "$x$"
        bool fence_displays = true;       // "%%" lines around equation environments
    };

    /// Equation number of a display line: the line must end in a "(digits)"
    /// group in the tag font and be mostly math. Returns the digits.
    std::optional<std::string> detect_display(const MappedGrid& grid, const TranslatorOptions& options = {});

    /// Transduces a mapped grid without consulting the classifier. Throws
    /// UnknownSymbol, AmbiguousAttachment or UnrecognizedComposite.
    LatexFragment translate_grid(const MappedGrid& grid, const TranslatorOptions& options = {});

    /// Translates an AUTO line. Throws NotAuto for a MANUAL line.
    LatexFragment translate_line(const LogicalLine& line, const FontTables& tables, const Thresholds& thresholds = {},
                                 const TranslatorOptions& options = {});

    /// Best-effort translation of any line, for reviewer hints.
    std::optional<LatexFragment> auto_attempt(const LogicalLine& line, const FontTables& tables,
                                              const TranslatorOptions& options = {});

    /// Body text of one fragment; displays become fenced equation* blocks.
    std::string render_fragment(const LatexFragment& fragment, const TranslatorOptions& options = {});

    struct LineKey {
        std::string file;
        std::size_t index = 0;

        auto operator<=>(const LineKey&) const = default;
    };

    struct KeyedFragment {
        LineKey key;
        std::uint32_t crc = 0;
        Verdict verdict;
        LatexFragment fragment;
        bool unresolved = false;  // MANUAL with no accepted resolution yet

        bool operator==(const KeyedFragment&) const = default;
    };

    /// One fragment per line: AUTO lines translated, MANUAL lines unresolved.
    std::vector<KeyedFragment> translate_document(const ChiDocument& doc, const FontTables& tables,
                                                  const Thresholds& thresholds, const TranslatorOptions& options = {});

    struct OutputConfig {
        std::string document_class = "article";
        std::string class_options = "a4paper,12pt";
        std::vector<std::string> packages{"[T2A]{fontenc}", "[utf8]{inputenc}", "[russian]{babel}", "amsmath",
                                          "amssymb"};
        std::vector<std::string> extra_lines;
        TranslatorOptions translator;
    };

    /// Line-oriented `key = value` file. Keys: class, options, package
    /// (repeatable; the first occurrence replaces the default list), line
    /// (repeatable preamble line), fence_displays, pad_inline_math,
    /// display_math_share. amsmath and amssymb are always loaded.
    OutputConfig parse_output_config(std::optional<std::string_view> text);

    std::string unresolved_placeholder(std::size_t index);

    /// Full standalone document. Throws UnresolvedManualLine when `strict`
    /// and any fragment is unresolved.
    std::string assemble_document(std::span<const KeyedFragment> fragments, const OutputConfig& config, bool strict);

} // namespace chi2tex
