#pragma once

#include "chi2tex/chi_reader.hpp"
#include "chi2tex/font_mapping.hpp"
#include "chi2tex/layout.hpp"

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chi2tex {

    struct Features {
        int rows_above = 0;
        int rows_below = 0;
        std::size_t unknown_cells = 0;
        std::size_t unknown_escapes = 0;
        std::size_t ambiguous_attachments = 0;
        std::size_t composite_glyphs_unrecognized = 0;
        std::size_t dropped_cells = 0;  // glyphs beyond the reader's row limit
        std::set<int> fonts_used;

        bool operator==(const Features&) const = default;
    };

    Features extract_features(const LogicalLine& line, const MappedGrid& grid, const LayoutAnalysis& layout);
    Features extract_features(const LogicalLine& line, const FontTables& tables);

    struct Thresholds {
        int max_rows_above = 1;
        int max_rows_below = 1;
        bool allow_unknown = false;  // tolerates unknown escapes; unknown cells stay MANUAL
        std::set<int> allowed_fonts{0, 1, 3, 5, 7};

        /// Allowed fonts = the slots `tables` configures.
        static Thresholds for_tables(const FontTables& tables);
    };

    enum class Decision { AUTO, MANUAL };

    std::string_view to_string(Decision d) noexcept;

    enum class ReasonCode {
        ROWS_ABOVE,
        ROWS_BELOW,
        UNKNOWN_CELL,
        UNKNOWN_ESCAPE,
        AMBIGUOUS_ATTACHMENT,
        UNRECOGNIZED_COMPOSITE,
        FONT_NOT_ALLOWED,
        GRID_OVERFLOW,
    };

    std::string_view to_string(ReasonCode r) noexcept;
    std::optional<ReasonCode> parse_reason(std::string_view name) noexcept;

    struct Verdict {
        Decision decision = Decision::AUTO;
        std::vector<ReasonCode> reasons;  // non-empty iff MANUAL

        bool operator==(const Verdict&) const = default;
    };

    Verdict classify(const Features& f, const Thresholds& t);

    /// True if `reason` is confirmed by `f` under `t`.
    bool reason_holds(ReasonCode reason, const Features& f, const Thresholds& t);

    struct FileStats {
        std::string file;
        std::size_t total_lines = 0;
        std::size_t auto_lines = 0;
        std::size_t manual_lines = 0;
        double manual_pct = 0.0;
    };

    struct StatsReport {
        std::size_t total_lines = 0;
        std::size_t auto_lines = 0;
        std::size_t manual_lines = 0;
        double manual_pct = 0.0;  // percent, rounded to 2 decimals
        std::map<ReasonCode, std::size_t> reasons;
        std::vector<FileStats> files;
    };

    /// Throws EmptyCorpus when the documents hold no lines at all.
    StatsReport corpus_stats(std::span<const ChiDocument> docs, const FontTables& tables, const Thresholds& t);

    double percent_2dp(std::size_t part, std::size_t whole) noexcept;

    std::string format_stats_table(const StatsReport& report);
    std::string format_stats_json(const StatsReport& report);

} // namespace chi2tex
