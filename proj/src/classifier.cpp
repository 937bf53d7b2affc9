#include "chi2tex/classifier.hpp"

#include "chi2tex/errors.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace chi2tex {

    Features extract_features(const LogicalLine& line, const MappedGrid& grid, const LayoutAnalysis& layout) {
        Features f;
        f.rows_above = -layout.min_row;
        f.rows_below = layout.max_row;
        for (const auto& mc : grid) {
            f.fonts_used.insert(mc.cell.font);
            if (mc.symbol.cls == SymbolClass::unknown) {
                ++f.unknown_cells;
            }
        }
        f.unknown_escapes = line.unknown_escapes();
        f.ambiguous_attachments = layout.ambiguous_runs;
        f.composite_glyphs_unrecognized = layout.unrecognized_composites;
        f.dropped_cells = line.dropped_cells();
        return f;
    }

    Features extract_features(const LogicalLine& line, const FontTables& tables) {
        const auto grid = map_grid(line.cells(), tables);
        return extract_features(line, grid, analyze_layout(grid));
    }

    Thresholds Thresholds::for_tables(const FontTables& tables) {
        Thresholds t;
        t.allowed_fonts.clear();
        for (int f = 0; f < font_slots; ++f) {
            if (tables.configured(f)) {
                t.allowed_fonts.insert(f);
            }
        }
        return t;
    }

    std::string_view to_string(Decision d) noexcept { return d == Decision::AUTO ? "AUTO" : "MANUAL"; }

    namespace {
        constexpr ReasonCode all_reasons[] = {
            ReasonCode::ROWS_ABOVE,           ReasonCode::ROWS_BELOW,
            ReasonCode::UNKNOWN_CELL,         ReasonCode::UNKNOWN_ESCAPE,
            ReasonCode::AMBIGUOUS_ATTACHMENT, ReasonCode::UNRECOGNIZED_COMPOSITE,
            ReasonCode::FONT_NOT_ALLOWED,     ReasonCode::GRID_OVERFLOW,
        };
    } // namespace

    std::string_view to_string(ReasonCode r) noexcept {
        switch (r) {
            case ReasonCode::ROWS_ABOVE: return "ROWS_ABOVE";
            case ReasonCode::ROWS_BELOW: return "ROWS_BELOW";
            case ReasonCode::UNKNOWN_CELL: return "UNKNOWN_CELL";
            case ReasonCode::UNKNOWN_ESCAPE: return "UNKNOWN_ESCAPE";
            case ReasonCode::AMBIGUOUS_ATTACHMENT: return "AMBIGUOUS_ATTACHMENT";
            case ReasonCode::UNRECOGNIZED_COMPOSITE: return "UNRECOGNIZED_COMPOSITE";
            case ReasonCode::FONT_NOT_ALLOWED: return "FONT_NOT_ALLOWED";
            case ReasonCode::GRID_OVERFLOW: return "GRID_OVERFLOW";
        }
        return "?";
    }

    std::optional<ReasonCode> parse_reason(std::string_view name) noexcept {
        for (const auto r : all_reasons) {
            if (to_string(r) == name) {
                return r;
            }
        }
        return std::nullopt;
    }

    bool reason_holds(ReasonCode reason, const Features& f, const Thresholds& t) {
        switch (reason) {
            case ReasonCode::ROWS_ABOVE: return f.rows_above > t.max_rows_above;
            case ReasonCode::ROWS_BELOW: return f.rows_below > t.max_rows_below;
            case ReasonCode::UNKNOWN_CELL: return f.unknown_cells > 0;
            case ReasonCode::UNKNOWN_ESCAPE: return f.unknown_escapes > 0 && !t.allow_unknown;
            case ReasonCode::AMBIGUOUS_ATTACHMENT: return f.ambiguous_attachments > 0;
            case ReasonCode::UNRECOGNIZED_COMPOSITE: return f.composite_glyphs_unrecognized > 0;
            case ReasonCode::FONT_NOT_ALLOWED:
                return !std::includes(t.allowed_fonts.begin(), t.allowed_fonts.end(), f.fonts_used.begin(),
                                      f.fonts_used.end());
            case ReasonCode::GRID_OVERFLOW: return f.dropped_cells > 0;
        }
        return false;
    }

    Verdict classify(const Features& f, const Thresholds& t) {
        Verdict v;
        for (const auto r : all_reasons) {
            if (reason_holds(r, f, t)) {
                v.reasons.push_back(r);
            }
        }
        v.decision = v.reasons.empty() ? Decision::AUTO : Decision::MANUAL;
        return v;
    }

    double percent_2dp(std::size_t part, std::size_t whole) noexcept {
        if (whole == 0) {
            return 0.0;
        }
        return std::round(10000.0 * static_cast<double>(part) / static_cast<double>(whole)) / 100.0;
    }

    StatsReport corpus_stats(std::span<const ChiDocument> docs, const FontTables& tables, const Thresholds& t) {
        StatsReport report;
        for (const auto& doc : docs) {
            FileStats fs;
            fs.file = doc.source_path;
            for (const auto& line : doc.lines) {
                const auto verdict = classify(extract_features(line, tables), t);
                ++fs.total_lines;
                if (verdict.decision == Decision::AUTO) {
                    ++fs.auto_lines;
                }
                else {
                    ++fs.manual_lines;
                    for (const auto r : verdict.reasons) {
                        ++report.reasons[r];
                    }
                }
            }
            fs.manual_pct = percent_2dp(fs.manual_lines, fs.total_lines);
            report.total_lines += fs.total_lines;
            report.auto_lines += fs.auto_lines;
            report.manual_lines += fs.manual_lines;
            report.files.push_back(std::move(fs));
        }
        if (report.total_lines == 0) {
            throw EmptyCorpus();
        }
        report.manual_pct = percent_2dp(report.manual_lines, report.total_lines);
        return report;
    }

    std::string format_stats_table(const StatsReport& report) {
        std::size_t width = 5;
        for (const auto& f : report.files) {
            width = std::max(width, f.file.size());
        }
        std::string out = fmt::format("{:<{}}  {:>8}  {:>8}  {:>8}  {:>8}\n", "file", width, "lines", "auto",
                                      "manual", "manual%");
        for (const auto& f : report.files) {
            out += fmt::format("{:<{}}  {:>8}  {:>8}  {:>8}  {:>8.2f}\n", f.file, width, f.total_lines,
                               f.auto_lines, f.manual_lines, f.manual_pct);
        }
        out += fmt::format("{:-<{}}\n", "", width + 4 * 10);
        out += fmt::format("{:<{}}  {:>8}  {:>8}  {:>8}  {:>8.2f}\n", "total", width, report.total_lines,
                           report.auto_lines, report.manual_lines, report.manual_pct);
        if (!report.reasons.empty()) {
            out += "\nreasons:\n";
            for (const auto& [reason, count] : report.reasons) {
                out += fmt::format("  {:<24}{:>8}\n", to_string(reason), count);
            }
        }
        return out;
    }

    std::string format_stats_json(const StatsReport& report) {
        nlohmann::ordered_json j;
        j["total_lines"] = report.total_lines;
        j["auto"] = report.auto_lines;
        j["manual"] = report.manual_lines;
        j["manual_pct"] = report.manual_pct;
        auto reasons = nlohmann::ordered_json::object();
        for (const auto& [reason, count] : report.reasons) {
            reasons[std::string(to_string(reason))] = count;
        }
        j["reasons"] = std::move(reasons);
        auto files = nlohmann::ordered_json::array();
        for (const auto& f : report.files) {
            files.push_back({{"file", f.file},
                             {"total_lines", f.total_lines},
                             {"auto", f.auto_lines},
                             {"manual", f.manual_lines},
                             {"manual_pct", f.manual_pct}});
        }
        j["files"] = std::move(files);
        return j.dump(2) + "\n";
    }

} // namespace chi2tex
