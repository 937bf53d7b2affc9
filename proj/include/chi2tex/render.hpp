#pragma once

#include "chi2tex/chi_reader.hpp"
#include "chi2tex/font_mapping.hpp"
#include "chi2tex/layout.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace chi2tex {

    enum class RenderFormat { ansi, html, json };

    std::optional<RenderFormat> parse_render_format(std::string_view name) noexcept;

    /// {"cells":[{"row","col","font","class","unicode"}]} sorted by row, then column.
    nlohmann::ordered_json grid_json(const MappedGrid& grid);

    /// Glyphs at their grid positions, one text row per grid row from the
    /// topmost to the bottommost occupied row. An empty grid renders as ""
    /// (ansi, html) or {"cells":[]} (json).
    std::string render_grid(const MappedGrid& grid, RenderFormat format);
    std::string render_grid(const LogicalLine& line, const FontTables& tables, RenderFormat format);

    /// Baseline glyphs as plain text, cut to `max_code_points`.
    std::string baseline_preview(const MappedGrid& grid, std::size_t max_code_points = 80);

} // namespace chi2tex
