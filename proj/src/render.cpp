#include "chi2tex/render.hpp"

#include <algorithm>
#include <map>

namespace chi2tex {

    std::optional<RenderFormat> parse_render_format(std::string_view name) noexcept {
        if (name == "ansi") {
            return RenderFormat::ansi;
        }
        if (name == "html") {
            return RenderFormat::html;
        }
        if (name == "json") {
            return RenderFormat::json;
        }
        return std::nullopt;
    }

    namespace {

        std::vector<const MappedCell*> sorted(const MappedGrid& grid) {
            std::vector<const MappedCell*> out;
            out.reserve(grid.size());
            for (const auto& mc : grid) {
                out.push_back(&mc);
            }
            std::stable_sort(out.begin(), out.end(), [](const MappedCell* a, const MappedCell* b) {
                return a->cell.row != b->cell.row ? a->cell.row < b->cell.row : a->cell.col < b->cell.col;
            });
            return out;
        }

        std::string shown(const MappedCell& mc) {
            if (!mc.symbol.unicode.empty()) {
                return mc.symbol.unicode;
            }
            const auto b = static_cast<char>(mc.cell.code);
            return (mc.cell.code >= 0x20 && mc.cell.code < 0x7F) ? std::string(1, b) : std::string("\xEF\xBF\xBD");
        }

        std::string_view ansi_color(SymbolClass cls) noexcept {
            switch (cls) {
                case SymbolClass::math_latin: return "\x1b[36m";
                case SymbolClass::greek: return "\x1b[35m";
                case SymbolClass::operator_symbol: return "\x1b[33m";
                case SymbolClass::accent_piece: return "\x1b[34m";
                case SymbolClass::unknown: return "\x1b[41m";
                default: return "";
            }
        }

        std::string html_escape(std::string_view s) {
            std::string out;
            for (const char c : s) {
                switch (c) {
                    case '<': out += "&lt;"; break;
                    case '>': out += "&gt;"; break;
                    case '&': out += "&amp;"; break;
                    case '"': out += "&quot;"; break;
                    default: out += c;
                }
            }
            return out;
        }

        template <typename CellFn>
        std::string rows(const MappedGrid& grid, CellFn&& cell_text, std::string_view row_sep) {
            std::map<int, std::vector<const MappedCell*>> by_row;
            for (const auto* mc : sorted(grid)) {
                by_row[mc->cell.row].push_back(mc);
            }
            std::string out;
            const int top = by_row.begin()->first;
            const int bottom = by_row.rbegin()->first;
            for (int r = top; r <= bottom; ++r) {
                if (r != top) {
                    out += row_sep;
                }
                int col = 0;
                for (const auto* mc : by_row[r]) {
                    if (mc->cell.col < col) {
                        continue;  // overstrike: first glyph wins
                    }
                    out.append(static_cast<std::size_t>(mc->cell.col - col), ' ');
                    out += cell_text(*mc);
                    col = mc->cell.col + 1;
                }
            }
            return out;
        }

    } // namespace

    nlohmann::ordered_json grid_json(const MappedGrid& grid) {
        auto cells = nlohmann::ordered_json::array();
        for (const auto* mc : sorted(grid)) {
            cells.push_back({{"row", mc->cell.row},
                             {"col", mc->cell.col},
                             {"font", mc->cell.font},
                             {"class", std::string(to_string(mc->symbol.cls))},
                             {"unicode", shown(*mc)}});
        }
        nlohmann::ordered_json j;
        j["cells"] = std::move(cells);
        return j;
    }

    std::string render_grid(const MappedGrid& grid, RenderFormat format) {
        if (format == RenderFormat::json) {
            return grid_json(grid).dump() + "\n";
        }
        if (grid.empty()) {
            return "";
        }
        if (format == RenderFormat::ansi) {
            return rows(
                       grid,
                       [](const MappedCell& mc) {
                           const auto color = ansi_color(mc.symbol.cls);
                           return color.empty() ? shown(mc) : std::string(color) + shown(mc) + "\x1b[0m";
                       },
                       "\n") +
                   "\n";
        }
        return "<pre class=\"chi-grid\">" +
               rows(
                   grid,
                   [](const MappedCell& mc) {
                       return "<span class=\"" + std::string(to_string(mc.symbol.cls)) + "\">" +
                              html_escape(shown(mc)) + "</span>";
                   },
                   "\n") +
               "</pre>\n";
    }

    std::string baseline_preview(const MappedGrid& grid, std::size_t max_code_points) {
        std::string out;
        std::size_t count = 0;
        int col = 0;
        for (const auto* mc : sorted(grid)) {
            if (mc->cell.row != 0 || mc->cell.col < col) {
                continue;
            }
            const std::size_t pad = mc->cell.col > col && count > 0 ? 1 : 0;
            if (count + pad + 1 > max_code_points) {
                out += "\xE2\x80\xA6";
                break;
            }
            out.append(pad, ' ');
            out += shown(*mc);
            count += pad + 1;
            col = mc->cell.col + 1;
        }
        return out;
    }

    std::string render_grid(const LogicalLine& line, const FontTables& tables, RenderFormat format) {
        return render_grid(map_grid(line.cells(), tables), format);
    }

} // namespace chi2tex
