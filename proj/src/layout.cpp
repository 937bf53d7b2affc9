#include "chi2tex/layout.hpp"

#include "chi2tex/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>

namespace chi2tex {

    MappedGrid map_grid(std::span<const Cell> cells, const FontTables& tables) {
        MappedGrid grid;
        grid.reserve(cells.size());
        for (const auto& c : cells) {
            grid.push_back({c, map_cell(c, tables)});
        }
        return grid;
    }

    namespace {

        std::vector<std::size_t> sorted_indices(const MappedGrid& grid) {
            std::vector<std::size_t> order(grid.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const auto& ca = grid[a].cell;
                const auto& cb = grid[b].cell;
                return ca.row != cb.row ? ca.row < cb.row : ca.col < cb.col;
            });
            return order;
        }

        int parent_row(int row) noexcept { return row < 0 ? row + 1 : row - 1; }

    } // namespace

    std::vector<ScriptRun> script_runs(const MappedGrid& grid) {
        std::vector<ScriptRun> runs;
        for (const std::size_t i : sorted_indices(grid)) {
            const auto& c = grid[i].cell;
            if (c.row == 0) {
                continue;
            }
            if (!runs.empty() && runs.back().row == c.row && runs.back().last_col + 1 == c.col) {
                runs.back().last_col = c.col;
                runs.back().members.push_back(i);
                continue;
            }
            runs.push_back({c.row, c.col, c.col, {i}});
        }
        return runs;
    }

    std::vector<std::size_t> anchor_candidates(const MappedGrid& grid, const ScriptRun& run,
                                               const std::map<std::size_t, int>& reach) {
        const int parent = parent_row(run.row);
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto& c = grid[i].cell;
            if (c.row != parent || c.col > run.last_col) {
                continue;
            }
            const auto r = reach.find(i);
            const int extent = r == reach.end() ? c.col : r->second;
            if (extent >= run.first_col - 1) {
                out.push_back(i);
            }
        }
        std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) { return grid[a].cell.col < grid[b].cell.col; });
        return out;
    }

    namespace {

        struct Attachments {
            std::map<std::size_t, const ScriptRun*> super;
            std::map<std::size_t, const ScriptRun*> sub;
        };

        TreeNode build_node(const MappedGrid& grid, std::size_t index, const Attachments& att);

        std::vector<TreeNode> build_run(const MappedGrid& grid, const ScriptRun& run, const Attachments& att) {
            std::vector<TreeNode> nodes;
            nodes.reserve(run.members.size());
            for (const std::size_t m : run.members) {
                nodes.push_back(build_node(grid, m, att));
            }
            return nodes;
        }

        void widen(TreeNode& node, const std::vector<TreeNode>& children) {
            for (const auto& ch : children) {
                node.first_col = std::min(node.first_col, ch.first_col);
                node.last_col = std::max(node.last_col, ch.last_col);
            }
        }

        TreeNode build_node(const MappedGrid& grid, std::size_t index, const Attachments& att) {
            TreeNode node;
            node.base = grid[index];
            node.first_col = node.base.cell.col;
            node.last_col = node.base.cell.col;
            if (auto it = att.super.find(index); it != att.super.end()) {
                node.superscript = build_run(grid, *it->second, att);
                widen(node, node.superscript);
            }
            if (auto it = att.sub.find(index); it != att.sub.end()) {
                node.subscript = build_run(grid, *it->second, att);
                widen(node, node.subscript);
            }
            return node;
        }

        bool accent_base(SymbolClass cls) noexcept {
            return cls == SymbolClass::math_latin || cls == SymbolClass::greek;
        }

        // Folds single accent pieces above letters into the base; any other
        // accent piece is a composite this translator does not know.
        void recognize(TreeNode& node, LayoutAnalysis& out) {
            if (node.superscript.size() == 1) {
                const auto& piece = node.superscript.front();
                if (piece.base.symbol.cls == SymbolClass::accent_piece && !piece.has_scripts() && !piece.accent &&
                    accent_base(node.base.symbol.cls)) {
                    node.accent = piece.base.symbol;
                    node.superscript.clear();
                }
            }
            if (node.base.symbol.cls == SymbolClass::accent_piece) {
                ++out.unrecognized_composites;
                if (!out.first_composite) {
                    out.first_composite = LayoutIssue{node.base.cell.row, node.base.cell.col, 0};
                }
            }
            for (auto& ch : node.superscript) {
                recognize(ch, out);
            }
            for (auto& ch : node.subscript) {
                recognize(ch, out);
            }
        }

    } // namespace

    LayoutAnalysis analyze_layout(const MappedGrid& grid) {
        LayoutAnalysis out;
        for (const auto& mc : grid) {
            out.min_row = std::min(out.min_row, mc.cell.row);
            out.max_row = std::max(out.max_row, mc.cell.row);
        }

        // Inner rows first, left to right, so reach is known before it is needed.
        auto runs = script_runs(grid);
        std::stable_sort(runs.begin(), runs.end(), [](const ScriptRun& a, const ScriptRun& b) {
            return std::abs(a.row) != std::abs(b.row) ? std::abs(a.row) < std::abs(b.row) : a.first_col < b.first_col;
        });
        Attachments att;
        std::map<std::size_t, int> reach;
        for (const auto& run : runs) {
            const auto candidates = anchor_candidates(grid, run, reach);
            auto& slot = run.row < parent_row(run.row) ? att.super : att.sub;
            // A second run on the same side of one base has no single reading either.
            if (candidates.size() != 1 || slot.contains(candidates.front())) {
                ++out.ambiguous_runs;
                if (!out.first_ambiguity) {
                    out.first_ambiguity = LayoutIssue{run.row, run.first_col, candidates.size()};
                }
                continue;
            }
            slot[candidates.front()] = &run;
            auto& extent = reach.try_emplace(candidates.front(), grid[candidates.front()].cell.col).first->second;
            extent = std::max(extent, run.last_col);
        }

        for (const std::size_t i : sorted_indices(grid)) {
            if (grid[i].cell.row == 0) {
                out.tree.baseline.push_back(build_node(grid, i, att));
            }
        }
        for (auto& node : out.tree.baseline) {
            recognize(node, out);
        }
        return out;
    }

    TokenTree attach_scripts(const MappedGrid& grid) {
        auto analysis = analyze_layout(grid);
        if (analysis.first_ambiguity) {
            const auto& a = *analysis.first_ambiguity;
            throw AmbiguousAttachment(a.row, a.col, a.candidates);
        }
        if (analysis.first_composite) {
            const auto& c = *analysis.first_composite;
            throw UnrecognizedComposite(c.row, c.col);
        }
        return std::move(analysis.tree);
    }

} // namespace chi2tex
