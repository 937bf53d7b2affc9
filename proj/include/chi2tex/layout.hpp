#pragma once

// Two-dimensional layout of a logical line: which off-baseline glyph runs
// attach to which base glyph. The classifier and the translator both read
// the same LayoutAnalysis, so an AUTO verdict and a successful translation
// rest on one definition of attachment.

#include "chi2tex/chi_reader.hpp"
#include "chi2tex/font_mapping.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace chi2tex {

    struct MappedCell {
        Cell cell;
        Symbol symbol;
    };

    using MappedGrid = std::vector<MappedCell>;

    MappedGrid map_grid(std::span<const Cell> cells, const FontTables& tables);

    /// Maximal run of horizontally consecutive cells on one off-baseline row.
    struct ScriptRun {
        int row = 0;
        int first_col = 0;
        int last_col = 0;
        std::vector<std::size_t> members;  // indices into the grid, by column
    };

    std::vector<ScriptRun> script_runs(const MappedGrid& grid);

    /// The attachment rule. A run's candidate anchors are the cells of its
    /// parent row (one step nearer the baseline) whose column lies in
    /// [first_col - 1, last_col]: the run's own span extended one column
    /// left, since scripts trail their base. A base also reaches over the
    /// columns of scripts already attached to it (`reach`, grid index to last
    /// column), so a superscript may follow a subscript as in x_i^2. Exactly
    /// one candidate attaches; zero or several make the run ambiguous.
    std::vector<std::size_t> anchor_candidates(const MappedGrid& grid, const ScriptRun& run,
                                               const std::map<std::size_t, int>& reach = {});

    struct TreeNode {
        MappedCell base;
        std::optional<Symbol> accent;  // recognized accent composite, e.g. \vec over the base
        std::vector<TreeNode> superscript;
        std::vector<TreeNode> subscript;
        int first_col = 0;  // column extent of the node including its scripts
        int last_col = 0;

        bool has_scripts() const noexcept { return !superscript.empty() || !subscript.empty(); }
    };

    struct TokenTree {
        std::vector<TreeNode> baseline;  // column order
    };

    struct LayoutIssue {
        int row = 0;
        int col = 0;
        std::size_t candidates = 0;
    };

    struct LayoutAnalysis {
        TokenTree tree;  // complete only when ambiguous_runs == 0
        std::size_t ambiguous_runs = 0;
        std::size_t unrecognized_composites = 0;
        std::optional<LayoutIssue> first_ambiguity;
        std::optional<LayoutIssue> first_composite;
        int min_row = 0;
        int max_row = 0;
    };

    LayoutAnalysis analyze_layout(const MappedGrid& grid);

    /// Strict form: throws AmbiguousAttachment or UnrecognizedComposite.
    TokenTree attach_scripts(const MappedGrid& grid);

} // namespace chi2tex
