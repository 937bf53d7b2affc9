#pragma once

// Sidecar resolution file. Plain text, one block per flagged line:
//
//     # chi2tex resolutions v1
//
//     [line]
//     file = thesis.chi
//     index = 4
//     crc = 0x1C291CA3
//     status = resolved
//     # reasons: ROWS_ABOVE
//     latex = <<<
//     ...
//     >>>
//
// `#` lines inside a block and unknown keys survive a read/write cycle.
// A heredoc may carry a tag (`<<<EOT` ... `EOT>>>`) when the body itself
// contains a bare `>>>` line.

#include "chi2tex/chi_reader.hpp"
#include "chi2tex/classifier.hpp"
#include "chi2tex/font_mapping.hpp"
#include "chi2tex/translator.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chi2tex {

    inline constexpr std::string_view sidecar_header = "# chi2tex resolutions v1";

    enum class ResolutionStatus { pending, resolved };

    std::string_view to_string(ResolutionStatus s) noexcept;

    struct Resolution {
        LineKey key;
        std::uint32_t crc = 0;
        ResolutionStatus status = ResolutionStatus::pending;
        std::optional<std::string> latex;
        bool override_auto = false;  // replace an AUTO line's translation too
        std::vector<std::string> comments;
        std::vector<std::pair<std::string, std::string>> extra;  // unknown keys, verbatim

        bool operator==(const Resolution&) const = default;
    };

    struct Sidecar {
        std::vector<Resolution> entries;

        const Resolution* find(const LineKey& key) const noexcept;
        Resolution* find(const LineKey& key) noexcept;

        bool operator==(const Sidecar&) const = default;
    };

    /// Throws SidecarSyntax or DuplicateKey.
    Sidecar parse_sidecar(std::string_view text);
    std::string write_sidecar(const Sidecar& sidecar);

    /// Pending entries for the MANUAL lines of `doc`, annotated with the
    /// verdict's reasons and the translator's best-effort attempt.
    std::vector<Resolution> export_flags(const ChiDocument& doc, const FontTables& tables,
                                         const Thresholds& thresholds, const TranslatorOptions& options = {});

    /// Folds freshly exported flags into an existing sidecar. Entries whose
    /// CRC still matches are kept untouched; stale ones revert to pending
    /// and keep their old LaTeX as comments. Entries for files outside
    /// `files` are kept as they are.
    Sidecar refresh_sidecar(Sidecar existing, std::span<const Resolution> fresh, std::span<const std::string> files);

    enum class MergeMode { strict, lenient };

    struct MergeReport {
        std::size_t applied = 0;
        std::size_t overrides = 0;
        std::size_t ignored_auto = 0;  // resolutions for AUTO lines without override
        std::vector<LineKey> unresolved;
        std::vector<LineKey> orphans;  // entries naming a line that no longer exists

        bool operator==(const MergeReport&) const = default;
    };

    /// Substitutes accepted resolutions into `fragments`. Throws CrcMismatch
    /// for a stale entry, and UnresolvedManualLine in strict mode when a
    /// MANUAL line has no resolved entry. In lenient mode such lines carry
    /// the unresolved placeholder. Applying the same sidecar twice yields
    /// the same fragments.
    MergeReport merge_resolutions(std::vector<KeyedFragment>& fragments, const Sidecar& sidecar, MergeMode mode);

} // namespace chi2tex
