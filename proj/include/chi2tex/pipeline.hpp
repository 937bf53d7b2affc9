#pragma once

#include "chi2tex/chi_reader.hpp"
#include "chi2tex/classifier.hpp"
#include "chi2tex/font_mapping.hpp"
#include "chi2tex/merge_store.hpp"
#include "chi2tex/postprocess.hpp"
#include "chi2tex/translator.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chi2tex {

    /// Paths given on the command line. Missing ones fall back to
    /// fonts.conf, rules.conf and preamble.conf in $CHI2TEX_CONFIG_DIR.
    struct RunConfig {
        std::optional<std::string> fonts_path;
        std::optional<std::string> rules_path;
        std::optional<std::string> preamble_path;
        std::optional<int> max_rows;  // classifier limit above and below the baseline
        bool allow_unknown = false;
    };

    struct LoadedConfig {
        FontTables tables = FontTables::builtin();
        Thresholds thresholds;
        std::vector<Rule> rules = builtin_rules();
        OutputConfig output;
    };

    /// Throws ConfigParseError, DuplicateOverride, RuleSyntax or std::system_error.
    LoadedConfig load_config(const RunConfig& run);

    /// Reads and parses one manuscript; throws std::system_error on I/O failure.
    ChiDocument load_document(const std::string& path);

    struct ConvertResult {
        std::string latex;
        MergeReport report;
        std::size_t total_lines = 0;
        std::size_t auto_lines = 0;
    };

    /// Translate, merge resolutions, assemble and post-process. Throws
    /// CrcMismatch, UnresolvedManualLine (strict) or BadPattern.
    ConvertResult convert(std::span<const ChiDocument> docs, const LoadedConfig& config, const Sidecar& sidecar,
                          MergeMode mode);

    /// Sidecar at `path`, or an empty one when the file does not exist.
    Sidecar load_sidecar(const std::string& path);

} // namespace chi2tex
