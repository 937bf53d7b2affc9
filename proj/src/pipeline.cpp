#include "chi2tex/pipeline.hpp"

#include "chi2tex/text_util.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>

namespace chi2tex {

    namespace {

        std::optional<std::string> resolve(const std::optional<std::string>& given, const char* file_name) {
            if (given) {
                return given;
            }
            const char* dir = std::getenv("CHI2TEX_CONFIG_DIR");
            if (!dir || !*dir) {
                return std::nullopt;
            }
            const auto candidate = std::filesystem::path(dir) / file_name;
            if (std::filesystem::is_regular_file(candidate)) {
                return candidate.string();
            }
            return std::nullopt;
        }

    } // namespace

    LoadedConfig load_config(const RunConfig& run) {
        LoadedConfig cfg;
        if (const auto fonts = resolve(run.fonts_path, "fonts.conf")) {
            cfg.tables = load_tables(read_file(*fonts));
        }
        cfg.thresholds = Thresholds::for_tables(cfg.tables);
        if (run.max_rows) {
            cfg.thresholds.max_rows_above = *run.max_rows;
            cfg.thresholds.max_rows_below = *run.max_rows;
        }
        cfg.thresholds.allow_unknown = run.allow_unknown;
        if (const auto rules = resolve(run.rules_path, "rules.conf")) {
            auto extra = parse_rules(read_file(*rules));
            cfg.rules.insert(cfg.rules.end(), extra.begin(), extra.end());
        }
        if (const auto preamble = resolve(run.preamble_path, "preamble.conf")) {
            cfg.output = parse_output_config(read_file(*preamble));
        }
        return cfg;
    }

    ChiDocument load_document(const std::string& path) { return parse_document(read_file(path), path); }

    Sidecar load_sidecar(const std::string& path) {
        if (!std::filesystem::exists(path)) {
            return {};
        }
        return parse_sidecar(read_file(path));
    }

    ConvertResult convert(std::span<const ChiDocument> docs, const LoadedConfig& config, const Sidecar& sidecar,
                          MergeMode mode) {
        std::vector<KeyedFragment> fragments;
        for (const auto& doc : docs) {
            auto part = translate_document(doc, config.tables, config.thresholds, config.output.translator);
            fragments.insert(fragments.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
        }
        ConvertResult result;
        result.total_lines = fragments.size();
        result.auto_lines = static_cast<std::size_t>(std::count_if(
            fragments.begin(), fragments.end(), [](const KeyedFragment& f) { return f.verdict.decision == Decision::AUTO; }));
        result.report = merge_resolutions(fragments, sidecar, mode);
        const Postprocessor post(config.rules);
        result.latex = post.apply(assemble_document(fragments, config.output, false));
        return result;
    }

} // namespace chi2tex
