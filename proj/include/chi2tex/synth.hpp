#pragma once

// Synthetic CHI-N manuscripts: ordinary prose-with-formula lines plus a
// controlled share of lines that need a human (deep scripts, unknown
// escapes, stray script runs, unconfigured fonts, bare accent pieces,
// unmapped Greek bytes).

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace chi2tex {

    struct SynthOptions {
        std::size_t lines = 10'000;
        double complex_share = 0.02;
        std::uint64_t seed = 1;
    };

    enum class Complexity : std::uint8_t {
        simple,
        deep_scripts,
        unknown_escape,
        detached_script,
        unconfigured_font,
        bare_accent,
        unmapped_greek,
    };

    struct SynthCorpus {
        std::string bytes;                  // complete document, `\+`-delimited
        std::vector<Complexity> kinds;      // per logical line
        std::size_t complex_lines = 0;
    };

    SynthCorpus synth_corpus(const SynthOptions& options);

    /// Content of one logical line built from random escapes and bytes.
    /// Never contains a line break, so it always stays one logical line.
    std::string fuzz_line(std::mt19937_64& rng);

    /// Wraps line contents into a document.
    std::string join_lines(const std::vector<std::string>& contents);

} // namespace chi2tex
