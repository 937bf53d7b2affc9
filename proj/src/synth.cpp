#include "chi2tex/synth.hpp"

#include "chi2tex/font_mapping.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace chi2tex {

    namespace {

        using Rng = std::mt19937_64;

        std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

        bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

        std::string russian_word(Rng& rng) {
            const auto letters = jcuken_letters();
            const std::size_t lower = letters.size() / 2;
            std::string w;
            const std::size_t len = 2 + pick(rng, 8);
            for (std::size_t i = 0; i < len; ++i) {
                w += static_cast<char>(*jcuken_encode(letters[pick(rng, lower)]));
            }
            return w;
        }

        std::string latin_var(Rng& rng) {
            static constexpr std::string_view vars = "abcxyzABEFHJLMNPQRT";
            return std::string(1, vars[pick(rng, vars.size())]);
        }

        // A small formula switching to and from the math fonts, ending back in font 5.
        std::string formula(Rng& rng) {
            static constexpr std::string_view greek = "abgdeqlmprstvfyw";
            std::string f;
            switch (pick(rng, 6)) {
                case 0: f = "\\1" + latin_var(rng) + "\\^2\\,"; break;
                case 1: f = "\\1" + latin_var(rng) + "\\,i\\^"; break;
                case 2: f = "\\7" + std::string(1, greek[pick(rng, greek.size())]); break;
                case 3: f = "\\1" + latin_var(rng) + " = " + latin_var(rng) + " + 1"; break;
                case 4: f = "\\3I\\1 d\\^3\\,x"; break;
                default: f = "\\1(" + std::to_string(1 + pick(rng, 99)) + ")"; break;
            }
            return f + "\\5";
        }

        std::string simple_line(Rng& rng) {
            std::string s = "\\5";
            const std::size_t words = 3 + pick(rng, 8);
            for (std::size_t i = 0; i < words; ++i) {
                if (i > 0) {
                    s += ' ';
                }
                s += chance(rng, 0.25) ? formula(rng) : russian_word(rng);
            }
            if (chance(rng, 0.1)) {
                s += "\\&";
            }
            return s;
        }

        std::string complex_piece(Complexity kind, Rng& rng) {
            switch (kind) {
                case Complexity::deep_scripts: return "\\1e\\^x\\^2\\,\\,\\5";
                case Complexity::unknown_escape: return "\\#";
                case Complexity::detached_script: return "\\1" + latin_var(rng) + " \\^n\\,\\5";
                case Complexity::unconfigured_font: return "\\9q\\5";
                case Complexity::bare_accent: return "\\3-\\5";
                case Complexity::unmapped_greek: return "\\7j\\5";
                case Complexity::simple: break;
            }
            return {};
        }

        std::string complex_line(Complexity kind, Rng& rng) {
            auto s = simple_line(rng);
            s += ' ';
            s += complex_piece(kind, rng);
            s += ' ';
            s += russian_word(rng);
            return s;
        }

    } // namespace

    std::string join_lines(const std::vector<std::string>& contents) {
        std::string out = "\\+\n";
        for (const auto& c : contents) {
            out += c;
            out += "\n\\+\n";
        }
        return out;
    }

    SynthCorpus synth_corpus(const SynthOptions& options) {
        Rng rng(options.seed);
        SynthCorpus corpus;
        corpus.kinds.assign(options.lines, Complexity::simple);
        const auto target = static_cast<std::size_t>(std::llround(options.complex_share * static_cast<double>(options.lines)));
        corpus.complex_lines = std::min(target, options.lines);

        std::vector<std::size_t> order(options.lines);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t k = 0; k < corpus.complex_lines; ++k) {
            corpus.kinds[order[k]] = static_cast<Complexity>(1 + k % 6);
        }

        std::vector<std::string> contents;
        contents.reserve(options.lines);
        for (const auto kind : corpus.kinds) {
            contents.push_back(kind == Complexity::simple ? simple_line(rng) : complex_line(kind, rng));
        }
        corpus.bytes = join_lines(contents);
        return corpus;
    }

    std::string fuzz_line(Rng& rng) {
        // Raw mode draws any byte; the other mode stays in printable ASCII
        // and configured fonts, so more lines survive classification.
        static constexpr std::string_view raw_escapes = "0123456789^,^, &#*+x";
        static constexpr std::string_view tame_escapes = "01555^,^, &";
        static constexpr std::string_view tame_bytes =
            "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 +-=().,;:[]{}<>'\"`~!?";
        const bool raw = chance(rng, 0.3);
        const auto escapes = raw ? raw_escapes : tame_escapes;
        std::string s = raw ? "" : "\\5";
        const std::size_t len = pick(rng, 40);
        for (std::size_t i = 0; i < len; ++i) {
            if (chance(rng, raw ? 0.35 : 0.2)) {
                s += '\\';
                s += escapes[pick(rng, escapes.size())];
                continue;
            }
            char b = raw ? static_cast<char>(pick(rng, 256)) : tame_bytes[pick(rng, tame_bytes.size())];
            if (b == '\n' || b == '\r' || b == '\\') {
                b = ' ';
            }
            s += b;
        }
        // A lone \+ (trailing blanks allowed) would read as a delimiter.
        if (s.find_last_not_of(" \t") == 1 && s.starts_with("\\+")) {
            s.insert(s.begin(), 'x');
        }
        return s;
    }

} // namespace chi2tex
