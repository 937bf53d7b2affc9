// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "chi2tex/errors.hpp"
#include "chi2tex/latex_check.hpp"
#include "chi2tex/merge_store.hpp"
#include "chi2tex/pipeline.hpp"
#include "chi2tex/postprocess.hpp"
#include "chi2tex/review_server.hpp"
#include "chi2tex/synth.hpp"
#include "chi2tex/text_util.hpp"
#include "chi2tex/translator.hpp"

#include "oracles.hpp"
#include "test_paths.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <functional>
#include <set>
#include <sys/wait.h>

using namespace chi2tex;
using json = nlohmann::json;

namespace {

    // Wall-clock limits, seconds.
    constexpr double golden_limit_s = 1.0;
    constexpr double fuzz_limit_s = 10.0;
    constexpr double stats_limit_s = 5.0;

    constexpr std::size_t fuzz_lines = 10'000;
    constexpr std::uint64_t fuzz_seed = 0x5EED'F022;

    constexpr std::size_t corpus_lines = 11'000;
    constexpr double corpus_complex_share = 0.02;
    constexpr std::uint64_t corpus_seed = 1;
    constexpr double manual_pct_low = 1.0;
    constexpr double manual_pct_high = 5.0;

    struct Outcome {
        bool ok = true;
        std::string detail;

        void require(bool cond, const std::string& what) {
            if (!cond && ok) {
                ok = false;
                detail = what;
            }
        }
    };

    using Clock = std::chrono::steady_clock;

    double seconds_since(Clock::time_point start) {
        return std::chrono::duration<double>(Clock::now() - start).count();
    }

    std::string shell_quoted(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

    int run_cli(const std::string& args) {
        const std::string cmd = testing::cli_binary().string() + " " + args + " >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string document_body(const std::string& tex) {
        const std::string open = "\\begin{document}";
        const auto b = tex.find(open);
        const auto e = tex.find("\\end{document}");
        if (b == std::string::npos || e == std::string::npos || e < b) {
            return {};
        }
        return tex.substr(b + open.size(), e - b - open.size());
    }

    LatexFragment translate_content(const std::string& content) {
        const auto doc = parse_document(join_lines({content}), "probe.chi");
        return translate_line(doc.lines.at(0), FontTables::builtin());
    }

    Outcome golden() {
        Outcome o;
        testing::ScratchDir dir;
        const auto out = dir / "eq142.tex";
        const auto start = Clock::now();
        const int code = run_cli("convert " + shell_quoted(testing::fixture("eq142.chi")) + " -o " + shell_quoted(out));
        const double elapsed = seconds_since(start);
        o.require(code == 0, fmt::format("convert exited {}", code));
        if (!o.ok) {
            return o;
        }
        const auto got = latex_tokens(document_body(read_file(out.string())));
        const auto want = latex_tokens(read_file(testing::fixture("eq142.golden.tex").string()));
        if (got != want) {
            std::size_t i = 0;
            while (i < got.size() && i < want.size() && got[i] == want[i]) {
                ++i;
            }
            o.require(false, fmt::format("token {} differs: got '{}', want '{}'", i, i < got.size() ? got[i] : "<end>",
                                         i < want.size() ? want[i] : "<end>"));
        }
        o.require(elapsed < golden_limit_s, fmt::format("took {:.3f}s", elapsed));
        if (o.ok) {
            o.detail = fmt::format("{} tokens, {:.3f}s", want.size(), elapsed);
        }
        return o;
    }

    Outcome jcuken() {
        Outcome o;
        const std::pair<std::string, std::string> probes[] = {{"bp", "из"}, {"Pltcm", "Здесь"}, {"jn", "от"}};
        for (const auto& [keys, word] : probes) {
            const auto got = translate_content("\\5" + keys).content;
            o.require(got == word, fmt::format("'{}' gave '{}'", keys, got));
        }

        const auto letters = jcuken_letters();
        o.require(letters.size() == 66, fmt::format("{} letters", letters.size()));
        std::set<std::uint8_t> bytes;
        for (const char32_t letter : letters) {
            const auto b = jcuken_encode(letter);
            o.require(b.has_value(), fmt::format("U+{:04X} has no key", static_cast<std::uint32_t>(letter)));
            if (!b) {
                continue;
            }
            bytes.insert(*b);
            o.require(jcuken_decode(*b) == letter,
                      fmt::format("U+{:04X} does not round-trip", static_cast<std::uint32_t>(letter)));
            const auto key = oracle::key_for_letter(letter);
            o.require(key && static_cast<std::uint8_t>(*key) == *b,
                      fmt::format("U+{:04X} sits on the wrong key", static_cast<std::uint32_t>(letter)));
        }
        o.require(bytes.size() == letters.size(), "two letters share a key");
        if (o.ok) {
            o.detail = "3 probes, 66 letters";
        }
        return o;
    }

    Outcome fuzz() {
        Outcome o;
        std::mt19937_64 rng(fuzz_seed);
        std::vector<std::string> contents;
        contents.reserve(fuzz_lines);
        for (std::size_t i = 0; i < fuzz_lines; ++i) {
            contents.push_back(fuzz_line(rng));
        }

        const auto start = Clock::now();
        const auto doc = parse_document(join_lines(contents), "fuzz.chi");
        o.require(doc.lines.size() == fuzz_lines, fmt::format("{} lines parsed", doc.lines.size()));
        const auto& tables = FontTables::builtin();
        const auto thresholds = Thresholds::for_tables(tables);
        std::size_t auto_lines = 0;
        std::size_t violations = 0;
        std::string first;
        for (const auto& line : doc.lines) {
            if (classify(extract_features(line, tables), thresholds).decision != Decision::AUTO) {
                continue;
            }
            ++auto_lines;
            try {
                const auto rendered = render_fragment(translate_line(line, tables, thresholds));
                if (const auto problem = check_balance(rendered)) {
                    ++violations;
                    if (first.empty()) {
                        first = fmt::format("line {}: {}", line.index(), *problem);
                    }
                }
            }
            catch (const std::exception& e) {
                ++violations;
                if (first.empty()) {
                    first = fmt::format("line {}: {}", line.index(), e.what());
                }
            }
        }
        const double elapsed = seconds_since(start);
        o.require(violations == 0, fmt::format("{} violation(s), first {}", violations, first));
        o.require(auto_lines > 0, "no AUTO lines generated");
        o.require(elapsed < fuzz_limit_s, fmt::format("took {:.3f}s", elapsed));
        if (o.ok) {
            o.detail = fmt::format("{} lines, {} AUTO, {:.3f}s", doc.lines.size(), auto_lines, elapsed);
        }
        return o;
    }

    Outcome corpus_stats_share() {
        Outcome o;
        testing::ScratchDir dir;
        const auto corpus = synth_corpus({corpus_lines, corpus_complex_share, corpus_seed});
        write_file_atomic((dir / "corpus.chi").string(), corpus.bytes);

        const auto start = Clock::now();
        const std::string cmd = testing::cli_binary().string() + " stats --json " + shell_quoted(dir / "corpus.chi") + " > " +
                                shell_quoted(dir / "stats.json") + " 2>/dev/null";
        const int status = std::system(cmd.c_str());
        const double elapsed = seconds_since(start);
        o.require(WIFEXITED(status) && WEXITSTATUS(status) == 0, "stats failed");
        if (!o.ok) {
            return o;
        }
        const auto stats = json::parse(read_file((dir / "stats.json").string()));
        const double pct = stats.at("manual_pct").get<double>();
        o.require(stats.at("total_lines").get<std::size_t>() == corpus_lines,
                  fmt::format("{} lines counted", stats.at("total_lines").get<std::size_t>()));
        o.require(pct >= manual_pct_low && pct <= manual_pct_high, fmt::format("manual_pct {:.2f}", pct));
        o.require(elapsed < stats_limit_s, fmt::format("took {:.3f}s", elapsed));
        if (o.ok) {
            o.detail = fmt::format("manual_pct {:.2f} over {} lines ({} injected), {:.3f}s", pct, corpus_lines,
                                   corpus.complex_lines, elapsed);
        }
        return o;
    }

    std::string crc_text(std::uint32_t crc) { return fmt::format("0x{:08X}", crc); }

    Outcome merge_safety() {
        Outcome o;
        testing::ScratchDir dir;
        const auto corpus = synth_corpus({400, 0.1, 7});
        const auto chi = (dir / "corpus.chi").string();
        write_file_atomic(chi, corpus.bytes);
        const auto doc = load_document(chi);
        const auto& tables = FontTables::builtin();
        const auto thresholds = Thresholds::for_tables(tables);

        // Resolutions with awkward bodies: heredoc terminators, blanks, trailing spaces.
        const std::string bodies[] = {
            "$\\frac{a}{b}$",
            "line one\n>>>\nline three  ",
            "\n\n$x$\n",
            "EOT>>>\n>>>",
            "$\\sum_{i=1}^{n} i$ \t",
        };
        Sidecar sidecar{export_flags(doc, tables, thresholds)};
        o.require(sidecar.entries.size() >= 5, "too few MANUAL lines to exercise merging");
        if (!o.ok) {
            return o;
        }
        for (std::size_t i = 0; i < sidecar.entries.size(); ++i) {
            auto& e = sidecar.entries[i];
            if (i % 2 == 0) {
                e.status = ResolutionStatus::resolved;
                e.latex = bodies[(i / 2) % std::size(bodies)];
            }
        }
        sidecar.entries.front().extra.emplace_back("reviewer", "kept as written");

        const auto text = write_sidecar(sidecar);
        const auto reparsed = parse_sidecar(text);
        o.require(reparsed == sidecar, "sidecar parse(write(s)) != s");
        o.require(write_sidecar(reparsed) == text, "sidecar text does not round-trip");

        const auto fragments = translate_document(doc, tables, thresholds);
        auto once = fragments;
        merge_resolutions(once, sidecar, MergeMode::lenient);
        auto twice = once;
        merge_resolutions(twice, sidecar, MergeMode::lenient);
        o.require(once == twice, "merging twice changed the fragments");

        for (const auto& e : sidecar.entries) {
            const auto it = std::find_if(once.begin(), once.end(), [&](const KeyedFragment& f) { return f.key == e.key; });
            if (it == once.end()) {
                o.require(false, fmt::format("line {} missing after merge", e.key.index));
                continue;
            }
            if (e.status == ResolutionStatus::resolved) {
                o.require(!it->unresolved && it->fragment.content == *e.latex,
                          fmt::format("line {} not replaced byte-exactly", e.key.index));
            }
            else {
                o.require(it->unresolved, fmt::format("line {} should stay unresolved", e.key.index));
            }
        }

        // Stale CRC through the CLI.
        const auto side = (dir / "corpus.res").string();
        write_file_atomic(side, text);
        auto lines = std::vector<std::string>{};
        for (const auto& l : doc.lines) {
            lines.emplace_back(l.raw());
        }
        lines.at(sidecar.entries.front().key.index) += " x";
        write_file_atomic(chi, join_lines(lines));
        const int code = run_cli("merge " + shell_quoted(chi) + " --resolutions " + shell_quoted(side) + " -o " +
                                 shell_quoted(dir / "out.tex"));
        o.require(code == 3, fmt::format("stale merge exited {}", code));

        // Stale CRC through the review server.
        write_file_atomic(chi, corpus.bytes);
        {
            ReviewService service({load_document(chi)}, load_config({}), (dir / "server.res").string());
            ReviewServer server(service);
            const int port = server.start("127.0.0.1", 0);
            o.require(port > 0, "review server did not start");
            if (port > 0) {
                const auto& key = sidecar.entries.front().key;
                httplib::Client client("127.0.0.1", port);
                const auto path =
                    fmt::format("/api/lines/{}/{}/resolution", httplib::detail::encode_url(key.file), key.index);
                const auto body = json{{"crc", crc_text(~sidecar.entries.front().crc)}, {"latex", "$x$"}}.dump();
                const auto res = client.Put(path, body, "application/json");
                o.require(res && res->status == 409,
                          fmt::format("stale PUT answered {}", res ? std::to_string(res->status) : "nothing"));
                server.stop();
            }
        }
        if (o.ok) {
            o.detail = fmt::format("{} entries; CLI exit 3, HTTP 409", sidecar.entries.size());
        }
        return o;
    }

    std::vector<std::string> math_segments(std::string_view latex) {
        std::vector<std::string> out;
        for (const auto& s : segment_math(latex)) {
            if (!s.is_text) {
                out.emplace_back(s.body);
            }
        }
        return out;
    }

    Outcome postprocess() {
        Outcome o;
        const Postprocessor builtin(builtin_rules());
        const auto dashed = builtin.apply("поля - некоторые");
        o.require(dashed == "поля --- некоторые", fmt::format("dash rule gave '{}'", dashed));

        std::vector<Rule> text_rules;
        for (const auto& r : builtin_rules()) {
            if (r.scope == RuleScope::text) {
                text_rules.push_back(r);
            }
        }
        const Postprocessor text_only(text_rules);

        // Fixture corpus: every manuscript as assembled before post-processing, plus the golden text.
        const auto config = load_config({});
        std::vector<std::pair<std::string, std::string>> corpus;
        for (const auto& entry : std::filesystem::directory_iterator(testing::fixture(""))) {
            const auto path = entry.path();
            if (path.extension() == ".chi") {
                auto fragments = translate_document(load_document(path.string()), config.tables, config.thresholds,
                                                    config.output.translator);
                merge_resolutions(fragments, Sidecar{}, MergeMode::lenient);
                corpus.emplace_back(path.filename().string(), assemble_document(fragments, config.output, false));
            }
            else if (path.extension() == ".tex") {
                corpus.emplace_back(path.filename().string(), read_file(path.string()));
            }
        }
        o.require(corpus.size() >= 5, "fixture corpus is missing files");
        for (const auto& [name, latex] : corpus) {
            const auto once = builtin.apply(latex);
            o.require(builtin.apply(once) == once, fmt::format("{}: builtin rules are not idempotent", name));
            o.require(math_segments(text_only.apply(latex)) == math_segments(latex),
                      fmt::format("{}: text rules touched math", name));
        }
        if (o.ok) {
            o.detail = fmt::format("{} fixture documents", corpus.size());
        }
        return o;
    }

    Outcome determinism() {
        Outcome o;
        testing::ScratchDir dir;
        write_file_atomic((dir / "corpus.chi").string(), synth_corpus({2000, 0.02, 9}).bytes);
        std::string inputs = shell_quoted(dir / "corpus.chi");
        for (const auto* name : {"eq142.chi", "sample_transcript.chi", "manual.chi", "text.chi"}) {
            inputs += " " + shell_quoted(testing::fixture(name));
        }
        const int a = run_cli("convert " + inputs + " -o " + shell_quoted(dir / "a.tex"));
        const int b = run_cli("convert " + inputs + " -o " + shell_quoted(dir / "b.tex"));
        o.require(a == 0 && b == 0, fmt::format("convert exited {} and {}", a, b));
        if (!o.ok) {
            return o;
        }
        const auto first = read_file((dir / "a.tex").string());
        o.require(first == read_file((dir / "b.tex").string()), "outputs differ");
        if (o.ok) {
            o.detail = fmt::format("{} bytes identical", first.size());
        }
        return o;
    }

} // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"golden fragment", golden},
        {"JCUKEN mapping", jcuken},
        {"soundness fuzz", fuzz},
        {"corpus stats", corpus_stats_share},
        {"merge safety", merge_safety},
        {"postprocess", postprocess},
        {"determinism", determinism},
    };
    int failed = 0;
    int n = 0;
    for (const auto& [name, check] : criteria) {
        ++n;
        Outcome o;
        try {
            o = check();
        }
        catch (const std::exception& e) {
            o = {false, fmt::format("exception: {}", e.what())};
        }
        fmt::print("{} {} {}: {}\n", o.ok ? "PASS" : "FAIL", n, name, o.detail);
        failed += o.ok ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
