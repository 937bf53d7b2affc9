#include "chi2tex/errors.hpp"
#include "chi2tex/merge_store.hpp"
#include "chi2tex/text_util.hpp"

#include "test_paths.hpp"

#include <doctest.h>

#include <random>

using namespace chi2tex;

namespace {

    ChiDocument fixture_doc(const std::string& name) {
        return parse_document(read_file(testing::fixture(name).string()), name);
    }

    Resolution resolved(const ChiDocument& doc, std::size_t index, std::string latex) {
        Resolution r;
        r.key = {doc.source_path, index};
        r.crc = doc.lines.at(index).crc();
        r.status = ResolutionStatus::resolved;
        r.latex = std::move(latex);
        return r;
    }

    std::string random_text(std::mt19937_64& rng) {
        static constexpr std::string_view alphabet = "ab \\${}%>\n#=";
        std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
        std::uniform_int_distribution<std::size_t> len(0, 30);
        std::string s(len(rng), ' ');
        for (auto& c : s) {
            c = alphabet[pick(rng)];
        }
        return s;
    }

} // namespace

TEST_SUITE("merge_store") {
    TEST_CASE("exporting flags") {
        SUBCASE("two MANUAL lines give two blocks") {
            const auto doc = parse_document("\\+\nx\\#\n\\+\nok\n\\+\n\\9q\n\\+\n", "two.chi");
            const auto flags = export_flags(doc, FontTables::builtin(), {});
            REQUIRE(flags.size() == 2);
            CHECK(flags[0].key.index == 0);
            CHECK(flags[1].key.index == 2);
            const auto text = write_sidecar({flags});
            CHECK(parse_sidecar(text).entries == flags);
        }
        SUBCASE("no MANUAL lines give a header-only sidecar") {
            const auto flags = export_flags(fixture_doc("eq142.chi"), FontTables::builtin(), {});
            CHECK(flags.empty());
            CHECK(write_sidecar({flags}) == "# chi2tex resolutions v1\n");
        }
        SUBCASE("reasons and the automatic attempt are recorded") {
            const auto flags = export_flags(fixture_doc("manual.chi"), FontTables::builtin(), {});
            REQUIRE(flags.size() == 1);
            CHECK(flags[0].status == ResolutionStatus::pending);
            CHECK(flags[0].comments.at(0) == "reasons: UNKNOWN_ESCAPE");
            CHECK(flags[0].comments.at(1) == "auto-attempt: Здесь поле");
        }
    }

    TEST_CASE("sidecar syntax") {
        CHECK_THROWS_AS(parse_sidecar(""), SidecarSyntax);
        CHECK_THROWS_AS(parse_sidecar("# chi2tex resolutions v2\n"), SidecarSyntax);
        CHECK(parse_sidecar("# chi2tex resolutions v1\n").entries.empty());

        const std::string block = "[line]\nfile = a.chi\nindex = 1\ncrc = 0x0000ABCD\nstatus = pending\n";
        const std::string head = "# chi2tex resolutions v1\n";
        CHECK_THROWS_AS(parse_sidecar(head + block + block), DuplicateKey);
        CHECK_THROWS_AS(parse_sidecar(head + "file = a\n"), SidecarSyntax);
        CHECK_THROWS_AS(parse_sidecar(head + "[line]\nfile = a.chi\n"), SidecarSyntax);
        CHECK_THROWS_AS(parse_sidecar(head + block + "status = pending\n"), SidecarSyntax);
        CHECK_THROWS_AS(parse_sidecar(head + "[line]\nfile = a\nindex = 1\ncrc = ABCD\nstatus = pending\n"), SidecarSyntax);
        CHECK_THROWS_AS(parse_sidecar(head + "[line]\nfile = a\nindex = 1\ncrc = 0x1\nstatus = resolved\n"), SidecarSyntax);
        CHECK_THROWS_AS(parse_sidecar(head + block + "latex = <<<\nx\n"), SidecarSyntax);

        try {
            parse_sidecar(head + "\n[line]\nfile = a.chi\nindex = x\n");
            FAIL("expected SidecarSyntax");
        }
        catch (const SidecarSyntax& e) {
            CHECK(e.line() == 5);
        }
    }

    TEST_CASE("comments and unknown keys survive a rewrite") {
        const std::string text = "# chi2tex resolutions v1\n\n[line]\nfile = a.chi\nindex = 1\ncrc = 0x0000ABCD\n"
                                 "status = resolved\nreviewer = kim\n# looked at twice\nlatex = <<<\n$x$\n>>>\n";
        const auto sidecar = parse_sidecar(text);
        REQUIRE(sidecar.entries.size() == 1);
        CHECK(sidecar.entries[0].comments == std::vector<std::string>{"looked at twice"});
        CHECK(write_sidecar(sidecar) == text);
    }

    TEST_CASE("heredoc bodies containing the terminator get a tag") {
        Sidecar s;
        s.entries.push_back({{"a.chi", 0}, 1, ResolutionStatus::resolved, ">>>\nx", false, {}, {}});
        const auto text = write_sidecar(s);
        CHECK(text.find("latex = <<<EOT\n") != std::string::npos);
        CHECK(parse_sidecar(text) == s);
    }

    TEST_CASE("write then parse is the identity on random sidecars") {
        std::mt19937_64 rng(5);
        for (int round = 0; round < 300; ++round) {
            Sidecar s;
            const auto n = rng() % 5;
            for (std::size_t i = 0; i < n; ++i) {
                Resolution r;
                r.key = {"dir/file " + std::to_string(rng() % 3) + ".chi", i};
                r.crc = static_cast<std::uint32_t>(rng());
                r.status = rng() % 2 ? ResolutionStatus::resolved : ResolutionStatus::pending;
                if (r.status == ResolutionStatus::resolved || rng() % 2) {
                    r.latex = random_text(rng);
                }
                r.override_auto = rng() % 4 == 0;
                if (rng() % 2) {
                    r.comments.push_back("reasons: ROWS_ABOVE");
                }
                s.entries.push_back(std::move(r));
            }
            const auto text = write_sidecar(s);
            CAPTURE(text);
            CHECK(parse_sidecar(text) == s);
            CHECK(write_sidecar(parse_sidecar(text)) == text);
        }
    }

    TEST_CASE("merging") {
        const auto doc = fixture_doc("manual.chi");
        const auto fresh = translate_document(doc, FontTables::builtin(), {});

        SUBCASE("no resolutions and all AUTO is the identity") {
            auto frags = translate_document(fixture_doc("eq142.chi"), FontTables::builtin(), {});
            const auto before = frags;
            merge_resolutions(frags, {}, MergeMode::strict);
            CHECK(frags == before);
        }
        SUBCASE("a resolution replaces the line byte for byte") {
            auto frags = fresh;
            const Sidecar s{{resolved(doc, 1, "$\\frac{a}{b}$")}};
            const auto report = merge_resolutions(frags, s, MergeMode::strict);
            CHECK(report.applied == 1);
            CHECK(frags[1].fragment.content == "$\\frac{a}{b}$");
            CHECK_FALSE(frags[1].unresolved);
            CHECK(frags[0] == fresh[0]);
            CHECK(frags[2] == fresh[2]);
        }
        SUBCASE("merging twice changes nothing more") {
            auto once = fresh;
            const Sidecar s{{resolved(doc, 1, "text")}};
            merge_resolutions(once, s, MergeMode::strict);
            auto twice = once;
            merge_resolutions(twice, s, MergeMode::strict);
            CHECK(once == twice);

            auto lenient_once = fresh;
            merge_resolutions(lenient_once, {}, MergeMode::lenient);
            auto lenient_twice = lenient_once;
            merge_resolutions(lenient_twice, {}, MergeMode::lenient);
            CHECK(lenient_once == lenient_twice);
        }
        SUBCASE("stale crc is rejected") {
            auto frags = fresh;
            auto r = resolved(doc, 1, "x");
            r.crc ^= 1;
            try {
                merge_resolutions(frags, {{r}}, MergeMode::lenient);
                FAIL("expected CrcMismatch");
            }
            catch (const CrcMismatch& e) {
                CHECK(e.index() == 1);
                CHECK(e.found() == doc.lines[1].crc());
            }
            CHECK(frags == fresh);
        }
        SUBCASE("unresolved lines") {
            auto frags = fresh;
            CHECK_THROWS_AS(merge_resolutions(frags, {}, MergeMode::strict), UnresolvedManualLine);
            CHECK(frags == fresh);
            const auto report = merge_resolutions(frags, {}, MergeMode::lenient);
            REQUIRE(report.unresolved.size() == 1);
            CHECK(frags[1].fragment.content == "% chi2tex: UNRESOLVED line 1");
        }
        SUBCASE("AUTO lines change only with override") {
            auto frags = fresh;
            auto r = resolved(doc, 0, "replaced");
            Sidecar s{{r, resolved(doc, 1, "x")}};
            auto report = merge_resolutions(frags, s, MergeMode::strict);
            CHECK(report.ignored_auto == 1);
            CHECK(frags[0] == fresh[0]);
            s.entries[0].override_auto = true;
            report = merge_resolutions(frags, s, MergeMode::strict);
            CHECK(report.overrides == 1);
            CHECK(frags[0].fragment.content == "replaced");
        }
        SUBCASE("entries for lines that vanished are reported") {
            auto frags = fresh;
            Resolution r = resolved(doc, 1, "x");
            r.key.index = 40;
            const auto report = merge_resolutions(frags, {{r}}, MergeMode::lenient);
            CHECK(report.orphans.size() == 1);
        }
    }

    TEST_CASE("refreshing keeps current work and flags stale work") {
        const auto doc = fixture_doc("manual.chi");
        const auto fresh = export_flags(doc, FontTables::builtin(), {});
        REQUIRE(fresh.size() == 1);
        const std::vector<std::string> files{doc.source_path};

        auto done = resolved(doc, 1, "$y$");
        Resolution other{{"other.chi", 3}, 7, ResolutionStatus::pending, std::nullopt, false, {}, {}};
        auto kept = refresh_sidecar({{done, other}}, fresh, files);
        REQUIRE(kept.entries.size() == 2);
        CHECK(*kept.find(done.key) == done);
        CHECK(kept.find(other.key));

        done.crc ^= 0xFF;
        const auto stale = refresh_sidecar({{done}}, fresh, files);
        REQUIRE(stale.entries.size() == 1);
        CHECK(stale.entries[0].status == ResolutionStatus::pending);
        CHECK(stale.entries[0].crc == doc.lines[1].crc());
        CHECK(stale.entries[0].comments.back() == "stale latex: $y$");
    }
}
