#include "chi2tex/errors.hpp"
#include "chi2tex/latex_check.hpp"
#include "chi2tex/text_util.hpp"
#include "chi2tex/translator.hpp"

#include "test_paths.hpp"

#include <doctest.h>

using namespace chi2tex;

namespace {

    LogicalLine line_of(std::string_view content) {
        const auto doc = parse_document("\\+\n" + std::string(content) + "\n\\+\n", "t.chi");
        REQUIRE(doc.lines.size() == 1);
        return doc.lines.front();
    }

    LatexFragment translate(std::string_view content) { return translate_line(line_of(content), FontTables::builtin()); }

    MappedGrid mapped(std::string_view content) { return map_grid(line_of(content).cells(), FontTables::builtin()); }

    const ChiDocument& fragment_doc() {
        static const auto doc = parse_document(read_file(testing::fixture("eq142.chi").string()), "eq142.chi");
        return doc;
    }

} // namespace

TEST_SUITE("translator") {
    TEST_CASE("display line with equation number") {
        const auto frag = translate_line(fragment_doc().lines[4], FontTables::builtin());
        CHECK(frag.mode == FragmentMode::display);
        CHECK(frag.tag == "142");
        CHECK(latex_tokens(frag.content) ==
              latex_tokens("L_{\\text{вз}} = -c^{-1} \\int d^3x [c\\rho \\varphi - \\vec{j} \\cdot \\vec{A}] = "
                           "\\int d^3x [-\\rho\\varphi + (\\vec{j}\\vec{A})/c]."));
    }

    TEST_CASE("display detection") {
        CHECK(detect_display(map_grid(fragment_doc().lines[4].cells(), FontTables::builtin())) == "142");
        CHECK_FALSE(detect_display(mapped("\\5Pltcm dct")));
        CHECK_FALSE(detect_display(mapped("\\1x = y + z")));
        CHECK_FALSE(detect_display(mapped("\\5ndjq ntrcn \\1(12)")));
        CHECK_FALSE(detect_display(mapped("\\1x = y (1\\^2\\,)")));
        CHECK(detect_display(mapped("\\1x = y (12)")) == "12");
    }

    TEST_CASE("prose stays prose") {
        const auto frag = translate("\\5Pltcm");
        CHECK(frag.mode == FragmentMode::text);
        CHECK(frag.content == "Здесь");
    }

    TEST_CASE("empty line") { CHECK(translate("") == LatexFragment{}); }

    TEST_CASE("inline math is padded") {
        CHECK(translate("\\5lkz \\1A \\5b \\1J").content == "для $A$ и $J$");
        CHECK(translate("\\5lkz \\1A\\5 b").content == "для $A$ и");
    }

    TEST_CASE("punctuation between formula and prose") {
        CHECK(translate("\\5jn \\1x = t, x\\3\\^a\\,\\1, \\5f").content == "от $x = t, \\vec{x}$ , а");
        CHECK(translate("\\5b \\7r\\1(x) \\5b").content == "и $\\rho(x)$ и");
        CHECK(translate("\\1(76), (86) \\5c").content == "(76), (86) с");
        CHECK(translate("\\5ghb \\1x.").content == "при $x.$");
    }

    TEST_CASE("scripts") {
        CHECK(translate("\\1J\\,\\7a\\^\\1 A\\^\\7a\\,").content == "$J_{\\alpha} A^{\\alpha}$");
        CHECK(translate("\\1x\\^2\\,").content == "$x^2$");
        CHECK(translate("\\1c\\^-1\\,").content == "$c^{-1}$");
        CHECK(translate_grid(mapped("\\1e\\^x\\^2\\,\\,")).content == "$e^{x^2}$");
        CHECK_THROWS_AS(translate("\\1e\\^x\\^2\\,\\,"), NotAuto);
        CHECK(translate("\\3I\\1\\,0\\^\\^1\\,").content == "$\\int_{0}^{1}$");
        CHECK(translate("\\1x\\,i\\^\\^2\\,").content == "$x_i^2$");
        CHECK(translate("\\1L\\,\\5dp\\^").content == "$L_{\\text{вз}}$");
    }

    TEST_CASE("control words are separated from following letters") {
        CHECK(translate("\\3I\\1 d").content == "$\\int d$");
        CHECK(translate("\\7r\\1x").content == "$\\rho x$");
        CHECK(translate("\\7rv").content == "$\\rho\\varphi$");
    }

    TEST_CASE("accent composites") {
        CHECK(translate("\\1A\\3\\^a\\,").content == "$\\vec{A}$");
        CHECK(translate("\\7r\\3\\^b\\,").content == "$\\bar{\\rho}$");
    }

    TEST_CASE("specials are escaped in prose") { CHECK(translate("\\0100%").content == "100\\%"); }

    TEST_CASE("MANUAL lines are refused") {
        CHECK_THROWS_AS(translate("x \\#L"), NotAuto);
        CHECK_THROWS_AS(translate("\\9q"), NotAuto);
    }

    TEST_CASE("unchecked translation reports what blocks it") {
        CHECK_THROWS_AS(translate_grid(mapped("\\7j")), UnknownSymbol);
        CHECK_THROWS_AS(translate_grid(mapped("\\1a \\^n\\,")), AmbiguousAttachment);
        CHECK_THROWS_AS(translate_grid(mapped("\\3-")), UnrecognizedComposite);
        CHECK_FALSE(auto_attempt(line_of("\\7j"), FontTables::builtin()));
        CHECK(auto_attempt(line_of("x \\#L"), FontTables::builtin()));
    }

    TEST_CASE("rendering a display") {
        LatexFragment frag{FragmentMode::display, "7", "x = y"};
        CHECK(render_fragment(frag) == "%%\n\\begin{equation*}\\label{7}\nx = y\n\\tag{7}\n\\end{equation*}\n%%");
        TranslatorOptions bare;
        bare.fence_displays = false;
        CHECK(render_fragment(frag, bare) == "\\begin{equation*}\\label{7}\nx = y\n\\tag{7}\n\\end{equation*}");
    }

    TEST_CASE("output configuration") {
        const auto d = parse_output_config(std::nullopt);
        CHECK(d.document_class == "article");
        CHECK(d.packages.size() == 5);
        const auto c = parse_output_config("class = report\npackage = [utf8]{inputenc}\nfence_displays = false\n"
                                           "display_math_share = 0.5\nline = \\sloppy\n");
        CHECK(c.document_class == "report");
        CHECK(c.packages == std::vector<std::string>{"[utf8]{inputenc}", "amsmath", "amssymb"});
        CHECK_FALSE(c.translator.fence_displays);
        CHECK(c.translator.display_math_share == 0.5);
        CHECK(c.extra_lines == std::vector<std::string>{"\\sloppy"});
        CHECK_THROWS_AS(parse_output_config("colour = red\n"), ConfigParseError);
        CHECK_THROWS_AS(parse_output_config("fence_displays = maybe\n"), ConfigParseError);
        CHECK_THROWS_AS(parse_output_config("display_math_share = 2\n"), ConfigParseError);
    }

    TEST_CASE("document assembly") {
        const auto config = parse_output_config(std::nullopt);
        SUBCASE("no fragments") {
            const auto doc = assemble_document({}, config, true);
            CHECK(doc.starts_with("\\documentclass[a4paper,12pt]{article}\n"));
            CHECK(doc.find("\\usepackage[T2A]{fontenc}") != std::string::npos);
            CHECK(doc.ends_with("\\begin{document}\n\\end{document}\n"));
        }
        SUBCASE("fragment display is fenced in the body") {
            const auto frags = translate_document(fragment_doc(), FontTables::builtin(), {});
            const auto doc = assemble_document(frags, config, true);
            CHECK(doc.find("%%\n\\begin{equation*}\\label{142}\n") != std::string::npos);
            CHECK(doc.find("\\tag{142}\n\\end{equation*}\n%%\n") != std::string::npos);
        }
        SUBCASE("unresolved line in strict mode") {
            const auto doc = parse_document(read_file(testing::fixture("manual.chi").string()), "manual.chi");
            const auto frags = translate_document(doc, FontTables::builtin(), {});
            try {
                assemble_document(frags, config, true);
                FAIL("expected UnresolvedManualLine");
            }
            catch (const UnresolvedManualLine& e) {
                CHECK(e.lines() == std::vector<std::pair<std::string, std::size_t>>{{"manual.chi", 1}});
            }
            const auto lenient = assemble_document(frags, config, false);
            CHECK(lenient.find("% chi2tex: UNRESOLVED line 1\n") != std::string::npos);
        }
    }

    TEST_CASE("every AUTO line of the fixtures translates to balanced LaTeX") {
        for (const auto* name : {"eq142.chi", "sample_transcript.chi", "manual.chi", "text.chi"}) {
            const auto doc = parse_document(read_file(testing::fixture(name).string()), name);
            for (const auto& f : translate_document(doc, FontTables::builtin(), {})) {
                if (!f.unresolved) {
                    CAPTURE(f.fragment.content);
                    CHECK_FALSE(check_balance(render_fragment(f.fragment)));
                }
            }
        }
    }
}
