#include "chi2tex/errors.hpp"
#include "chi2tex/merge_store.hpp"
#include "chi2tex/pipeline.hpp"
#include "chi2tex/render.hpp"
#include "chi2tex/review_server.hpp"
#include "chi2tex/synth.hpp"
#include "chi2tex/text_util.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <csignal>
#include <filesystem>
#include <iostream>
#include <system_error>

namespace {

    using namespace chi2tex;

    enum ExitCode : int {
        exit_ok = 0,
        exit_io = 1,
        exit_unresolved = 2,
        exit_stale = 3,
        exit_usage = 64,
    };

    struct Options {
        std::vector<std::string> inputs;
        RunConfig run;
        std::optional<std::string> resolutions;
        std::optional<std::string> output;
        bool strict = false;
        bool json = false;
        std::string serve = "127.0.0.1:8080";
        std::optional<std::string> ui_dir;
        std::size_t line = 0;
        std::string format = "ansi";
        SynthOptions synth;
    };

    void add_config_flags(CLI::App* cmd, Options& o) {
        cmd->add_option("--fonts", o.run.fonts_path, "font mapping config");
        cmd->add_option("--rules", o.run.rules_path, "post-processing rules");
        cmd->add_option("--preamble", o.run.preamble_path, "document class, packages and output options");
        cmd->add_option("--max-rows", o.run.max_rows, "rows above/below the baseline still translated automatically")
            ->check(CLI::NonNegativeNumber);
        cmd->add_flag("--allow-unknown-escapes", o.run.allow_unknown, "do not flag lines for unknown escapes");
    }

    void print_warnings(const ChiDocument& doc) {
        for (const auto& w : doc.warnings) {
            if (w.line) {
                fmt::print(stderr, "{}: line {}: warning: {}\n", doc.source_path, *w.line, w.message);
            }
            else {
                fmt::print(stderr, "{}: warning: {}\n", doc.source_path, w.message);
            }
        }
    }

    std::vector<ChiDocument> load_all(const std::vector<std::string>& paths) {
        std::vector<ChiDocument> docs;
        for (const auto& p : paths) {
            docs.push_back(load_document(p));
            print_warnings(docs.back());
        }
        return docs;
    }

    void emit(const std::optional<std::string>& path, std::string_view text) {
        if (!path || *path == "-") {
            std::cout << text;
            return;
        }
        write_file_atomic(*path, text);
    }

    int run_convert(const Options& o) {
        const auto config = load_config(o.run);
        const auto sidecar = o.resolutions ? load_sidecar(*o.resolutions) : Sidecar{};
        const auto mode = o.strict ? MergeMode::strict : MergeMode::lenient;
        const auto docs = load_all(o.inputs);

        auto report = [](const ConvertResult& result) {
            const auto& r = result.report;
            const auto manual = result.total_lines - result.auto_lines;
            fmt::print(stderr, "{} line(s): {} auto, {} manual ({:.2f}%), {} resolved, {} unresolved\n",
                       result.total_lines, result.auto_lines, manual, percent_2dp(manual, result.total_lines),
                       r.applied, r.unresolved.size());
            for (const auto& k : r.unresolved) {
                fmt::print(stderr, "{}: line {}: unresolved, placeholder written\n", k.file, k.index);
            }
            for (const auto& k : r.orphans) {
                fmt::print(stderr, "{}: line {}: resolution names a line that no longer exists\n", k.file, k.index);
            }
        };

        if (o.output) {
            const auto result = convert(docs, config, sidecar, mode);
            report(result);
            emit(o.output, result.latex);
            return exit_ok;
        }
        for (const auto& doc : docs) {
            const auto result = convert(std::span(&doc, 1), config, sidecar, mode);
            report(result);
            auto out = std::filesystem::path(doc.source_path).replace_extension(".tex");
            write_file_atomic(out.string(), result.latex);
            fmt::print(stderr, "wrote {}\n", out.string());
        }
        return exit_ok;
    }

    int run_stats(const Options& o) {
        const auto config = load_config(o.run);
        const auto docs = load_all(o.inputs);
        const auto report = corpus_stats(docs, config.tables, config.thresholds);
        std::cout << (o.json ? format_stats_json(report) : format_stats_table(report));
        return exit_ok;
    }

    int run_flag(const Options& o) {
        const auto config = load_config(o.run);
        const auto docs = load_all(o.inputs);
        std::vector<Resolution> fresh;
        for (const auto& doc : docs) {
            auto flags = export_flags(doc, config.tables, config.thresholds, config.output.translator);
            fresh.insert(fresh.end(), flags.begin(), flags.end());
        }
        const auto sidecar = refresh_sidecar(load_sidecar(*o.resolutions), fresh, o.inputs);
        write_file_atomic(*o.resolutions, write_sidecar(sidecar));
        std::size_t pending = 0;
        for (const auto& e : sidecar.entries) {
            pending += e.status == ResolutionStatus::pending ? 1 : 0;
        }
        fmt::print(stderr, "{}: {} flagged line(s), {} pending\n", *o.resolutions, sidecar.entries.size(), pending);
        return exit_ok;
    }

    ReviewServer* active_server = nullptr;

    extern "C" void on_signal(int) {
        if (active_server) {
            active_server->stop();
        }
    }

    int run_review(const Options& o) {
        const auto colon = o.serve.rfind(':');
        int port = -1;
        if (colon != std::string::npos) {
            try {
                port = std::stoi(o.serve.substr(colon + 1));
            }
            catch (const std::exception&) {
                port = -1;
            }
        }
        if (port < 0 || port > 65535) {
            fmt::print(stderr, "--serve expects HOST:PORT, got '{}'\n", o.serve);
            return exit_usage;
        }
        const auto host = o.serve.substr(0, colon);
        ReviewService service(load_all(o.inputs), load_config(o.run), *o.resolutions);
        ReviewServer server(service, o.ui_dir);
        const int bound = server.start(host, port);
        if (bound < 0) {
            fmt::print(stderr, "cannot listen on {}\n", o.serve);
            return exit_io;
        }
        fmt::print(stderr, "review server on http://{}:{}/\n", host, bound);
        active_server = &server;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        server.wait();
        active_server = nullptr;
        return exit_ok;
    }

    int run_render(const Options& o) {
        const auto format = parse_render_format(o.format);
        if (!format) {
            fmt::print(stderr, "unknown format '{}'\n", o.format);
            return exit_usage;
        }
        const auto config = load_config(o.run);
        const auto doc = load_document(o.inputs.front());
        if (o.line >= doc.lines.size()) {
            fmt::print(stderr, "{} has {} line(s)\n", doc.source_path, doc.lines.size());
            return exit_usage;
        }
        std::cout << render_grid(doc.lines[o.line], config.tables, *format);
        return exit_ok;
    }

    int run_gen_corpus(const Options& o) {
        const auto corpus = synth_corpus(o.synth);
        emit(o.output, corpus.bytes);
        fmt::print(stderr, "{} line(s), {} injected complex\n", corpus.kinds.size(), corpus.complex_lines);
        return exit_ok;
    }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"chi2tex: ChiWriter manuscripts to LaTeX"};
    app.require_subcommand(1);
    Options o;

    auto* convert = app.add_subcommand("convert", "translate manuscripts to LaTeX");
    convert->add_option("inputs", o.inputs, "CHI files")->required()->check(CLI::ExistingFile);
    convert->add_option("-o,--output", o.output, "combined output file, '-' for stdout");
    convert->add_option("--resolutions", o.resolutions, "sidecar with reviewed LaTeX");
    convert->add_flag("--strict", o.strict, "fail instead of writing placeholders for unresolved lines");
    add_config_flags(convert, o);

    auto* merge = app.add_subcommand("merge", "convert, substituting resolutions from a sidecar");
    merge->add_option("inputs", o.inputs, "CHI files")->required()->check(CLI::ExistingFile);
    merge->add_option("-o,--output", o.output, "combined output file, '-' for stdout");
    merge->add_option("--resolutions", o.resolutions, "sidecar with reviewed LaTeX")->required();
    merge->add_flag("--strict", o.strict, "fail on unresolved lines");
    add_config_flags(merge, o);

    auto* stats = app.add_subcommand("stats", "AUTO/MANUAL counts");
    stats->add_option("inputs", o.inputs, "CHI files")->required()->check(CLI::ExistingFile);
    stats->add_flag("--json", o.json, "machine-readable output");
    add_config_flags(stats, o);

    auto* flag = app.add_subcommand("flag", "write or refresh the sidecar of lines needing review");
    flag->add_option("inputs", o.inputs, "CHI files")->required()->check(CLI::ExistingFile);
    flag->add_option("--resolutions", o.resolutions, "sidecar path")->required();
    add_config_flags(flag, o);

    auto* review = app.add_subcommand("review", "serve the review API");
    review->add_option("inputs", o.inputs, "CHI files")->required()->check(CLI::ExistingFile);
    review->add_option("--resolutions", o.resolutions, "sidecar path")->required();
    review->add_option("--serve", o.serve, "HOST:PORT")->capture_default_str();
    review->add_option("--ui-dir", o.ui_dir, "built UI bundle")->check(CLI::ExistingDirectory);
    add_config_flags(review, o);

    auto* render = app.add_subcommand("render", "show one logical line's glyph grid");
    render->add_option("input", o.inputs, "CHI file")->required()->expected(1)->check(CLI::ExistingFile);
    render->add_option("--line", o.line, "logical line index")->required();
    render->add_option("--format", o.format, "ansi, html or json")->capture_default_str();
    add_config_flags(render, o);

    auto* gen = app.add_subcommand("gen-corpus", "synthetic manuscript for benchmarking");
    gen->add_option("--lines", o.synth.lines, "logical lines")->capture_default_str();
    gen->add_option("--complex-share", o.synth.complex_share, "share of lines needing review")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    gen->add_option("--seed", o.synth.seed, "random seed")->capture_default_str();
    gen->add_option("-o,--output", o.output, "output file, '-' for stdout");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*convert || *merge) {
            return run_convert(o);
        }
        if (*stats) {
            return run_stats(o);
        }
        if (*flag) {
            return run_flag(o);
        }
        if (*review) {
            return run_review(o);
        }
        if (*render) {
            return run_render(o);
        }
        return run_gen_corpus(o);
    }
    catch (const UnresolvedManualLine& e) {
        for (const auto& [file, index] : e.lines()) {
            fmt::print(stderr, "{}: line {}: no accepted resolution\n", file, index);
        }
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_unresolved;
    }
    catch (const CrcMismatch& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_stale;
    }
    catch (const std::system_error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_io;
    }
    catch (const EmptyCorpus& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_usage;
    }
    catch (const Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_io;
    }
}
