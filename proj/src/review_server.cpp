#include "chi2tex/review_server.hpp"

#include "chi2tex/errors.hpp"
#include "chi2tex/latex_check.hpp"
#include "chi2tex/render.hpp"
#include "chi2tex/text_util.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <thread>

namespace chi2tex {

    using json = nlohmann::ordered_json;

    namespace {

        std::string crc_text(std::uint32_t crc) { return fmt::format("0x{:08X}", crc); }

        HttpReply json_reply(int status, const json& body) {
            return {status, "application/json", body.dump(-1, ' ', false, json::error_handler_t::replace) + "\n"};
        }

        HttpReply error_reply(int status, std::string_view message) {
            return json_reply(status, json{{"error", message}});
        }

        json reasons_json(const Verdict& v) {
            auto out = json::array();
            for (const auto r : v.reasons) {
                out.push_back(std::string(to_string(r)));
            }
            return out;
        }

        std::optional<std::uint32_t> parse_crc(const json& value) {
            if (value.is_number_unsigned()) {
                const auto n = value.get<std::uint64_t>();
                return n <= 0xFFFFFFFFu ? std::optional<std::uint32_t>(static_cast<std::uint32_t>(n)) : std::nullopt;
            }
            if (!value.is_string()) {
                return std::nullopt;
            }
            std::string_view s = value.get_ref<const std::string&>();
            if (s.starts_with("0x") || s.starts_with("0X")) {
                s.remove_prefix(2);
            }
            std::uint32_t out = 0;
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out, 16);
            if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
                return std::nullopt;
            }
            return out;
        }

    } // namespace

    ReviewService::ReviewService(std::vector<ChiDocument> docs, LoadedConfig config, std::string sidecar_path)
        : docs_(std::move(docs)), config_(std::move(config)), sidecar_path_(std::move(sidecar_path)) {
        std::vector<Resolution> fresh;
        std::vector<std::string> files;
        for (const auto& doc : docs_) {
            auto flags = export_flags(doc, config_.tables, config_.thresholds, config_.output.translator);
            fresh.insert(fresh.end(), flags.begin(), flags.end());
            files.push_back(doc.source_path);
        }
        sidecar_ = refresh_sidecar(load_sidecar(sidecar_path_), fresh, files);
        write_file_atomic(sidecar_path_, write_sidecar(sidecar_));
    }

    Sidecar ReviewService::sidecar() const {
        const std::lock_guard lock(mutex_);
        return sidecar_;
    }

    std::optional<ReviewService::LineRef> ReviewService::find(std::string_view file, std::size_t index) const {
        for (const auto& doc : docs_) {
            if (doc.source_path == file && index < doc.lines.size()) {
                return LineRef{&doc, &doc.lines[index]};
            }
        }
        return std::nullopt;
    }

    Verdict ReviewService::verdict(const LogicalLine& line) const {
        return classify(extract_features(line, config_.tables), config_.thresholds);
    }

    std::string ReviewService::status_of(const LineKey& key, const Verdict& v) const {
        const auto* entry = sidecar_.find(key);
        if (v.decision == Decision::AUTO) {
            return entry && entry->override_auto && entry->status == ResolutionStatus::resolved ? "resolved" : "auto";
        }
        return entry && entry->status == ResolutionStatus::resolved ? "resolved" : "pending";
    }

    HttpReply ReviewService::list_lines(std::string_view status_filter) const {
        if (status_filter.empty()) {
            status_filter = "manual";
        }
        static constexpr std::string_view filters[] = {"manual", "auto", "all", "pending", "resolved"};
        if (std::find(std::begin(filters), std::end(filters), status_filter) == std::end(filters)) {
            return error_reply(400, fmt::format("unknown status filter '{}'", status_filter));
        }
        const std::lock_guard lock(mutex_);
        auto out = json::array();
        for (const auto& doc : docs_) {
            for (const auto& line : doc.lines) {
                const auto v = verdict(line);
                const LineKey key{doc.source_path, line.index()};
                const auto status = status_of(key, v);
                const bool manual = v.decision == Decision::MANUAL;
                const bool keep = status_filter == "all" || (status_filter == "manual" && manual) ||
                                  (status_filter == "auto" && !manual) || status_filter == status;
                if (!keep) {
                    continue;
                }
                out.push_back({{"file", doc.source_path},
                               {"index", line.index()},
                               {"crc", crc_text(line.crc())},
                               {"decision", std::string(to_string(v.decision))},
                               {"reasons", reasons_json(v)},
                               {"status", status},
                               {"preview", baseline_preview(map_grid(line.cells(), config_.tables))}});
            }
        }
        return json_reply(200, out);
    }

    HttpReply ReviewService::line_detail(std::string_view file, std::size_t index) const {
        const auto ref = find(file, index);
        if (!ref) {
            return error_reply(404, fmt::format("no line {} in '{}'", index, file));
        }
        const auto& line = *ref->line;
        const auto grid = map_grid(line.cells(), config_.tables);
        const auto v = verdict(line);
        const LineKey key{ref->doc->source_path, index};

        json attempt = nullptr;
        if (const auto frag = auto_attempt(line, config_.tables, config_.output.translator)) {
            attempt = render_fragment(*frag, config_.output.translator);
        }

        const std::lock_guard lock(mutex_);
        json resolution = nullptr;
        if (const auto* e = sidecar_.find(key)) {
            resolution = {{"status", std::string(to_string(e->status))},
                          {"crc", crc_text(e->crc)},
                          {"latex", e->latex ? json(*e->latex) : json(nullptr)},
                          {"override", e->override_auto}};
        }
        return json_reply(200, json{{"file", key.file},
                                    {"index", index},
                                    {"crc", crc_text(line.crc())},
                                    {"decision", std::string(to_string(v.decision))},
                                    {"reasons", reasons_json(v)},
                                    {"status", status_of(key, v)},
                                    {"grid", grid_json(grid)},
                                    {"raw_hex", hex_bytes(line.raw())},
                                    {"auto_attempt", attempt},
                                    {"resolution", resolution}});
    }

    HttpReply ReviewService::put_resolution(std::string_view file, std::size_t index, std::string_view body) {
        const auto ref = find(file, index);
        if (!ref) {
            return error_reply(404, fmt::format("no line {} in '{}'", index, file));
        }
        const auto request = json::parse(body, nullptr, false);
        if (request.is_discarded() || !request.is_object() || !request.contains("latex") ||
            !request["latex"].is_string() || !request.contains("crc")) {
            return error_reply(400, "expected {\"crc\": \"0x...\", \"latex\": \"...\"}");
        }
        const auto crc = parse_crc(request["crc"]);
        if (!crc) {
            return error_reply(400, "malformed crc");
        }
        const auto& line = *ref->line;
        if (*crc != line.crc()) {
            return json_reply(409, json{{"error", "line changed since it was loaded"},
                                        {"expected", crc_text(line.crc())},
                                        {"found", crc_text(*crc)}});
        }
        const auto latex = request["latex"].get<std::string>();
        if (trim(latex).empty()) {
            return error_reply(422, "latex is empty");
        }
        if (const auto problem = check_balance(latex)) {
            return error_reply(422, *problem);
        }
        const bool override_auto = request.value("override", false);
        const auto v = verdict(line);
        if (v.decision == Decision::AUTO && !override_auto) {
            return error_reply(422, "line is translated automatically; set \"override\": true to replace it");
        }

        const std::lock_guard lock(mutex_);
        const LineKey key{ref->doc->source_path, index};
        Sidecar next = sidecar_;
        auto* entry = next.find(key);
        if (!entry) {
            next.entries.push_back(Resolution{key, line.crc(), ResolutionStatus::pending, std::nullopt, false, {}, {}});
            std::stable_sort(next.entries.begin(), next.entries.end(),
                             [](const Resolution& a, const Resolution& b) { return a.key < b.key; });
            entry = next.find(key);
        }
        entry->crc = line.crc();
        entry->status = ResolutionStatus::resolved;
        entry->latex = latex;
        entry->override_auto = v.decision == Decision::AUTO;
        try {
            write_file_atomic(sidecar_path_, write_sidecar(next));
        }
        catch (const std::exception& e) {
            return error_reply(500, e.what());
        }
        sidecar_ = std::move(next);
        return json_reply(200, json{{"file", key.file},
                                    {"index", index},
                                    {"crc", crc_text(line.crc())},
                                    {"status", "resolved"},
                                    {"latex", latex}});
    }

    std::string_view placeholder_ui_page() noexcept {
        return R"(<!doctype html>
<html lang="en">
<head><meta charset="utf-8"><title>chi2tex review</title></head>
<body>
<h1>chi2tex review</h1>
<p>No UI bundle is installed. Start the server with <code>--ui-dir</code> pointing at a built UI,
or use the JSON API directly:</p>
<ul>
<li><a href="/api/lines?status=manual">/api/lines?status=manual</a></li>
<li><code>GET /api/lines/{file}/{index}</code></li>
<li><code>PUT /api/lines/{file}/{index}/resolution</code></li>
</ul>
</body>
</html>
)";
    }

    struct ReviewServer::Impl {
        ReviewService& service;
        httplib::Server server;
        std::thread thread;

        static void send(httplib::Response& res, const HttpReply& reply) {
            res.status = reply.status;
            res.set_content(reply.body, reply.content_type);
        }

        static std::optional<std::size_t> index_of(const std::string& s) {
            std::size_t n = 0;
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
            if (ec != std::errc{} || ptr != s.data() + s.size()) {
                return std::nullopt;
            }
            return n;
        }

        Impl(ReviewService& svc, const std::optional<std::string>& ui_dir) : service(svc) {
            server.Get("/api/lines", [this](const httplib::Request& req, httplib::Response& res) {
                send(res, service.list_lines(req.has_param("status") ? req.get_param_value("status") : ""));
            });
            server.Get(R"(/api/lines/(.+)/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
                const auto index = index_of(req.matches[2]);
                send(res, index ? service.line_detail(req.matches[1].str(), *index) : HttpReply{400, "application/json", "{}"});
            });
            server.Put(R"(/api/lines/(.+)/(\d+)/resolution)", [this](const httplib::Request& req, httplib::Response& res) {
                const auto index = index_of(req.matches[2]);
                send(res, index ? service.put_resolution(req.matches[1].str(), *index, req.body)
                                : HttpReply{400, "application/json", "{}"});
            });
            if (ui_dir) {
                server.set_mount_point("/", *ui_dir);
            }
            else {
                server.Get("/", [](const httplib::Request&, httplib::Response& res) {
                    res.set_content(std::string(placeholder_ui_page()), "text/html; charset=utf-8");
                });
            }
        }
    };

    ReviewServer::ReviewServer(ReviewService& service, std::optional<std::string> ui_dir)
        : impl_(std::make_unique<Impl>(service, ui_dir)) {}

    ReviewServer::~ReviewServer() { stop(); }

    int ReviewServer::start(const std::string& host, int port) {
        const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
        if (bound < 0) {
            return -1;
        }
        impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
        impl_->server.wait_until_ready();
        return bound;
    }

    void ReviewServer::wait() {
        if (impl_->thread.joinable()) {
            impl_->thread.join();
        }
    }

    void ReviewServer::stop() {
        if (!impl_) {
            return;
        }
        impl_->server.stop();
        if (impl_->thread.joinable()) {
            impl_->thread.join();
        }
    }

} // namespace chi2tex
