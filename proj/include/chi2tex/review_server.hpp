#pragma once

// HTTP back end for the browser review tool. ReviewService holds the
// request logic and is usable without sockets; ReviewServer binds it to
// a loopback port.
//
//   GET  /api/lines?status=manual|auto|all|pending|resolved
//   GET  /api/lines/{file}/{index}
//   PUT  /api/lines/{file}/{index}/resolution   {"crc": "0x...", "latex": "..."}
//   GET  /                                      bundled UI

#include "chi2tex/chi_reader.hpp"
#include "chi2tex/merge_store.hpp"
#include "chi2tex/pipeline.hpp"

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chi2tex {

    struct HttpReply {
        int status = 200;
        std::string content_type = "application/json";
        std::string body;
    };

    class ReviewService {
    public:
        /// Loads or creates the sidecar at `sidecar_path`, refreshed against
        /// the current verdicts of `docs`, and writes it back.
        ReviewService(std::vector<ChiDocument> docs, LoadedConfig config, std::string sidecar_path);

        HttpReply list_lines(std::string_view status_filter) const;
        HttpReply line_detail(std::string_view file, std::size_t index) const;
        HttpReply put_resolution(std::string_view file, std::size_t index, std::string_view body);

        Sidecar sidecar() const;

    private:
        struct LineRef {
            const ChiDocument* doc = nullptr;
            const LogicalLine* line = nullptr;
        };

        std::optional<LineRef> find(std::string_view file, std::size_t index) const;
        Verdict verdict(const LogicalLine& line) const;
        std::string status_of(const LineKey& key, const Verdict& v) const;

        std::vector<ChiDocument> docs_;
        LoadedConfig config_;
        std::string sidecar_path_;
        mutable std::mutex mutex_;
        Sidecar sidecar_;
    };

    /// Placeholder page served when no UI build directory is given.
    std::string_view placeholder_ui_page() noexcept;

    class ReviewServer {
    public:
        /// `ui_dir` overrides the placeholder with a built UI bundle.
        ReviewServer(ReviewService& service, std::optional<std::string> ui_dir = std::nullopt);
        ~ReviewServer();

        ReviewServer(const ReviewServer&) = delete;
        ReviewServer& operator=(const ReviewServer&) = delete;

        /// Binds `host:port` (port 0 picks a free one) and serves on a
        /// background thread. Returns the bound port, or -1.
        int start(const std::string& host, int port);

        /// Blocks until stop() is called from another thread or a signal.
        void wait();
        void stop();

    private:
        struct Impl;
        std::unique_ptr<Impl> impl_;
    };

} // namespace chi2tex
