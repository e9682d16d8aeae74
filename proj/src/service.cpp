#include "spectral/service.hpp"

#include <cmath>
#include <random>

#include <httplib.h>

#include "spectral/image_io.hpp"

namespace spectral {

namespace {

HttpReply json_reply(int status, const Json& j) { return {status, "application/json", j.dump()}; }

HttpReply error_reply(int status, const std::string& message) { return json_reply(status, Json{{"error", message}}); }

long long whole_ms(double ms) { return std::llround(ms); }

constexpr const char* kPlaceholderPage =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>spectral</title></head><body>"
    "<h1>spectral-server</h1><p>The web console is not installed. API endpoints:</p><ul>"
    "<li>POST /api/images</li><li>POST /api/segment</li><li>GET /api/results/{id}/mask.png</li>"
    "<li>GET /api/health</li></ul></body></html>";

}  // namespace

ImageStore::ImageStore(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw InvalidInput("image store capacity must be >= 1");
    std::random_device rd;
    salt_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string ImageStore::next_id() {
    // SplitMix64 finaliser is a bijection, so distinct counters give distinct ids.
    std::uint64_t z = ++counter_ + salt_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    static constexpr char hex[] = "0123456789abcdef";
    std::string id(16, '0');
    for (int i = 15; i >= 0; --i, z >>= 4) id[static_cast<std::size_t>(i)] = hex[z & 0xf];
    return id;
}

std::string ImageStore::insert(GrayImage16 image) {
    auto shared = std::make_shared<const GrayImage16>(std::move(image));
    const auto now = std::chrono::system_clock::now();
    std::lock_guard lock(mutex_);
    std::string id = next_id();
    order_.push_front({id, std::move(shared), now, nullptr});
    index_[id] = order_.begin();
    while (order_.size() > capacity_) {
        index_.erase(order_.back().id);
        order_.pop_back();
    }
    return id;
}

std::optional<SessionImage> ImageStore::lookup(const std::string& id) {
    std::lock_guard lock(mutex_);
    const auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    order_.splice(order_.begin(), order_, it->second);
    return *it->second;
}

bool ImageStore::set_mask(const std::string& id, std::shared_ptr<const std::vector<std::uint8_t>> png) {
    std::lock_guard lock(mutex_);
    const auto it = index_.find(id);
    if (it == index_.end()) return false;
    it->second->mask_png = std::move(png);
    return true;
}

std::size_t ImageStore::size() const {
    std::lock_guard lock(mutex_);
    return order_.size();
}

Service::Service(ServiceConfig config) : config_(std::move(config)), store_(config_.capacity) {}

HttpReply Service::upload(const std::string& body) {
    if (body.size() > config_.max_upload_bytes) return error_reply(413, "upload exceeds 64 MiB limit");
    const std::span bytes(reinterpret_cast<const std::uint8_t*>(body.data()), body.size());
    const auto format = detect_format(bytes);
    if (!format) return error_reply(400, "not a PGM (P5) or PNG image");
    GrayImage16 image;
    try {
        image = decode_image(bytes, *format);
    } catch (const Error& e) {
        return error_reply(400, e.what());
    }
    const std::size_t w = image.width();
    const std::size_t h = image.height();
    const std::string id = store_.insert(std::move(image));
    return json_reply(200, Json{{"id", id}, {"width", w}, {"height", h}});
}

HttpReply Service::segment(const std::string& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Json req;
    try {
        req = Json::parse(body);
    } catch (const nlohmann::json::parse_error&) {
        return error_reply(400, "request body is not valid JSON");
    }
    if (!req.is_object() || !req.contains("id") || !req.at("id").is_string()) {
        return error_reply(400, "request must be an object with a string 'id'");
    }
    for (const auto& item : req.items()) {
        if (item.key() != "id" && item.key() != "mode" && item.key() != "params") {
            return error_reply(400, "unknown request key '" + item.key() + "'");
        }
    }

    RunConfig cfg;
    try {
        if (req.contains("mode")) {
            if (!req.at("mode").is_string()) throw InvalidInput("'mode' must be a string");
            cfg.mode = parse_mode(req.at("mode").get<std::string>());
        }
        if (req.contains("params")) cfg = apply_overrides(cfg, req.at("params"));
    } catch (const Error& e) {
        return error_reply(400, e.what());
    }

    const std::string id = req.at("id").get<std::string>();
    const auto entry = store_.lookup(id);
    if (!entry) return error_reply(404, "unknown image id '" + id + "'");

    RunResult r;
    try {
        r = run_segmentation(*entry->original, cfg);
    } catch (const NoLoftFound& e) {
        Json j{{"error", e.what()}, {"mode", mode_name(cfg.mode)}, {"bounds", to_json(e.bounds())}};
        if (e.histogram()) j["histogram"] = downsample_histogram(*e.histogram(), std::nullopt);
        return json_reply(422, j);
    } catch (const InvalidInput& e) {
        return error_reply(400, e.what());
    } catch (const Error& e) {
        return error_reply(422, e.what());
    }

    auto png = std::make_shared<const std::vector<std::uint8_t>>(encode_image(mask_to_gray(r.mask), ImageFormat::Png16));
    if (!store_.set_mask(id, std::move(png))) return error_reply(404, "image '" + id + "' was evicted");

    Json res{{"id", id}, {"mode", mode_name(r.mode)}};
    const Json t = to_json(r.threshold);
    res["threshold"] = t.at("threshold");
    res["candidates"] = t.at("candidates");
    res["bounds"] = t.at("bounds");
    res["smoothing_window"] = t.at("smoothing_window");
    res["histogram"] = downsample_histogram(r.histogram, r.threshold.threshold);
    res["mask_url"] = "/api/results/" + id + "/mask.png";
    res["mask_pixels"] = count_set(r.mask);
    if (r.lesions) {
        const Json l = to_json(*r.lesions);
        res["components"] = l.at("components");
        res["min_area_applied"] = l.at("min_area_applied");
    }
    res["params"] = params_to_json(cfg, entry->original->width());
    const double total =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    res["timing_ms"] = {{"preprocess", whole_ms(r.preprocess_ms)},
                        {"segment", whole_ms(r.segment_ms)},
                        {"total", whole_ms(total)}};
    return json_reply(200, res);
}

HttpReply Service::mask_png(const std::string& id) {
    const auto entry = store_.lookup(id);
    if (!entry) return error_reply(404, "unknown image id '" + id + "'");
    if (!entry->mask_png) return error_reply(404, "no segmentation result for '" + id + "' yet");
    return {200, "image/png", std::string(entry->mask_png->begin(), entry->mask_png->end())};
}

HttpReply Service::health() const { return json_reply(200, Json{{"status", "ok"}, {"version", SPECTRAL_VERSION}}); }

void Service::mount(httplib::Server& server) {
    const auto send = [](httplib::Response& res, const HttpReply& r) {
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    server.set_payload_max_length(config_.max_upload_bytes);

    server.Post("/api/images", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, upload(req.body));
    });
    server.Post("/api/segment", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, segment(req.body));
    });
    server.Get(R"(/api/results/([0-9a-f]+)/mask\.png)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, mask_png(req.matches[1]));
    });
    server.Get("/api/health", [this, send](const httplib::Request&, httplib::Response& res) { send(res, health()); });

    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        // Keep bodies set by a handler; fill in JSON for routing-level errors.
        if (!res.body.empty()) return;
        if (res.status == 413) {
            res.set_content(Json{{"error", "upload exceeds 64 MiB limit"}}.dump(), "application/json");
        } else if (req.path.rfind("/api/", 0) == 0) {
            res.set_content(Json{{"error", "no such endpoint"}}.dump(), "application/json");
        }
    });

    bool mounted = false;
    if (config_.static_dir && std::filesystem::is_directory(*config_.static_dir)) {
        mounted = server.set_mount_point("/", config_.static_dir->string());
    }
    if (!mounted) {
        server.Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(kPlaceholderPage, "text/html");
        });
    }
}

}  // namespace spectral
