#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "spectral/pipeline.hpp"

namespace httplib {
class Server;
}

namespace spectral {

struct SessionImage {
    std::string id;
    std::shared_ptr<const GrayImage16> original;
    std::chrono::system_clock::time_point uploaded_at;
    /// PNG bytes of the most recent segmentation, if any.
    std::shared_ptr<const std::vector<std::uint8_t>> mask_png;
};

/// In-memory LRU store. Every method takes the lock for a short, constant
/// amount of work; image data is shared immutably with callers.
class ImageStore {
public:
    explicit ImageStore(std::size_t capacity = 32);

    /// Inserts and returns the new id, evicting the least recently used
    /// entry when full.
    std::string insert(GrayImage16 image);
    /// Copy of the entry (refreshing its recency), or nullopt.
    std::optional<SessionImage> lookup(const std::string& id);
    /// Attaches a mask; returns false if the id has been evicted meanwhile.
    bool set_mask(const std::string& id, std::shared_ptr<const std::vector<std::uint8_t>> png);

    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }

private:
    std::string next_id();

    std::size_t capacity_;
    mutable std::mutex mutex_;
    std::list<SessionImage> order_;  ///< most recent first
    std::unordered_map<std::string, std::list<SessionImage>::iterator> index_;
    std::uint64_t counter_ = 0;
    std::uint64_t salt_;
};

struct ServiceConfig {
    std::size_t capacity = 32;
    std::size_t max_upload_bytes = std::size_t{64} << 20;
    /// Directory served at "/"; a small placeholder page is served when unset
    /// or missing.
    std::optional<std::filesystem::path> static_dir;
};

struct HttpReply {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

/// Transport-independent request handlers plus their HTTP routing.
class Service {
public:
    explicit Service(ServiceConfig config = {});

    HttpReply upload(const std::string& body);
    HttpReply segment(const std::string& body);
    HttpReply mask_png(const std::string& id);
    HttpReply health() const;

    /// Registers the API routes and the static mount on `server`.
    void mount(httplib::Server& server);

    ImageStore& store() noexcept { return store_; }

private:
    ServiceConfig config_;
    ImageStore store_;
};

}  // namespace spectral
