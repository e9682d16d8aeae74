#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>

#include "spectral/service.hpp"

namespace {

struct Endpoint {
    std::string host;
    int port = 0;
};

Endpoint parse_listen(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos) throw spectral::InvalidInput("--listen expects HOST:PORT, got '" + text + "'");
    Endpoint e{text.substr(0, colon), 0};
    try {
        std::size_t used = 0;
        e.port = std::stoi(text.substr(colon + 1), &used);
        if (used != text.size() - colon - 1 || e.port < 0 || e.port > 65535) throw std::out_of_range("port");
    } catch (const std::exception&) {
        throw spectral::InvalidInput("invalid port in '" + text + "'");
    }
    if (e.host.empty()) e.host = "0.0.0.0";
    return e;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HTTP service for spectral-loft segmentation", "spectral-server"};
    app.set_version_flag("--version", SPECTRAL_VERSION);
    std::string listen = "127.0.0.1:8080";
    std::string static_dir = "webui/dist";
    std::size_t capacity = 32;
    auto* listen_opt = app.add_option("--listen", listen, "HOST:PORT to bind (env SPECTRAL_LISTEN)")->capture_default_str();
    app.add_option("--static-dir", static_dir, "Built web console served at /")->capture_default_str();
    app.add_option("--capacity", capacity, "Images kept in memory (LRU)")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    if (listen_opt->count() == 0) {
        if (const char* env = std::getenv("SPECTRAL_LISTEN"); env && *env) listen = env;
    }

    try {
        const Endpoint ep = parse_listen(listen);
        spectral::ServiceConfig cfg;
        cfg.capacity = capacity;
        cfg.static_dir = static_dir;
        spectral::Service service(cfg);
        httplib::Server server;
        service.mount(server);
        const int port = ep.port == 0 ? server.bind_to_any_port(ep.host) : (server.bind_to_port(ep.host, ep.port) ? ep.port : -1);
        if (port < 0) {
            std::cerr << "error: cannot bind " << listen << "\n";
            return 1;
        }
        std::cout << "listening on http://" << ep.host << ":" << port << std::endl;
        return server.listen_after_bind() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
