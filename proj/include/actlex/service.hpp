#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "actlex/engine.hpp"

namespace httplib {
class Server;
}

namespace actlex {

struct HttpResponse {
    int status = 200;
    std::string body;
};

/// JSON API over a SessionStore. Routes can be driven in-process through
/// `handle` (used by tests and by the HTTP server itself).
class Service {
public:
    explicit Service(std::shared_ptr<const EngineResources> resources,
                     std::optional<std::filesystem::path> state_dir = std::nullopt);
    ~Service();

    HttpResponse handle(const std::string& method, const std::string& path, const std::string& body = {},
                        const std::string& query = {});

    // Blocks until stop(). Returns false if the port could not be bound.
    bool listen(const std::string& host, int port);
    // Binds an ephemeral port and returns it; serve with listen_after_bind().
    int bind_any_port(const std::string& host);
    bool listen_after_bind();
    void stop();

    SessionStore& sessions() { return store_; }

private:
    void install_routes();

    std::shared_ptr<const EngineResources> resources_;
    SessionStore store_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace actlex
