#include "actlex/service.hpp"

#include <httplib.h>

#include <regex>

#include "actlex/errors.hpp"

namespace actlex {

using nlohmann::json;

namespace {

HttpResponse json_response(int status, const json& body) { return {status, body.dump()}; }

HttpResponse error_response(int status, const std::string& code, const std::string& message) {
    return json_response(status, {{"code", code}, {"message", message}});
}

json parse_body(const std::string& body) {
    if (body.empty()) return json::object();
    try {
        json j = json::parse(body);
        if (!j.is_object()) throw ParseError("request body must be a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON body: ") + e.what());
    }
}

std::string required_string(const json& body, const char* key) {
    auto it = body.find(key);
    if (it == body.end() || !it->is_string()) throw InvalidInputError(std::string("missing string field '") + key + "'");
    return it->get<std::string>();
}

PartySpec party_from_body(const json& body, const char* key) {
    auto it = body.find(key);
    if (it == body.end()) throw InvalidInputError(std::string("missing field '") + key + "'");
    PartySpec p;
    if (it->is_string()) {
        p.identity = it->get<std::string>();
        return p;
    }
    if (!it->is_object()) throw InvalidInputError(std::string("field '") + key + "' must be an object");
    p.identity = required_string(*it, "identity");
    if (auto m = it->find("modifier"); m != it->end() && m->is_string() && !m->get<std::string>().empty()) {
        p.modifier = m->get<std::string>();
    }
    return p;
}

std::string query_param(const std::string& query, const std::string& key) {
    std::size_t pos = 0;
    while (pos <= query.size()) {
        const auto amp = query.find('&', pos);
        const auto part = query.substr(pos, amp == std::string::npos ? std::string::npos : amp - pos);
        const auto eq = part.find('=');
        if (part.substr(0, eq) == key) return eq == std::string::npos ? "" : httplib::detail::decode_url(part.substr(eq + 1), true);
        if (amp == std::string::npos) break;
        pos = amp + 1;
    }
    return {};
}

}  // namespace

Service::Service(std::shared_ptr<const EngineResources> resources, std::optional<std::filesystem::path> state_dir)
    : resources_(resources), store_(resources, std::move(state_dir)), server_(std::make_unique<httplib::Server>()) {
    install_routes();
}

Service::~Service() = default;

HttpResponse Service::handle(const std::string& method, const std::string& path, const std::string& body,
                             const std::string& query) {
    static const std::regex session_re(R"(^/api/sessions/([^/]+)(/(events|preview|suggest))?$)");
    try {
        const auto& res = *resources_;
        if (path == "/api/health" && method == "GET") return json_response(200, {{"status", "ok"}});

        if (path == "/api/dictionary" && method == "GET") {
            const std::string cat = query_param(query, "category");
            json out = json::array();
            for (const auto& [key, e] : res.lexicon) {
                if (!cat.empty() && e.category != parse_category(cat)) continue;
                out.push_back({{"term", e.term},
                               {"category", to_string(e.category)},
                               {"E", e.epa.e},
                               {"P", e.epa.p},
                               {"A", e.epa.a}});
            }
            return json_response(200, out);
        }

        if (path == "/api/coefficients" && method == "GET") {
            json out = json::array();
            for (const auto& [id, _] : res.coefficient_sets) out.push_back(id);
            return json_response(200, {{"default", res.default_coefficients}, {"sets", out}});
        }

        if (path == "/api/sessions" && method == "POST") {
            const json b = parse_body(body);
            const std::string coeff = b.contains("coefficients") ? required_string(b, "coefficients") : std::string{};
            const Session s = store_.create(party_from_body(b, "actor"), party_from_body(b, "object"), coeff);
            return json_response(201, to_json(s));
        }
        if (path == "/api/sessions" && method == "GET") return json_response(200, store_.ids());

        if (path == "/api/estimate" && method == "POST") {
            const json b = parse_body(body);
            const std::string term = required_string(b, "term");
            const Category cat = parse_category(required_string(b, "category"));
            ExpansionOptions opts;
            if (b.contains("n")) {
                if (!b["n"].is_number_integer() || b["n"].get<long long>() <= 0) {
                    throw InvalidInputError("'n' must be a positive integer");
                }
                opts.n_events = b["n"].get<std::size_t>();
            }
            opts.seed = b.contains("seed") ? b["seed"].get<std::uint64_t>() : res.estimate_seed;
            if (!res.head) throw DependencyError("no regression head loaded; start the service with --model");
            if (!res.embeddings) throw DependencyError("no embedding provider loaded; start the service with --embeddings");
            if (!res.context) throw DependencyError("no corpus context available for pinned sampling");
            const auto dist = pin_and_estimate(term, cat, *res.context, *res.head, *res.embeddings, opts);
            return json_response(200, to_json(dist));
        }

        std::smatch m;
        if (std::regex_match(path, m, session_re)) {
            const std::string id = m[1];
            const std::string action = m[3];
            if (action.empty()) {
                if (method == "GET") return json_response(200, to_json(store_.get(id)));
                if (method == "DELETE") {
                    if (!store_.erase(id)) throw NotFoundError("unknown session '" + id + "'");
                    return {204, {}};
                }
            } else if (method == "POST") {
                const json b = parse_body(body);
                const Side side = parse_side(required_string(b, "side"));
                if (action == "events") {
                    return json_response(200, to_json(store_.apply_event(id, side, required_string(b, "behavior_term"))));
                }
                if (action == "preview") {
                    const double before = store_.get(id).state.current_deflection();
                    const SimulationState next = store_.preview(id, side, required_string(b, "behavior_term"));
                    return json_response(200, {{"state", to_json(next)},
                                               {"deflection_delta", next.current_deflection() - before}});
                }
                std::size_t k = 5;
                if (b.contains("k")) {
                    if (!b["k"].is_number_integer() || b["k"].get<long long>() < 0) {
                        throw InvalidInputError("'k' must be a non-negative integer");
                    }
                    k = b["k"].get<std::size_t>();
                }
                return json_response(200, to_json(store_.suggest(id, side, k)));
            }
            return error_response(405, "method_not_allowed", method + " " + path);
        }
        return error_response(404, "not_found", "no route for " + method + " " + path);
    } catch (const NotFoundError& e) {
        return error_response(404, "not_found", e.what());
    } catch (const DependencyError& e) {
        return error_response(424, "dependency", e.what());
    } catch (const ConflictError& e) {
        return error_response(409, "conflict", e.what());
    } catch (const CategoryError& e) {
        return error_response(400, "category", e.what());
    } catch (const ParseError& e) {
        return error_response(400, "parse", e.what());
    } catch (const Error& e) {
        return error_response(400, "invalid_input", e.what());
    } catch (const json::exception& e) {
        return error_response(400, "invalid_input", e.what());
    } catch (const std::exception& e) {
        return error_response(500, "internal", e.what());
    }
}

void Service::install_routes() {
    auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
        std::string query;
        if (auto q = req.target.find('?'); q != std::string::npos) query = req.target.substr(q + 1);
        const HttpResponse r = handle(req.method, req.path, req.body, query);
        res.status = r.status;
        if (!r.body.empty()) res.set_content(r.body, "application/json");
        res.set_header("Access-Control-Allow-Origin", "*");
    };
    const std::string any = R"(/api/.*)";
    server_->Get(any, dispatch);
    server_->Post(any, dispatch);
    server_->Delete(any, dispatch);
    server_->Options(any, [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
}

bool Service::listen(const std::string& host, int port) { return server_->listen(host, port); }

int Service::bind_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool Service::listen_after_bind() { return server_->listen_after_bind(); }

void Service::stop() { server_->stop(); }

}  // namespace actlex
