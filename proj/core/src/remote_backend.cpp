#include "zoomv/remote_backend.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace zoomv {

std::string encode_request(PromptSpec const& prompt, RemoteConfig const& config,
                           bool want_token_probs) {
    nlohmann::json doc = nlohmann::json::parse(serialize_prompt(prompt));
    doc["model"] = config.model;
    doc["want_token_probs"] = want_token_probs;
    doc["max_tokens"] = config.max_tokens;
    return doc.dump();
}

WireResponse decode_response(std::string const& body) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (nlohmann::json::exception const& e) {
        throw ProtocolError(std::string("response is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("text") || !doc["text"].is_string()) {
        throw ProtocolError("response lacks a text field");
    }
    WireResponse out;
    out.text = doc["text"].get<std::string>();
    if (doc.contains("first_token_probs") && doc["first_token_probs"].is_array()) {
        for (auto const& item : doc["first_token_probs"]) {
            if (!item.contains("token") || !item.contains("prob")) {
                throw ProtocolError("malformed first_token_probs entry");
            }
            out.first_token_probs.emplace_back(item["token"].get<std::string>(),
                                               item["prob"].get<double>());
        }
    }
    return out;
}

namespace {

std::string trim(std::string const& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Default transport: POST the body to the configured endpoint.
RemoteBackend::Transport make_http_transport(RemoteConfig const& config) {
    return [config](std::string const& body) -> TransportResult {
        std::string url = config.endpoint;
        std::string base = url;
        std::string path = "/";
        std::size_t scheme = url.find("://");
        std::size_t path_at = scheme == std::string::npos ? url.find('/')
                                                          : url.find('/', scheme + 3);
        if (path_at != std::string::npos) {
            base = url.substr(0, path_at);
            path = url.substr(path_at);
        }
        httplib::Client client(base);
        client.set_connection_timeout(config.timeout_s, 0);
        client.set_read_timeout(config.timeout_s, 0);
        httplib::Headers headers;
        if (!config.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + config.api_key);
        }
        auto res = client.Post(path, headers, body, "application/json");
        if (!res) {
            return TransportResult{false, 0, {}};
        }
        return TransportResult{true, res->status, res->body};
    };
}

}  // namespace

RemoteBackend::RemoteBackend(RemoteConfig config, Transport transport, Sleeper sleeper)
    : config_(std::move(config)),
      transport_(transport ? std::move(transport) : make_http_transport(config_)),
      sleeper_(sleeper ? std::move(sleeper) : [](int ms) {
          std::this_thread::sleep_for(std::chrono::milliseconds(ms));
      }) {}

WireResponse RemoteBackend::call(PromptSpec const& prompt, bool want_token_probs) {
    std::string body = encode_request(prompt, config_, want_token_probs);
    int backoff = config_.backoff_initial_ms;
    last_attempts_ = 0;
    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
        last_attempts_ = attempt;
        TransportResult res = transport_(body);
        if (res.transport_ok && res.status >= 200 && res.status < 300) {
            return decode_response(res.body);
        }
        bool transient = !res.transport_ok || res.status == 429 || res.status >= 500;
        if (!transient) {
            throw ProtocolError("endpoint rejected request with status " +
                                std::to_string(res.status));
        }
        if (attempt < config_.max_attempts) {
            sleeper_(backoff);
            backoff *= 2;
        }
    }
    throw BackendUnavailable("endpoint unreachable after " +
                             std::to_string(config_.max_attempts) + " attempts");
}

double token_prob(WireResponse const& response, std::string_view token) {
    for (auto const& [tok, prob] : response.first_token_probs) {
        if (trim(tok) == token) return prob;
    }
    return -1.0;
}

GroundingResult RemoteBackend::ground(PromptSpec const& prompt, SegmentInterval const& segment) {
    WireResponse res = call(prompt, false);
    return GroundingResult{res.text, parse_windows(res.text, segment)};
}

Confidence RemoteBackend::reflect(PromptSpec const& prompt, SegmentInterval const&) {
    WireResponse res = call(prompt, true);
    if (res.first_token_probs.empty()) {
        throw ProtocolDegraded("endpoint reported no first-token probabilities");
    }
    if (prompt.task == PromptTask::reflect_mc) {
        std::map<std::string, double> dist;
        for (PromptOption const& o : prompt.options) {
            double p = token_prob(res, o.label);
            if (p >= 0) dist[o.label] = p;
        }
        if (dist.empty()) {
            throw ProtocolDegraded("no option-label mass in first-token report");
        }
        return mc_confidence(dist);
    }
    double p_yes = token_prob(res, "Yes");
    double p_no = token_prob(res, "No");
    if (p_yes < 0 && p_no < 0) {
        throw ProtocolDegraded("no Yes/No mass in first-token report");
    }
    return yes_confidence(p_yes < 0 ? 0.0 : p_yes,
                          p_no < 0 ? std::nullopt : std::optional<double>(p_no),
                          yesno_estimator);
}

std::string RemoteBackend::answer(PromptSpec const& prompt) { return call(prompt, false).text; }

}  // namespace zoomv
