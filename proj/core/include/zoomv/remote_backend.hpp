#pragma once

#include <functional>
#include <string>
#include <vector>

#include "zoomv/backend.hpp"

namespace zoomv {

struct RemoteConfig {
    std::string endpoint;   // e.g. "http://host:8080/v1/generate"
    std::string model{"zoomv-lvlm"};
    std::string api_key;    // sent as a bearer token when non-empty
    int max_tokens{64};
    int max_attempts{3};
    int backoff_initial_ms{500};  // doubles per retry
    int timeout_s{120};
};

// Decoded wire response.
struct WireResponse {
    std::string text;
    std::vector<std::pair<std::string, double>> first_token_probs;
};

struct TransportResult {
    bool transport_ok{false};  // false: connection-level failure, retryable
    int status{0};
    std::string body;
};

// Request body for one call: the serialized prompt document plus model
// parameters. Byte-deterministic; golden files pin the encoding.
std::string encode_request(PromptSpec const& prompt, RemoteConfig const& config,
                           bool want_token_probs);

// Throws ProtocolError on malformed JSON or a missing "text" field.
WireResponse decode_response(std::string const& body);

// First-token mass of `token`, matched after trimming surrounding whitespace.
// Returns -1 when the token never appears.
double token_prob(WireResponse const& response, std::string_view token);

// JSON-over-HTTP client for a real LVLM serving stack. Transport and backoff
// sleep are injectable so failure handling is testable without sockets.
class RemoteBackend : public ModelBackend {
public:
    using Transport = std::function<TransportResult(std::string const& body)>;
    using Sleeper = std::function<void(int ms)>;

    explicit RemoteBackend(RemoteConfig config, Transport transport = {}, Sleeper sleeper = {});

    GroundingResult ground(PromptSpec const& prompt, SegmentInterval const& segment) override;

    // Requests first-token probabilities and extracts Yes/No or option-label
    // masses. Throws ProtocolDegraded when the endpoint reports none.
    Confidence reflect(PromptSpec const& prompt, SegmentInterval const& segment) override;

    std::string answer(PromptSpec const& prompt) override;

    // Attempts used by the most recent call (retry diagnostics).
    int last_attempts() const { return last_attempts_; }

    YesNoEstimator yesno_estimator{YesNoEstimator::pair_normalized};

private:
    WireResponse call(PromptSpec const& prompt, bool want_token_probs);

    RemoteConfig config_;
    Transport transport_;
    Sleeper sleeper_;
    int last_attempts_{0};
};

}  // namespace zoomv
