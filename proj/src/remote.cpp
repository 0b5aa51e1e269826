#include "debate_audit/remote.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace debate_audit::judge {

using nlohmann::json;

namespace {

class HttplibTransport : public HttpTransport {
public:
    explicit HttplibTransport(const RemoteConfig& config) : client_(config.base_url) {
        client_.set_connection_timeout(config.timeout_seconds);
        client_.set_read_timeout(config.timeout_seconds);
        client_.set_write_timeout(config.timeout_seconds);
    }

    HttpResponse post(const std::string& path, const std::string& body,
                      const std::string& bearer_token) override {
        httplib::Headers headers{{"Authorization", "Bearer " + bearer_token}};
        auto result = client_.Post(path, headers, body, "application/json");
        if (!result) {
            HttpResponse r;
            r.error = httplib::to_string(result.error());
            return r;
        }
        return {true, result->status, result->body, {}};
    }

private:
    httplib::Client client_;
};

bool retryable(const HttpResponse& r) {
    if (!r.transport_ok) return true;
    return r.status == 408 || r.status == 429 || r.status >= 500;
}

}  // namespace

std::unique_ptr<HttpTransport> make_httplib_transport(const RemoteConfig& config) {
    return std::make_unique<HttplibTransport>(config);
}

std::string chat_completions_payload(const RemoteConfig& config, const std::string& prompt_text) {
    json payload{{"model", config.model},
                 {"temperature", config.temperature},
                 {"messages", json::array({json{{"role", "user"}, {"content", prompt_text}}})}};
    return payload.dump();
}

std::string parse_chat_completions_response(const std::string& body) {
    try {
        json response = json::parse(body);
        return response.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw RemoteError(std::string("malformed chat-completions response: ") + e.what());
    }
}

RemoteJudge::RemoteJudge(RemoteConfig config, std::unique_ptr<HttpTransport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
    if (config_.temperature < 0.0) throw RemoteError("remote judge: negative temperature");
    if (config_.max_retries < 0) throw RemoteError("remote judge: negative max_retries");
    api_key_ = config_.api_key;
    if (api_key_.empty()) {
        const char* env = std::getenv(config_.api_key_env.c_str());
        if (env) api_key_ = env;
    }
    if (api_key_.empty())
        throw CredentialMissing("no credential: set " + config_.api_key_env +
                                " or the manifest's api_key");
    if (!transport_) transport_ = make_httplib_transport(config_);
}

std::string RemoteJudge::identity() const {
    return "remote:" + config_.model + ":" + config_.base_url + ":temp=" +
           std::to_string(config_.temperature);
}

EvalResult RemoteJudge::evaluate(const JudgeInput& input) {
    const std::string payload = chat_completions_payload(config_, input.prompt.text);
    auto start = std::chrono::steady_clock::now();

    HttpResponse last;
    int attempts = 0;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            ++retries_used_;
            auto delay = std::chrono::milliseconds(config_.backoff_initial_ms << (attempt - 1));
            std::this_thread::sleep_for(delay);
        }
        ++attempts;
        last = transport_->post(config_.path, payload, api_key_);
        if (last.transport_ok && last.status == 200) {
            auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start);
            return {parse_chat_completions_response(last.body), false, elapsed.count()};
        }
        if (!retryable(last)) break;
    }
    if (!last.transport_ok && (last.error.find("timed out") != std::string::npos ||
                               last.error.find("timeout") != std::string::npos))
        throw Timeout("remote judge timed out: " + last.error);
    throw RemoteFailure(last.status, attempts,
                        last.transport_ok ? last.body.substr(0, 200) : last.error);
}

}  // namespace debate_audit::judge
