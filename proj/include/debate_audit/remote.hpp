#pragma once

#include <memory>
#include <string>
#include <vector>

#include "debate_audit/judge.hpp"

namespace debate_audit::judge {

class CredentialMissing : public RemoteError {
public:
    using RemoteError::RemoteError;
};

class RemoteFailure : public RemoteError {
public:
    RemoteFailure(int status, int attempts, const std::string& detail)
        : RemoteError("remote judge failed after " + std::to_string(attempts) +
                      " attempt(s), last status " + std::to_string(status) + ": " + detail),
          status(status),
          attempts(attempts) {}

    int status;
    int attempts;
};

class Timeout : public RemoteError {
public:
    using RemoteError::RemoteError;
};

struct RemoteConfig {
    std::string base_url = "https://api.openai.com";
    std::string path = "/v1/chat/completions";
    std::string model = "gpt-3.5-turbo-1106";
    double temperature = 0.0;
    int max_retries = 3;
    int timeout_seconds = 60;
    long backoff_initial_ms = 500;  // doubled per retry
    std::string api_key_env = "OPENAI_API_KEY";
    std::string api_key;  // normally taken from the environment variable
};

struct HttpResponse {
    bool transport_ok = false;  // false: connection/timeout level failure
    int status = 0;
    std::string body;
    std::string error;
};

/// Minimal POST transport so the retry logic is testable without sockets.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse post(const std::string& path, const std::string& body,
                              const std::string& bearer_token) = 0;
};

/// cpp-httplib transport bound to config.base_url.
std::unique_ptr<HttpTransport> make_httplib_transport(const RemoteConfig& config);

/// Chat-completions judge: one user message per prompt, deterministic
/// settings, exponential backoff on 408/429/5xx and transport failures.
class RemoteJudge : public Judge {
public:
    /// Resolves the credential from config.api_key or the named environment
    /// variable; throws CredentialMissing when neither is set.
    RemoteJudge(RemoteConfig config, std::unique_ptr<HttpTransport> transport = nullptr);

    EvalResult evaluate(const JudgeInput& input) override;
    std::string identity() const override;

    int retries_used() const { return retries_used_; }

private:
    RemoteConfig config_;
    std::unique_ptr<HttpTransport> transport_;
    std::string api_key_;
    int retries_used_ = 0;
};

/// Request payload for one prompt, exposed for wire-format tests.
std::string chat_completions_payload(const RemoteConfig& config, const std::string& prompt_text);

/// Extracts choices[0].message.content; throws RemoteError on malformed bodies.
std::string parse_chat_completions_response(const std::string& body);

}  // namespace debate_audit::judge
