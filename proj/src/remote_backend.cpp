#include <cstdlib>

#include <httplib.h>

#include "disimpact/annotation.hpp"

namespace disimpact {

RemoteBackend::RemoteBackend(RemoteConfig config, PromptLibrary prompts)
    : config_(std::move(config)), prompts_(std::move(prompts)) {
  if (config_.base_url.empty()) throw Error(ErrorCode::InvalidConfig, "remote backend needs a base URL");
  if (config_.api_key.empty()) throw Error(ErrorCode::InvalidConfig, "remote backend needs an API key");
}

RemoteBackend RemoteBackend::from_env(std::string base_url, PromptLibrary prompts, std::chrono::milliseconds timeout) {
  const char* key = std::getenv("DISIMPACT_MLLM_API_KEY");
  if (key == nullptr || *key == '\0') {
    throw Error(ErrorCode::InvalidConfig, "DISIMPACT_MLLM_API_KEY is not set");
  }
  return RemoteBackend(RemoteConfig{std::move(base_url), "/v1/classify", key, timeout}, std::move(prompts));
}

std::string RemoteBackend::complete(const ClassifierRequest& request) {
  const auto body = build_request_body(request, prompts_.get(request.prompt_template_id));

  // One client per call keeps the backend safe to share across threads.
  httplib::Client client(config_.base_url);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  client.set_bearer_token_auth(config_.api_key);

  const auto res = client.Post(config_.path, body, "application/json");
  if (!res) {
    throw TransportError("request for post '" + request.post.id + "' failed: " + httplib::to_string(res.error()),
                         true);
  }
  if (res->status == 200) return res->body;
  const bool retryable = res->status == 429 || res->status >= 500;
  throw TransportError("request for post '" + request.post.id + "' returned HTTP " + std::to_string(res->status),
                       retryable);
}

}  // namespace disimpact
