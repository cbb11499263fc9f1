#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "disimpact/core.hpp"
#include "disimpact/error.hpp"
#include "disimpact/ingestion.hpp"

namespace disimpact {

enum class ClassifierTask : std::uint8_t { RelevanceHurricane, RelevanceWildfire, ImpactCategory };

/// "clean_hurricane", "clean_wildfire" or "classify_impact"; also the prompt
/// file stem under prompts/.
std::string_view template_id(ClassifierTask task) noexcept;

struct ClassifierRequest {
  /// Text already privacy-scrubbed.
  Post post;
  ClassifierTask task{ClassifierTask::ImpactCategory};
  std::string prompt_template_id;
};

/// Builds a request, scrubbing handles from the post text.
ClassifierRequest make_request(const Post& post, ClassifierTask task);

struct ClassifierResponse {
  /// bool for relevance tasks, category for the impact task.
  std::variant<bool, ImpactCategory> judgment;
  std::string raw;
};

/// Extracts the judgment from a model reply such as {"Judgment": True} or
/// {"Judgment": 7}. Impact codes outside 1..11 are rejected. Throws
/// Error(MalformedResponse).
ClassifierResponse parse_response(std::string raw, ClassifierTask task);

/// A classifier that turns one request into the model's raw reply.
/// Implementations must be safe to call from several threads at once.
class ClassifierBackend {
 public:
  virtual ~ClassifierBackend() = default;
  /// Throws TransportError on transport or rate-limit failure.
  virtual std::string complete(const ClassifierRequest& request) = 0;
};

/// Offline keyword classifier. Deterministic; records every request body it
/// receives so tests can inspect outbound traffic.
class MockBackend : public ClassifierBackend {
 public:
  std::string complete(const ClassifierRequest& request) override;

  std::size_t invocations() const noexcept { return invocations_.load(); }
  std::vector<std::string> request_log() const;

 private:
  std::atomic<std::size_t> invocations_{0};
  mutable std::mutex mutex_;
  std::vector<std::string> log_;
};

/// Keyword rules behind MockBackend, exposed for documentation and tests.
bool mock_relevance(std::string_view text, ClassifierTask task);
ImpactCategory mock_impact(std::string_view text);

/// Prompt template texts keyed by template id.
class PromptLibrary {
 public:
  PromptLibrary() = default;
  explicit PromptLibrary(std::map<std::string, std::string, std::less<>> templates) : templates_(std::move(templates)) {}

  /// Reads clean_hurricane.txt, clean_wildfire.txt and classify_impact.txt
  /// from `dir`. Throws Error(FileNotFound).
  static PromptLibrary load(const std::filesystem::path& dir);

  const std::string& get(std::string_view id) const;

 private:
  std::map<std::string, std::string, std::less<>> templates_;
};

/// JSON body sent to the remote endpoint:
/// {"template_id", "prompt", "post": {"id", "platform", "text", "media_refs"}}.
std::string build_request_body(const ClassifierRequest& request, const std::string& prompt);

struct RemoteConfig {
  /// scheme://host[:port]
  std::string base_url;
  std::string path{"/v1/classify"};
  std::string api_key;
  std::chrono::milliseconds timeout{30000};
};

/// Generic JSON-over-HTTP classifier. POSTs build_request_body() with a
/// bearer token; a 200 reply body is the model's raw text. Connection
/// failures, timeouts, 429 and 5xx are retryable; other statuses are not.
class RemoteBackend : public ClassifierBackend {
 public:
  RemoteBackend(RemoteConfig config, PromptLibrary prompts);

  /// Reads the API key from DISIMPACT_MLLM_API_KEY. Throws Error(InvalidConfig) if unset.
  static RemoteBackend from_env(std::string base_url, PromptLibrary prompts,
                                std::chrono::milliseconds timeout = std::chrono::milliseconds{30000});

  std::string complete(const ClassifierRequest& request) override;

 private:
  RemoteConfig config_;
  PromptLibrary prompts_;
};

struct ClientPolicy {
  std::size_t max_in_flight{4};
  int max_retries{3};
  std::chrono::milliseconds backoff_base{200};
  std::chrono::milliseconds timeout{30000};

  void validate() const;
};

/// Sends `request`, retrying retryable TransportErrors up to
/// policy.max_retries times with exponential backoff, then parses.
ClassifierResponse classify(ClassifierBackend& backend, const ClassifierRequest& request,
                            const ClientPolicy& policy);

/// Relevance judgment for the given disaster. Posts need text or media.
/// DisasterTag::Other has no cleaning prompt; such posts are relevant
/// without a backend call.
bool classify_relevance(ClassifierBackend& backend, const Post& post, DisasterTag disaster,
                        const ClientPolicy& policy = {});

ImpactCategory classify_impact(ClassifierBackend& backend, const Post& post, const ClientPolicy& policy = {});

struct CacheEntry {
  std::string post_id;
  bool relevant{false};
  std::optional<ImpactCategory> category;
  std::string raw;

  bool operator==(const CacheEntry&) const = default;
};

/// JSONL store of stage-one results keyed by post id. Later lines for the
/// same id replace earlier ones.
class AnnotationCache {
 public:
  AnnotationCache() = default;

  /// Missing file means an empty cache.
  static AnnotationCache load(const std::filesystem::path& path);

  const CacheEntry* find(std::string_view post_id) const;
  void upsert(CacheEntry entry);
  std::size_t size() const noexcept { return entries_.size(); }

  /// Entries for `order` ids first (in that order), then the rest in
  /// insertion order.
  std::vector<CacheEntry> ordered(const std::vector<std::string>& order) const;

  /// Atomically rewrites `path` with ordered(order).
  void save(const std::filesystem::path& path, const std::vector<std::string>& order) const;

 private:
  std::vector<CacheEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

std::string cache_entry_to_json(const CacheEntry& entry);
CacheEntry cache_entry_from_json(std::string_view line);

struct PostError {
  std::string post_id;
  ErrorCode code{ErrorCode::TransportError};
  std::string message;
};

struct AnnotateOptions {
  /// When false, posts are assumed already relevance-filtered.
  bool check_relevance{true};
  /// Stop after the relevance judgment (the cleaning step).
  bool relevance_only{false};
};

struct AnnotationResult {
  /// One entry per successfully processed post, in dataset order.
  /// Irrelevant posts carry relevant=false and category OTHER.
  std::vector<AnnotatedPost> annotations;
  std::vector<PostError> errors;
  std::size_t cache_hits{0};
};

/// Runs stage one over a dataset with up to policy.max_in_flight concurrent
/// requests. Results are cached at `cache_path`; cached posts cost no
/// backend calls. A failing post is reported in `errors` and the rest
/// continue.
AnnotationResult annotate_dataset(const Dataset& dataset, ClassifierBackend& backend, const ClientPolicy& policy,
                                  const std::filesystem::path& cache_path, AnnotateOptions options = {});

}  // namespace disimpact
