#include "disimpact/annotation.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace disimpact {

using json = nlohmann::json;

namespace {

std::string lowered(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

bool contains_any(const std::string& haystack, std::initializer_list<std::string_view> needles) {
  return std::any_of(needles.begin(), needles.end(),
                     [&](std::string_view n) { return haystack.find(n) != std::string::npos; });
}

struct KeywordRule {
  ImpactCategory category;
  std::initializer_list<std::string_view> keywords;
};

// First matching rule wins; rules are checked in category-code order.
const std::array<KeywordRule, 10> kImpactRules = {{
    {ImpactCategory::CINJ, {"killed", "dead", "death", "died", "injur", "missing person", "bodies", "casualt"}},
    {ImpactCategory::EVAC, {"evacuat", "displaced", "fled ", "shelter"}},
    {ImpactCategory::INFR, {"power", "outage", "road", "bridge", "electricity", "collapsed", "building"}},
    {ImpactCategory::ENVD, {"smoke", "air quality", "contaminat", "erosion", "ecosystem", "crops", "wildlife"}},
    {ImpactCategory::RSRC, {"need water", "need food", "supplies", "running out", "shortage", "bottled water"}},
    {ImpactCategory::PUBH, {"mold", "disease", "outbreak", "hospital", "medication", "insulin", "infection"}},
    {ImpactCategory::EMOT, {"scared", "anxiety", "grief", "trauma", "heartbroken", "terrified", "crying"}},
    {ImpactCategory::BIAS, {"blame", "discriminat", "racis", "unfair", "ignored by", "politic"}},
    {ImpactCategory::ASST, {"donat", "volunteer", "relief", "recover", "rebuild", "red cross", "mutual aid"}},
    {ImpactCategory::SECO, {"insurance", "business", "job", "econom", "tourism", "rent", "lost income"}},
}};

// Characters that may wrap the Judgment key or value: ASCII quotes and the
// UTF-8 bytes of typographic quotes.
bool is_quote_byte(unsigned char ch) { return ch == '"' || ch == '\'' || ch == '`' || ch >= 0x80; }

std::string json_body_for_log(const ClassifierRequest& request) {
  return build_request_body(request, request.prompt_template_id);
}

}  // namespace

std::string_view template_id(ClassifierTask task) noexcept {
  switch (task) {
    case ClassifierTask::RelevanceHurricane: return "clean_hurricane";
    case ClassifierTask::RelevanceWildfire: return "clean_wildfire";
    case ClassifierTask::ImpactCategory: return "classify_impact";
  }
  return "classify_impact";
}

ClassifierRequest make_request(const Post& post, ClassifierTask task) {
  ClassifierRequest request{post, task, std::string(template_id(task))};
  request.post.text = scrub_handles(post.text);
  if (request.post.location_metadata) request.post.location_metadata = scrub_handles(*request.post.location_metadata);
  return request;
}

ClassifierResponse parse_response(std::string raw, ClassifierTask task) {
  const auto fail = [&](const std::string& why) -> ClassifierResponse {
    throw Error(ErrorCode::MalformedResponse, why + " in model reply: " + raw);
  };
  const auto key = raw.find("Judgment");
  if (key == std::string::npos) return fail("no Judgment field");
  std::size_t i = key + 8;
  while (i < raw.size() && (is_quote_byte(static_cast<unsigned char>(raw[i])) || std::isspace(static_cast<unsigned char>(raw[i])))) ++i;
  if (i >= raw.size() || raw[i] != ':') return fail("no ':' after Judgment");
  ++i;
  while (i < raw.size() && (is_quote_byte(static_cast<unsigned char>(raw[i])) || std::isspace(static_cast<unsigned char>(raw[i])))) ++i;
  std::size_t j = i;
  while (j < raw.size() && (std::isalnum(static_cast<unsigned char>(raw[j])) || raw[j] == '-' || raw[j] == '+')) ++j;
  const std::string token = raw.substr(i, j - i);
  // The value must end at a delimiter, not run into other characters.
  if (j < raw.size()) {
    const auto next = static_cast<unsigned char>(raw[j]);
    if (!(std::isspace(next) || next == ',' || next == '}' || is_quote_byte(next))) return fail("malformed Judgment value");
  }
  if (token.empty()) return fail("empty Judgment value");

  ClassifierResponse response;
  if (task == ClassifierTask::ImpactCategory) {
    if (!std::all_of(token.begin(), token.end(), [](unsigned char ch) { return std::isdigit(ch); }) || token.size() > 3) {
      return fail("Judgment is not an integer");
    }
    const int value = std::stoi(token);
    if (value < 1 || value > kCategoryCount) return fail("Judgment outside 1..11");
    response.judgment = static_cast<ImpactCategory>(value);
  } else {
    const auto l = lowered(token);
    if (l == "true") {
      response.judgment = true;
    } else if (l == "false") {
      response.judgment = false;
    } else {
      return fail("Judgment is not True/False");
    }
  }
  response.raw = std::move(raw);
  return response;
}

bool mock_relevance(std::string_view text, ClassifierTask task) {
  const auto t = lowered(text);
  if (task == ClassifierTask::RelevanceHurricane) {
    if (contains_any(t, {"miami hurricanes", "carolina hurricanes", "hurricanes win", "hurricanes game", "football",
                         "hockey", "wwe", "wrestl", "promo code", "discount", "typhoon", "cyclone"})) {
      return false;
    }
    return contains_any(t, {"hurricane", "helene", "milton", "francine", "storm surge", "landfall", "flood"});
  }
  if (task == ClassifierTask::RelevanceWildfire) {
    if (contains_any(t, {"like wildfire", "wildfire song", "wildfire movie", "australia", "greece", "hurricane",
                         "earthquake", "tornado", "promo code", "discount"})) {
      return false;
    }
    return contains_any(t, {"wildfire", "fire", "blaze", "smoke", "evacuat", "palisades", "eaton", "burn"});
  }
  return true;
}

ImpactCategory mock_impact(std::string_view text) {
  const auto t = lowered(text);
  for (const auto& rule : kImpactRules) {
    if (contains_any(t, rule.keywords)) return rule.category;
  }
  return ImpactCategory::OTHER;
}

std::string MockBackend::complete(const ClassifierRequest& request) {
  ++invocations_;
  {
    std::lock_guard lock(mutex_);
    log_.push_back(json_body_for_log(request));
  }
  if (request.task == ClassifierTask::ImpactCategory) {
    return "{\"Judgment\": " + std::to_string(code(mock_impact(request.post.text))) + "}";
  }
  return mock_relevance(request.post.text, request.task) ? "{\"Judgment\": True}" : "{\"Judgment\": False}";
}

std::vector<std::string> MockBackend::request_log() const {
  std::lock_guard lock(mutex_);
  return log_;
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir) {
  std::map<std::string, std::string, std::less<>> templates;
  for (auto task : {ClassifierTask::RelevanceHurricane, ClassifierTask::RelevanceWildfire, ClassifierTask::ImpactCategory}) {
    const std::string id(template_id(task));
    const auto path = dir / (id + ".txt");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::FileNotFound, "cannot open prompt template " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    templates.emplace(id, text.str());
  }
  return PromptLibrary(std::move(templates));
}

const std::string& PromptLibrary::get(std::string_view id) const {
  const auto it = templates_.find(id);
  if (it == templates_.end()) throw Error(ErrorCode::InvalidConfig, "no prompt template '" + std::string(id) + "'");
  return it->second;
}

std::string build_request_body(const ClassifierRequest& request, const std::string& prompt) {
  json post;
  post["id"] = request.post.id;
  post["platform"] = to_string(request.post.platform);
  post["text"] = request.post.text;
  post["media_refs"] = request.post.media_refs;
  json body;
  body["template_id"] = request.prompt_template_id;
  body["prompt"] = prompt;
  body["post"] = std::move(post);
  return body.dump();
}

void ClientPolicy::validate() const {
  if (max_in_flight < 1) throw Error(ErrorCode::InvalidConfig, "max_in_flight must be >= 1");
  if (max_retries < 0) throw Error(ErrorCode::InvalidConfig, "max_retries must be >= 0");
  if (backoff_base.count() < 0 || timeout.count() <= 0) throw Error(ErrorCode::InvalidConfig, "bad backoff/timeout");
}

ClassifierResponse classify(ClassifierBackend& backend, const ClassifierRequest& request, const ClientPolicy& policy) {
  policy.validate();
  for (int attempt = 0;; ++attempt) {
    try {
      return parse_response(backend.complete(request), request.task);
    } catch (const TransportError& e) {
      if (!e.retryable() || attempt >= policy.max_retries) throw;
    }
    std::this_thread::sleep_for(policy.backoff_base * (1LL << std::min(attempt, 16)));
  }
}

namespace {

std::optional<ClassifierTask> relevance_task(DisasterTag disaster) {
  switch (disaster) {
    case DisasterTag::Hurricane: return ClassifierTask::RelevanceHurricane;
    case DisasterTag::Wildfire: return ClassifierTask::RelevanceWildfire;
    case DisasterTag::Other: return std::nullopt;
  }
  return std::nullopt;
}

void require_content(const Post& post) {
  if (post.text.empty() && post.media_refs.empty()) {
    throw Error(ErrorCode::MalformedInput, "post '" + post.id + "' has neither text nor media");
  }
}

}  // namespace

bool classify_relevance(ClassifierBackend& backend, const Post& post, DisasterTag disaster, const ClientPolicy& policy) {
  require_content(post);
  const auto task = relevance_task(disaster);
  if (!task) return true;
  return std::get<bool>(classify(backend, make_request(post, *task), policy).judgment);
}

ImpactCategory classify_impact(ClassifierBackend& backend, const Post& post, const ClientPolicy& policy) {
  require_content(post);
  return std::get<ImpactCategory>(
      classify(backend, make_request(post, ClassifierTask::ImpactCategory), policy).judgment);
}

std::string cache_entry_to_json(const CacheEntry& entry) {
  nlohmann::ordered_json j;
  j["post_id"] = entry.post_id;
  j["relevant"] = entry.relevant;
  j["category_code"] = entry.category ? nlohmann::ordered_json(code(*entry.category)) : nlohmann::ordered_json(nullptr);
  j["raw"] = entry.raw;
  return j.dump();
}

CacheEntry cache_entry_from_json(std::string_view line) {
  try {
    const auto j = json::parse(line);
    CacheEntry entry;
    entry.post_id = j.at("post_id").get<std::string>();
    entry.relevant = j.at("relevant").get<bool>();
    if (const auto& c = j.at("category_code"); !c.is_null()) entry.category = category_from_code(c.get<int>());
    entry.raw = j.value("raw", std::string{});
    return entry;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedInput, std::string("bad cache line: ") + e.what());
  }
}

AnnotationCache AnnotationCache::load(const std::filesystem::path& path) {
  AnnotationCache cache;
  std::ifstream in(path);
  if (!in) return cache;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    cache.upsert(cache_entry_from_json(line));
  }
  return cache;
}

const CacheEntry* AnnotationCache::find(std::string_view post_id) const {
  const auto it = index_.find(std::string(post_id));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

void AnnotationCache::upsert(CacheEntry entry) {
  const auto [it, inserted] = index_.emplace(entry.post_id, entries_.size());
  if (inserted) {
    entries_.push_back(std::move(entry));
  } else {
    entries_[it->second] = std::move(entry);
  }
}

std::vector<CacheEntry> AnnotationCache::ordered(const std::vector<std::string>& order) const {
  std::vector<CacheEntry> out;
  std::vector<bool> taken(entries_.size(), false);
  for (const auto& id : order) {
    const auto it = index_.find(id);
    if (it == index_.end() || taken[it->second]) continue;
    taken[it->second] = true;
    out.push_back(entries_[it->second]);
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!taken[i]) out.push_back(entries_[i]);
  }
  return out;
}

void AnnotationCache::save(const std::filesystem::path& path, const std::vector<std::string>& order) const {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    for (const auto& e : ordered(order)) out << cache_entry_to_json(e) << '\n';
    if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

AnnotationResult annotate_dataset(const Dataset& dataset, ClassifierBackend& backend, const ClientPolicy& policy,
                                  const std::filesystem::path& cache_path, AnnotateOptions options) {
  policy.validate();
  AnnotationCache cache = AnnotationCache::load(cache_path);
  std::ofstream journal(cache_path, std::ios::binary | std::ios::app);
  if (!journal) throw Error(ErrorCode::Io, "cannot open cache " + cache_path.string());

  const auto n = dataset.posts.size();
  std::vector<std::optional<AnnotatedPost>> results(n);
  std::vector<std::optional<PostError>> errors(n);
  std::vector<char> hits(n, 0);  // not vector<bool>: workers write neighbouring slots
  std::mutex cache_mutex;
  std::atomic<std::size_t> next{0};
  const auto task = relevance_task(dataset.disaster_tag);

  const auto process = [&](std::size_t i) {
    const Post& post = dataset.posts[i];
    std::optional<CacheEntry> cached;
    {
      std::lock_guard lock(cache_mutex);
      if (const auto* e = cache.find(post.id)) cached = *e;
    }
    if (cached && (!cached->relevant || cached->category || options.relevance_only)) {
      results[i] = AnnotatedPost{post, cached->category.value_or(ImpactCategory::OTHER), cached->relevant};
      hits[i] = 1;
      return;
    }

    require_content(post);
    CacheEntry entry{post.id, true, std::nullopt, {}};
    if (cached) {
      entry.relevant = cached->relevant;
      entry.raw = cached->raw;
    } else if (options.check_relevance && task) {
      auto response = classify(backend, make_request(post, *task), policy);
      entry.relevant = std::get<bool>(response.judgment);
      entry.raw = std::move(response.raw);
    }
    if (entry.relevant && !options.relevance_only) {
      auto response = classify(backend, make_request(post, ClassifierTask::ImpactCategory), policy);
      entry.category = std::get<ImpactCategory>(response.judgment);
      entry.raw = std::move(response.raw);
    }
    results[i] = AnnotatedPost{post, entry.category.value_or(ImpactCategory::OTHER), entry.relevant};

    std::lock_guard lock(cache_mutex);
    journal << cache_entry_to_json(entry) << '\n' << std::flush;
    cache.upsert(std::move(entry));
  };

  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        process(i);
      } catch (const Error& e) {
        errors[i] = PostError{dataset.posts[i].id, e.code(), e.what()};
      } catch (const std::exception& e) {
        errors[i] = PostError{dataset.posts[i].id, ErrorCode::Io, e.what()};
      }
    }
  };

  {
    const auto threads = std::min(policy.max_in_flight, std::max<std::size_t>(n, 1));
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  journal.close();

  std::vector<std::string> order;
  order.reserve(n);
  for (const auto& p : dataset.posts) order.push_back(p.id);
  cache.save(cache_path, order);

  AnnotationResult result;
  for (std::size_t i = 0; i < n; ++i) {
    if (results[i]) result.annotations.push_back(std::move(*results[i]));
    if (errors[i]) result.errors.push_back(std::move(*errors[i]));
    if (hits[i]) ++result.cache_hits;
  }
  return result;
}

}  // namespace disimpact
