// disimpact command-line driver.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "disimpact/agreement.hpp"
#include "disimpact/annotation.hpp"
#include "disimpact/chart.hpp"
#include "disimpact/csv.hpp"
#include "disimpact/export.hpp"
#include "disimpact/impact_index.hpp"
#include "disimpact/ingestion.hpp"
#include "disimpact/manifest.hpp"
#include "disimpact/run_config.hpp"
#include "disimpact/spatial.hpp"
#include "disimpact/time.hpp"
#include "disimpact/validation.hpp"
#include "disimpact/windowing.hpp"

namespace fs = std::filesystem;
using namespace disimpact;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitIo = 2;
constexpr int kExitBackend = 3;

struct GlobalOptions {
  std::string config_path;
  std::string out_dir{"."};
  std::uint64_t seed{0};
  std::string backend{"mock"};
  std::string endpoint;
  std::string prompts_dir{"prompts"};
  std::size_t max_in_flight{4};
  int max_retries{3};
  int timeout_ms{30000};
  std::map<std::string, std::string> overrides;
};

// Output files are written under temporary names and renamed together once the
// command succeeds; anything not committed is removed.
class OutputStage {
 public:
  explicit OutputStage(fs::path dir) : dir_(std::move(dir)) {}
  OutputStage(const OutputStage&) = delete;
  OutputStage& operator=(const OutputStage&) = delete;

  ~OutputStage() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : files_) fs::remove(f.tmp, ec);
  }

  void add(const std::string& name, const std::string& content) {
    fs::create_directories(dir_);
    const auto tmp = dir_ / (name + ".partial");
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    files_.push_back({name, tmp, sha256_hex(content)});
    out << content;
    if (!out.flush()) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }

  void commit(RunManifest manifest) {
    for (const auto& f : files_) manifest.outputs.push_back({f.name, f.sha256});
    add("manifest_" + manifest.command + ".json", manifest_json(manifest));
    for (const auto& f : files_) fs::rename(f.tmp, dir_ / f.name);
    committed_ = true;
  }

  fs::path path_of(const std::string& name) const { return dir_ / name; }

 private:
  struct File {
    std::string name;
    fs::path tmp;
    std::string sha256;
  };
  fs::path dir_;
  std::vector<File> files_;
  bool committed_{false};
};

struct Context {
  GlobalOptions opts;
  RunConfig config;
  RunManifest manifest;

  void input(const std::string& path) { manifest.inputs.push_back({path, sha256_file(path)}); }
};

Context make_context(const GlobalOptions& opts, const std::string& command) {
  Context ctx;
  ctx.opts = opts;
  if (!opts.config_path.empty()) ctx.config = load_run_config(opts.config_path);
  for (const auto& [key, value] : opts.overrides) ctx.config.set(key, value);
  ctx.config.validate();
  ctx.manifest.version = DISIMPACT_VERSION;
  ctx.manifest.command = command;
  ctx.manifest.config = ctx.config.snapshot();
  ctx.manifest.config["backend"] = opts.backend;
  ctx.manifest.config["seed"] = std::to_string(opts.seed);
  if (!opts.config_path.empty()) ctx.input(opts.config_path);
  return ctx;
}

DisasterTag parse_disaster(const std::string& s) {
  const auto d = disaster_from_string(s);
  if (!d) throw Error(ErrorCode::InvalidConfig, "unknown disaster '" + s + "' (hurricane|wildfire|other)");
  return *d;
}

std::unique_ptr<ClassifierBackend> make_backend(const GlobalOptions& opts) {
  if (opts.backend == "mock") return std::make_unique<MockBackend>();
  if (opts.backend == "remote") {
    if (opts.endpoint.empty()) throw Error(ErrorCode::InvalidConfig, "--backend remote needs --endpoint");
    return std::make_unique<RemoteBackend>(RemoteBackend::from_env(
        opts.endpoint, PromptLibrary::load(opts.prompts_dir), std::chrono::milliseconds{opts.timeout_ms}));
  }
  throw Error(ErrorCode::InvalidConfig, "unknown backend '" + opts.backend + "' (mock|remote)");
}

ClientPolicy make_policy(const GlobalOptions& opts) {
  ClientPolicy policy;
  policy.max_in_flight = opts.max_in_flight;
  policy.max_retries = opts.max_retries;
  policy.timeout = std::chrono::milliseconds{opts.timeout_ms};
  policy.validate();
  return policy;
}

Dataset load_dataset(Context& ctx, const std::string& path, DisasterTag disaster) {
  ctx.input(path);
  auto load = load_posts(path, disaster);
  for (const auto& m : load.report.malformed) {
    std::cerr << "warning: " << path << ":" << m.line_number << ": " << m.message << "\n";
  }
  if (load.report.dropped_duplicate > 0) {
    std::cerr << "warning: " << load.report.dropped_duplicate << " duplicate post id(s) dropped\n";
  }
  return std::move(load.dataset);
}

// Stage-one failures: a post that ran out of retries makes the whole
// command fail with the backend exit code; other per-post errors are warnings.
void check_post_errors(const AnnotationResult& result) {
  bool exhausted = false;
  for (const auto& e : result.errors) {
    std::cerr << (e.code == ErrorCode::TransportError ? "error: " : "warning: ") << "post " << e.post_id << ": "
              << e.message << "\n";
    exhausted = exhausted || e.code == ErrorCode::TransportError;
  }
  if (exhausted) throw TransportError("backend retries exhausted for one or more posts", false);
}

fs::path cache_path(const Context& ctx, const std::string& flag) {
  if (!flag.empty()) return flag;
  fs::create_directories(ctx.opts.out_dir);
  return fs::path(ctx.opts.out_dir) / "cache.jsonl";
}

std::string ratio_summary(std::size_t kept, std::size_t total) {
  std::string s = std::to_string(kept) + "/" + std::to_string(total);
  if (total > 0) {
    s += " (" + std::to_string(std::lround(100.0 * static_cast<double>(kept) / static_cast<double>(total))) + "%)";
  }
  return s;
}

std::vector<AnnotatedPost> labelled_posts(Context& ctx, const std::string& posts_path, const std::string& labels_path) {
  const auto dataset = load_dataset(ctx, posts_path, DisasterTag::Other);
  ctx.input(labels_path);
  auto join = load_labels(labels_path, dataset);
  if (!join.unlabeled.empty()) {
    std::cerr << "warning: " << join.unlabeled.size() << " post(s) have no label and are not counted\n";
  }
  return std::move(join.annotated);
}

CountSeries counts_from_posts(const std::vector<AnnotatedPost>& posts, IndexConfig config) {
  std::vector<AnnotatedPost> relevant;
  for (const auto& p : posts) {
    if (p.relevant) relevant.push_back(p);
  }
  config.window_anchor = resolve_anchor(config, relevant);
  const auto range = covering_range(relevant, *config.window_anchor, config.window_days);
  auto build = build_count_series(relevant, config, range);
  if (build.outside_range > 0) {
    std::cerr << "warning: " << build.outside_range << " post(s) fall outside the analysis range and are not counted\n";
  }
  return std::move(build.series);
}

// clean -----------------------------------------------------------------------

struct CleanArgs {
  std::string in;
  std::string disaster{"hurricane"};
  std::string cache;
};

int run_clean(const GlobalOptions& g, const CleanArgs& a) {
  auto ctx = make_context(g, "clean");
  const auto disaster = parse_disaster(a.disaster);
  const auto dataset = load_dataset(ctx, a.in, disaster);
  auto backend = make_backend(g);
  const auto result = annotate_dataset(dataset, *backend, make_policy(g), cache_path(ctx, a.cache),
                                       AnnotateOptions{true, true});
  check_post_errors(result);

  std::vector<Post> kept;
  for (const auto& ap : result.annotations) {
    if (ap.relevant) kept.push_back(ap.post);
  }
  const auto summary = ratio_summary(kept.size(), dataset.posts.size());

  std::ostringstream posts;
  write_posts(posts, kept);
  nlohmann::ordered_json s;
  s["total"] = dataset.posts.size();
  s["kept"] = kept.size();
  s["errors"] = result.errors.size();
  s["summary"] = summary;

  OutputStage stage(g.out_dir);
  stage.add("clean.jsonl", posts.str());
  stage.add("clean_summary.json", s.dump(2) + "\n");
  stage.commit(ctx.manifest);
  std::cout << "kept " << summary << "\n";
  return 0;
}

// annotate --------------------------------------------------------------------

struct AnnotateArgs {
  std::string in;
  std::string disaster{"hurricane"};
  std::string cache;
  bool skip_relevance{false};
};

int run_annotate(const GlobalOptions& g, const AnnotateArgs& a) {
  auto ctx = make_context(g, "annotate");
  const auto dataset = load_dataset(ctx, a.in, parse_disaster(a.disaster));
  auto backend = make_backend(g);
  const auto result = annotate_dataset(dataset, *backend, make_policy(g), cache_path(ctx, a.cache),
                                       AnnotateOptions{!a.skip_relevance, false});
  check_post_errors(result);

  std::ostringstream labels;
  labels << "post_id,category_code\n";
  std::size_t labelled = 0;
  for (const auto& ap : result.annotations) {
    if (!ap.relevant) continue;
    labels << csv::escape(ap.post.id) << ',' << code(ap.category) << '\n';
    ++labelled;
  }
  OutputStage stage(g.out_dir);
  stage.add("labels.csv", labels.str());
  stage.commit(ctx.manifest);
  std::cout << "labelled " << labelled << " of " << dataset.posts.size() << " posts (" << result.cache_hits
            << " from cache)\n";
  return 0;
}

// counts / index --------------------------------------------------------------

struct IndexArgs {
  std::string in;
  std::string labels;
  std::string counts;
};

int run_counts(const GlobalOptions& g, const IndexArgs& a) {
  auto ctx = make_context(g, "counts");
  const auto posts = labelled_posts(ctx, a.in, a.labels);
  const auto series = counts_from_posts(posts, ctx.config.index);
  std::ostringstream out;
  write_counts_csv(out, series);
  OutputStage stage(g.out_dir);
  stage.add("counts.csv", out.str());
  stage.commit(ctx.manifest);
  std::cout << series.size() << " windows\n";
  return 0;
}

int run_index(const GlobalOptions& g, const IndexArgs& a) {
  auto ctx = make_context(g, "index");
  OutputStage stage(g.out_dir);
  CountSeries series;
  if (!a.counts.empty()) {
    if (!a.in.empty() || !a.labels.empty()) throw Error(ErrorCode::InvalidConfig, "give either --counts or --in/--labels");
    ctx.input(a.counts);
    series = read_counts_csv(a.counts, ctx.config.index.window_days);
  } else {
    if (a.in.empty() || a.labels.empty()) throw Error(ErrorCode::InvalidConfig, "index needs --counts or --in and --labels");
    series = counts_from_posts(labelled_posts(ctx, a.in, a.labels), ctx.config.index);
    std::ostringstream counts;
    write_counts_csv(counts, series);
    stage.add("counts.csv", counts.str());
  }

  const auto impact = compute_impact_series<double>(series, ctx.config.index);
  if (impact.stats.iqr_fallback) {
    std::cerr << "warning: window totals have zero IQR; using fallback " << csv::format_real(impact.stats.iqr) << "\n";
  }
  std::ostringstream index_csv;
  std::ostringstream domain_csv;
  write_index_csv(index_csv, impact);
  write_domain_csv(domain_csv, impact);
  nlohmann::ordered_json stats;
  stats["windows"] = impact.size();
  stats["start"] = format_date(impact.start);
  stats["n_mean"] = nlohmann::ordered_json::parse(csv::format_real(impact.stats.n_mean));
  stats["iqr"] = nlohmann::ordered_json::parse(csv::format_real(impact.stats.iqr));
  stats["raw_iqr"] = nlohmann::ordered_json::parse(csv::format_real(impact.stats.raw_iqr));
  stats["iqr_fallback"] = impact.stats.iqr_fallback;

  stage.add("index.csv", index_csv.str());
  stage.add("domain.csv", domain_csv.str());
  stage.add("index_stats.json", stats.dump(2) + "\n");
  stage.commit(ctx.manifest);
  std::cout << impact.size() << " windows indexed\n";
  return 0;
}

// agreement -------------------------------------------------------------------

struct AgreementArgs {
  std::string in;
  std::string model;
};

int run_agreement(const GlobalOptions& g, const AgreementArgs& a) {
  auto ctx = make_context(g, "agreement");
  ctx.input(a.in);
  const auto report = agreement_report(load_annotations(a.in), a.model);
  OutputStage stage(g.out_dir);
  stage.add("agreement.json", agreement_report_json(report) + "\n");
  stage.commit(ctx.manifest);
  std::cout << "fleiss_kappa " << csv::format_real(report.fleiss.kappa) << ", consistency "
            << csv::format_real(report.consistency) << "\n";
  return 0;
}

// validate --------------------------------------------------------------------

struct ValidateArgs {
  std::string index;
  std::string series;
  std::string truth;
};

int run_validate(const GlobalOptions& g, const ValidateArgs& a) {
  auto ctx = make_context(g, "validate");
  ctx.input(a.index);
  ctx.input(a.truth);
  const auto table = read_series_table(a.index);
  const auto profile = lead_lag_profile(weekly_from_table(table, a.series), load_ground_truth(a.truth),
                                        ctx.config.max_lag);
  const auto reading = interpret_profile(profile);

  std::ostringstream lead_lag;
  write_leadlag_csv(lead_lag, profile);
  nlohmann::ordered_json j;
  j["series"] = a.series;
  j["best_lag"] = reading.best_lag;
  j["rho"] = nlohmann::ordered_json::parse(csv::format_real(reading.rho));
  j["strength"] = reading.strength;
  j["label_reading"] = reading.label_reading;
  j["pairing_reading"] = reading.pairing_reading;
  j["summary"] = reading.summary;

  OutputStage stage(g.out_dir);
  stage.add("leadlag.csv", lead_lag.str());
  stage.add("leadlag.json", j.dump(2) + "\n");
  stage.commit(ctx.manifest);
  std::cout << reading.summary << "\n";
  return 0;
}

// spatial ---------------------------------------------------------------------

struct SpatialArgs {
  std::string in;
  std::string labels;
  std::string gazetteer{"data/gazetteer.csv"};
  std::string source{"both"};
};

int run_spatial(const GlobalOptions& g, const SpatialArgs& a) {
  auto ctx = make_context(g, "spatial");
  const auto filter = source_filter_from_string(a.source);
  if (!filter) throw Error(ErrorCode::InvalidConfig, "unknown --source '" + a.source + "' (metadata|text|both)");
  const auto posts = labelled_posts(ctx, a.in, a.labels);
  ctx.input(a.gazetteer);
  const auto gazetteer = Gazetteer::load(a.gazetteer);
  const auto located = locate_posts(posts, gazetteer);
  const auto agg = aggregate_state_month(located, ctx.config.index, *filter, ctx.config.min_group_size);
  for (const auto& s : agg.suppressed) {
    std::cerr << "note: suppressed " << s.state << " " << s.month << " (" << s.post_count << " posts)\n";
  }
  std::ostringstream out;
  write_spatial_csv(out, agg);
  OutputStage stage(g.out_dir);
  stage.add("spatial.csv", out.str());
  stage.commit(ctx.manifest);
  std::cout << agg.rows.size() << " state-month rows, " << agg.unlocated << " unlocated posts\n";
  return 0;
}

// chart -----------------------------------------------------------------------

struct ChartArgs {
  std::string in;
  std::string title;
  std::string key_column;
  std::string value_column;
  std::string name{"chart.svg"};
};

int run_chart(const GlobalOptions& g, const ChartArgs& a) {
  auto ctx = make_context(g, "chart");
  ctx.input(a.in);
  const auto table = read_series_table(a.in, a.key_column.empty() ? std::nullopt : std::optional(a.key_column),
                                       a.value_column.empty() ? std::nullopt : std::optional(a.value_column));
  const auto chart = render_line_chart(table, ChartOptions{a.title});
  for (const auto& w : chart.warnings) std::cerr << "warning: " << w << "\n";
  OutputStage stage(g.out_dir);
  stage.add(a.name, chart.svg);
  stage.commit(ctx.manifest);
  std::cout << chart.polylines << " series charted\n";
  return 0;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::FileNotFound:
    case ErrorCode::Io: return kExitIo;
    case ErrorCode::TransportError: return kExitBackend;
    default: return kExitFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physi-social disaster impact indices from social media posts"};
  app.set_version_flag("--version", std::string(DISIMPACT_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, "key=value config file");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--seed", g.seed, "random seed (recorded in the manifest)");
  app.add_option("--backend", g.backend, "classifier backend")->check(CLI::IsMember({"mock", "remote"}));
  app.add_option("--endpoint", g.endpoint, "remote classifier base URL");
  app.add_option("--prompts", g.prompts_dir, "prompt template directory (remote backend)");
  app.add_option("--max-in-flight", g.max_in_flight, "concurrent backend requests");
  app.add_option("--max-retries", g.max_retries, "retries per request");
  app.add_option("--timeout-ms", g.timeout_ms, "per-request timeout");
  for (const char* key : {"alpha", "category_count", "window_days", "window_anchor", "max_lag", "quantile_method",
                          "composite_operator", "min_group_size"}) {
    std::string flag = std::string("--") + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    app.add_option_function<std::string>(
        flag, [&g, key](const std::string& v) { g.overrides[key] = v; }, "overrides the config value");
  }

  CleanArgs clean;
  auto* c = app.add_subcommand("clean", "relevance-filter posts");
  c->add_option("--in", clean.in, "posts.jsonl")->required();
  c->add_option("--disaster", clean.disaster, "hurricane|wildfire|other");
  c->add_option("--cache", clean.cache, "annotation cache (default OUT/cache.jsonl)");

  AnnotateArgs annotate;
  auto* an = app.add_subcommand("annotate", "assign impact categories");
  an->add_option("--in", annotate.in, "posts.jsonl")->required();
  an->add_option("--disaster", annotate.disaster, "hurricane|wildfire|other");
  an->add_option("--cache", annotate.cache, "annotation cache (default OUT/cache.jsonl)");
  an->add_flag("--skip-relevance", annotate.skip_relevance, "treat every post as relevant");

  IndexArgs counts;
  auto* co = app.add_subcommand("counts", "weekly category counts");
  co->add_option("--in", counts.in, "posts.jsonl")->required();
  co->add_option("--labels", counts.labels, "labels.csv")->required();

  IndexArgs index;
  auto* ix = app.add_subcommand("index", "impact indices from counts or labelled posts");
  ix->add_option("--in", index.in, "posts.jsonl");
  ix->add_option("--labels", index.labels, "labels.csv");
  ix->add_option("--counts", index.counts, "counts.csv");

  AgreementArgs agreement;
  auto* ag = app.add_subcommand("agreement", "annotator agreement statistics");
  ag->add_option("--in", agreement.in, "annotations.csv")->required();
  ag->add_option("--model-annotator", agreement.model, "annotator id of the model");

  ValidateArgs validate;
  auto* va = app.add_subcommand("validate", "lead-lag correlation against ground truth");
  va->add_option("--index", validate.index, "index.csv or domain.csv")->required();
  va->add_option("--series", validate.series, "series name, e.g. social or INFR")->required();
  va->add_option("--truth", validate.truth, "groundtruth.csv")->required();

  SpatialArgs spatial;
  auto* sp = app.add_subcommand("spatial", "state-month aggregation");
  sp->add_option("--in", spatial.in, "posts.jsonl")->required();
  sp->add_option("--labels", spatial.labels, "labels.csv")->required();
  sp->add_option("--gazetteer", spatial.gazetteer, "gazetteer CSV");
  sp->add_option("--source", spatial.source, "metadata|text|both");

  ChartArgs chart;
  auto* ch = app.add_subcommand("chart", "SVG line chart of index.csv or domain.csv");
  ch->add_option("--in", chart.in, "index.csv or domain.csv")->required();
  ch->add_option("--title", chart.title, "chart title");
  ch->add_option("--key-column", chart.key_column, "column naming the series");
  ch->add_option("--value-column", chart.value_column, "column holding the values");
  ch->add_option("--name", chart.name, "output file name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*c) return run_clean(g, clean);
    if (*an) return run_annotate(g, annotate);
    if (*co) return run_counts(g, counts);
    if (*ix) return run_index(g, index);
    if (*ag) return run_agreement(g, agreement);
    if (*va) return run_validate(g, validate);
    if (*sp) return run_spatial(g, spatial);
    if (*ch) return run_chart(g, chart);
  } catch (const Error& e) {
    std::cerr << "disimpact: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "disimpact: Io: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "disimpact: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
