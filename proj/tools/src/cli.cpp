/* Copyright 2026 The SceneLay Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "scenelay/alignment.hpp"
#include "scenelay/checkpoint.hpp"
#include "scenelay/dataset_io.hpp"
#include "scenelay/embeddings.hpp"
#include "scenelay/encoders.hpp"
#include "scenelay/error.hpp"
#include "scenelay/metrics.hpp"
#include "scenelay/model.hpp"
#include "scenelay/rng.hpp"
#include "scenelay/synthetic.hpp"
#include "scenelay/training.hpp"

#ifndef SCENELAY_VERSION
#define SCENELAY_VERSION "unknown"
#endif

namespace scenelay::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Bad flags, missing inputs, unreadable input files: exit code 2.
struct UsageError : Error {
  using Error::Error;
};

// A check the user asked for did not pass: exit code 1.
struct CheckFailed : Error {
  using Error::Error;
};

std::optional<fs::path> data_dir() {
  if (const char* d = std::getenv("SCENELAY_DATA"); d && *d) return fs::path(d);
  return std::nullopt;
}

// Resolves an input flag. Relative paths that do not exist are looked up
// under SCENELAY_DATA; an empty flag falls back to `default_name` there.
fs::path input_path(const std::string& flag, const std::string& value,
                    const std::string& default_name = {}) {
  const auto dir = data_dir();
  fs::path p;
  if (!value.empty()) {
    p = value;
    if (p.is_relative() && !fs::exists(p) && dir && fs::exists(*dir / p)) {
      p = *dir / p;
    }
  } else if (dir && !default_name.empty()) {
    p = *dir / default_name;
  } else {
    throw UsageError("missing " + flag +
                     (default_name.empty() ? "" : " (or set SCENELAY_DATA)"));
  }
  if (!fs::is_regular_file(p)) {
    throw UsageError(flag + ": no such file: " + p.string());
  }
  return p;
}

template <typename F>
auto loading(const fs::path& p, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(p.string() + ": " + e.what());
  }
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw UsageError("cannot read " + p.string());
  return in;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw UsageError("cannot write " + p.string());
  return out;
}

void write_text(const fs::path& p, const std::string& text) {
  auto out = open_out(p);
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

// Records what is about to run before any long computation starts.
void write_manifest(const fs::path& path, const std::string& command,
                    const json& config, const std::vector<fs::path>& inputs) {
  json digests = json::object();
  for (const auto& p : inputs) digests[p.string()] = sha256_file(p.string());
  json m{{"command", command},
         {"config", config},
         {"inputs", digests},
         {"version", SCENELAY_VERSION},
         {"timestamp", utc_timestamp()}};
  write_text(path, m.dump(2));
}

EmbeddingTable load_embeddings(const fs::path& p, std::size_t dim) {
  return loading(p, [&] { return load_table(p, dim); });
}

std::vector<Instance> load_dataset(const fs::path& p) {
  return loading(p, [&] { return read_instances(p); });
}

std::optional<PrecomputedStore> maybe_store(const ModelConfig& m,
                                            const std::string& flag) {
  if (m.encoder != EncoderKind::kPrecomputed || !m.uses_caption()) return std::nullopt;
  if (flag.empty()) throw UsageError("--encoder precomputed needs --store");
  const fs::path p = input_path("--store", flag);
  return loading(p, [&] { return load_store(p); });
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
  std::string out_dir;
  std::size_t instances = 320;
  std::size_t dim = 32;
  std::uint64_t seed = 1;
};

int cmd_synth(const SynthOptions& o, std::ostream& out) {
  if (o.instances == 0 || o.dim == 0) throw UsageError("--instances and --dim must be positive");
  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  const auto corpus = make_synthetic_corpus({o.instances, o.dim, o.seed});
  {
    auto f = open_out(dir / "embeddings.txt");
    write_table(corpus.table, f);
  }
  {
    auto f = open_out(dir / "triplets.jsonl");
    for (const auto& t : corpus.triplets) f << triplet_to_json(t) << '\n';
  }
  {
    std::vector<std::string> ids;
    for (const auto& [id, _] : corpus.caption_text) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    auto f = open_out(dir / "captions.jsonl");
    for (const auto& id : ids) f << caption_set_to_json(id, corpus.caption_text.at(id)) << '\n';
  }
  out << "wrote " << corpus.triplets.size() << " triplets, "
      << corpus.caption_text.size() << " images, " << corpus.table.size()
      << " embeddings (dim " << o.dim << ") to " << dir.string() << "\n";
  return kExitOk;
}

// -------------------------------------------------------- build-dataset

struct BuildOptions {
  std::string triplets, captions, embeddings, banned, out, report, manifest;
  std::size_t dim = 300;
  double threshold = 0.75;
  std::string scope = "so";
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
};

int cmd_build_dataset(const BuildOptions& o, std::ostream& out) {
  if (!(o.threshold >= 0.0 && o.threshold <= 1.0)) {
    throw UsageError("--threshold must be in [0, 1], got " + std::to_string(o.threshold));
  }
  const auto scope = parse_threshold_scope(o.scope);
  if (!scope) throw UsageError("--threshold-scope must be so, sro or sum");
  if (o.jobs == 0) throw UsageError("--jobs must be positive");
  const fs::path triplets = input_path("--triplets", o.triplets, "triplets.jsonl");
  const fs::path captions = input_path("--captions", o.captions, "captions.jsonl");
  const fs::path emb = input_path("--embeddings", o.embeddings, "embeddings.txt");
  std::vector<fs::path> inputs{triplets, captions, emb};

  AlignmentConfig cfg;
  cfg.threshold = o.threshold;
  cfg.scope = *scope;
  if (!o.banned.empty()) {
    const fs::path b = input_path("--banned-actions", o.banned);
    inputs.push_back(b);
    auto in = open_in(b);
    cfg.banned_actions = parse_banned_actions(in);
  } else {
    cfg.banned_actions = default_banned_actions();
  }

  const fs::path out_path = o.out.empty() ? fs::path("dataset.jsonl") : fs::path(o.out);
  const fs::path manifest =
      o.manifest.empty() ? fs::path(out_path.string() + ".manifest.json") : fs::path(o.manifest);
  json config{{"triplets", triplets.string()},
              {"captions", captions.string()},
              {"embeddings", emb.string()},
              {"dim", o.dim},
              {"threshold", o.threshold},
              {"threshold_scope", to_string(*scope)},
              {"banned_actions", std::vector<std::string>(cfg.banned_actions.begin(),
                                                          cfg.banned_actions.end())},
              {"out", out_path.string()},
              {"seed", o.seed},
              {"jobs", o.jobs}};
  write_manifest(manifest, "build-dataset", config, inputs);

  TripletRead tr = loading(triplets, [&] {
    auto in = open_in(triplets);
    return read_triplets(in);
  });
  auto caps = loading(captions, [&] {
    auto in = open_in(captions);
    return read_caption_sets(in);
  });
  const EmbeddingTable table = load_embeddings(emb, o.dim);

  DatasetBuild build = build_dataset(tr.triplets, caps, table, cfg, o.jobs);
  build.report.triplets += tr.malformed;
  build.report.rejections["malformed"] += tr.malformed;

  {
    auto f = open_out(out_path);
    write_instances(build.instances, f);
  }
  const fs::path report =
      o.report.empty() ? fs::path(out_path.string() + ".report.json") : fs::path(o.report);
  write_text(report, report_to_json(build.report));
  out << "instances " << build.report.instances << " of " << build.report.triplets
      << " triplets, " << build.report.images << " images, " << build.report.captions
      << " captions; report in " << report.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- train

struct TrainOptions {
  std::string dataset, embeddings, out, store, mode = "caption", encoder = "avg";
  std::size_t dim = 300;
  TrainConfig cfg;
  bool no_cv = false;
  double split = 0.9;
};

void write_loss_csv(const fs::path& p, const std::vector<double>& loss) {
  auto f = open_out(p);
  f << "epoch,loss\n" << std::setprecision(17);
  for (std::size_t e = 0; e < loss.size(); ++e) f << e + 1 << ',' << loss[e] << '\n';
}

void write_predictions(const fs::path& p, const std::vector<Prediction>& preds) {
  auto f = open_out(p);
  for (const auto& x : preds) f << prediction_to_json(x) << '\n';
}

void write_fold(const fs::path& dir, const FoldOutcome& o, const TrainConfig& cfg) {
  const std::string i = std::to_string(o.fold);
  Checkpoint ck{cfg, derive_seed(cfg.seed, 1000 + o.fold), o.result.params};
  save_checkpoint(ck, dir / ("checkpoint-fold" + i + ".json"));
  write_text(dir / ("metrics-fold" + i + ".json"), metrics_to_json(o.metrics));
  write_loss_csv(dir / ("loss-fold" + i + ".csv"), o.result.epoch_loss);
  write_predictions(dir / ("predictions-fold" + i + ".jsonl"), o.predictions);
}

int cmd_train(TrainOptions o, std::ostream& out, std::ostream& err) {
  const auto mode = parse_input_mode(o.mode);
  if (!mode) throw UsageError("unknown --mode " + o.mode);
  const auto enc = parse_encoder_kind(o.encoder);
  if (!enc) throw UsageError("unknown --encoder " + o.encoder);
  if (o.out.empty()) throw UsageError("missing --out run directory");
  if (!(o.split > 0.0 && o.split < 1.0)) throw UsageError("--split must be in (0, 1)");
  TrainConfig& cfg = o.cfg;
  cfg.model.mode = *mode;
  cfg.model.encoder = *enc;
  cfg.model.embed_dim = o.dim;

  const fs::path dataset = input_path("--dataset", o.dataset, "dataset.jsonl");
  const fs::path emb = input_path("--embeddings", o.embeddings, "embeddings.txt");
  std::vector<fs::path> inputs{dataset, emb};
  std::optional<PrecomputedStore> store;
  if (cfg.model.encoder == EncoderKind::kPrecomputed && cfg.model.uses_caption()) {
    store = maybe_store(cfg.model, o.store);
    inputs.push_back(input_path("--store", o.store));
    cfg.model.precomputed_dim = store->dim();
  }
  if (auto err = cfg.validate(); !err.empty()) throw UsageError(err);

  const fs::path dir(o.out);
  fs::create_directories(dir);
  json config = json::parse(train_config_to_json(cfg));
  config["dataset"] = dataset.string();
  config["embeddings"] = emb.string();
  config["no_cv"] = o.no_cv;
  config["split"] = o.split;
  config["jobs"] = cfg.jobs;
  if (store) config["store"] = o.store;
  write_manifest(dir / "manifest.json", "train", config, inputs);
  write_text(dir / "config.json", config.dump(2));

  const auto instances = load_dataset(dataset);
  const EmbeddingTable table = load_embeddings(emb, o.dim);
  const PrecomputedStore* sp = store ? &*store : nullptr;

  std::vector<MetricsReport> rows;
  std::vector<std::string> labels;
  if (o.no_cv) {
    PreparedSet prep = loading(dataset, [&] {
      return prepare_examples(instances, cfg.model, table, sp);
    });
    auto& ex = prep.examples;
    Rng rng(derive_seed(cfg.seed, 2));
    rng.shuffle(std::span<Example>(ex));
    const auto n_train = static_cast<std::size_t>(o.split * static_cast<double>(ex.size()));
    if (n_train == 0 || ex.size() - n_train < 2) {
      throw UsageError("--split leaves an empty training set or fewer than 2 test instances");
    }
    std::vector<Example> train(ex.begin(), ex.begin() + n_train);
    std::vector<Example> test(ex.begin() + n_train, ex.end());
    FoldOutcome f;
    f.train_size = train.size();
    f.test_size = test.size();
    f.result = train_fold(train, cfg, table, derive_seed(cfg.seed, 1000));
    f.predictions = predict(f.result.params, test, table);
    std::vector<EvalRecord> recs;
    for (const auto& p : f.predictions) recs.push_back({p.pred, p.gold, p.subject});
    f.metrics = evaluate(recs);
    write_fold(dir, f, cfg);
    write_text(dir / "metrics-aggregate.json", metrics_to_json(f.metrics));
    std::vector<MetricsReport> one{f.metrics};
    auto csv = open_out(dir / "metrics-folds.csv");
    write_metrics_csv(csv, one);
    rows.push_back(f.metrics);
    labels.push_back(std::string(to_string(*mode)));
  } else {
    auto cv = cross_validate(instances, cfg, table, sp, [&](const FoldOutcome& f) {
      write_fold(dir, f, cfg);
      err << "fold " << f.fold << " done\n";
    });
    for (const auto& f : cv.folds) {
      out << "fold " << f.fold << ": train " << f.train_size << " test " << f.test_size
          << " IoU " << std::fixed << std::setprecision(1) << f.metrics.iou << "\n";
      out.unsetf(std::ios::floatfield);
    }
    write_text(dir / "metrics-aggregate.json", metrics_to_json(cv.aggregate));
    std::vector<MetricsReport> per_fold;
    for (const auto& f : cv.folds) per_fold.push_back(f.metrics);
    auto csv = open_out(dir / "metrics-folds.csv");
    write_metrics_csv(csv, per_fold);
    if (!cv.skipped.empty()) {
      for (const auto& [why, n] : cv.skipped) out << "skipped " << n << " (" << why << ")\n";
    }
    rows.push_back(cv.aggregate);
    labels.push_back(std::string(to_string(*mode)) + "/" + std::string(to_string(*enc)));
  }
  print_metrics_table(out, labels, rows);
  return kExitOk;
}

// ----------------------------------------------------------------- eval

struct EvalOptions {
  std::vector<std::string> predictions;
  std::vector<std::string> labels;
  std::string out;
};

int cmd_eval(const EvalOptions& o, std::ostream& out) {
  if (o.predictions.empty()) throw UsageError("missing --predictions");
  if (!o.labels.empty() && o.labels.size() != o.predictions.size()) {
    throw UsageError("--label must be given once per --predictions file");
  }
  std::vector<MetricsReport> rows;
  std::vector<std::string> labels;
  json machine = json::array();
  for (std::size_t k = 0; k < o.predictions.size(); ++k) {
    const fs::path p = input_path("--predictions", o.predictions[k]);
    std::vector<EvalRecord> recs = loading(p, [&] {
      auto in = open_in(p);
      std::vector<EvalRecord> r;
      std::string line;
      while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const Prediction x = prediction_from_json(line);
        r.push_back({x.pred, x.gold, x.subject});
      }
      return r;
    });
    if (recs.size() < 2) throw UsageError(p.string() + ": need at least 2 predictions");
    rows.push_back(evaluate(recs));
    labels.push_back(o.labels.empty() ? p.stem().string() : o.labels[k]);
    json j = json::parse(metrics_to_json(rows.back()));
    j["label"] = labels.back();
    j["predictions"] = p.string();
    machine.push_back(j);
  }
  print_metrics_table(out, labels, rows);
  if (!o.out.empty()) write_text(o.out, machine.dump(2));
  return kExitOk;
}

// -------------------------------------------------------------- predict

struct PredictOptions {
  std::string checkpoint, dataset, embeddings, store, out;
};

int cmd_predict(const PredictOptions& o, std::ostream& out) {
  const fs::path ckp = input_path("--checkpoint", o.checkpoint);
  const fs::path dataset = input_path("--dataset", o.dataset, "dataset.jsonl");
  const fs::path emb = input_path("--embeddings", o.embeddings, "embeddings.txt");
  const Checkpoint ck = loading(ckp, [&] { return load_checkpoint(ckp); });
  const auto& mc = ck.params.config;
  const auto store = maybe_store(mc, o.store);
  const auto instances = load_dataset(dataset);
  const EmbeddingTable table = load_embeddings(emb, mc.embed_dim);
  const PreparedSet prep = loading(dataset, [&] {
    return prepare_examples(instances, mc, table, store ? &*store : nullptr);
  });
  const auto preds = predict(ck.params, prep.examples, table);
  if (o.out.empty()) {
    for (const auto& p : preds) out << prediction_to_json(p) << '\n';
  } else {
    write_predictions(o.out, preds);
  }
  return kExitOk;
}

// ------------------------------------------------------------ gradcheck

struct GradOptions {
  std::string encoder = "all";
  std::string mode = "caption";
  std::vector<std::uint64_t> seeds{1, 2, 3};
  double tolerance = 1e-4;
  std::size_t sample = 0;
  bool trainable_embeddings = false;
};

int cmd_gradcheck(const GradOptions& o, std::ostream& out) {
  const auto mode = parse_input_mode(o.mode);
  if (!mode) throw UsageError("unknown --mode " + o.mode);
  std::vector<EncoderKind> encoders;
  if (o.encoder == "all") {
    encoders = {EncoderKind::kAvg, EncoderKind::kBiLstm};
  } else if (auto e = parse_encoder_kind(o.encoder)) {
    encoders = {*e};
  } else {
    throw UsageError("unknown --encoder " + o.encoder);
  }
  if (*mode == InputMode::kTriplet) encoders = {EncoderKind::kAvg};
  double worst = 0.0;
  for (auto enc : encoders) {
    for (auto seed : o.seeds) {
      GradCheckOptions g;
      g.encoder = enc;
      g.mode = *mode;
      g.seed = seed;
      g.sample = o.sample;
      g.trainable_embeddings = o.trainable_embeddings && enc == EncoderKind::kBiLstm;
      const auto r = gradient_check(g);
      worst = std::max(worst, r.max_rel_error);
      out << to_string(enc) << " " << to_string(*mode) << " seed " << seed << ": "
          << r.checked << " params, max rel err " << std::scientific
          << std::setprecision(3) << r.max_rel_error << " at " << r.worst_param
          << (r.max_rel_error < o.tolerance ? "  ok" : "  FAIL") << "\n";
      out.unsetf(std::ios::floatfield);
    }
  }
  if (!(worst < o.tolerance)) {
    throw CheckFailed("gradient check failed: max relative error " + std::to_string(worst));
  }
  return kExitOk;
}

// ---------------------------------------------------------------- audit

struct AuditOptions {
  std::string dataset, out;
  std::size_t n = 100;
  std::uint64_t seed = 1;
};

int cmd_audit(const AuditOptions& o, std::ostream& out) {
  if (o.out.empty()) throw UsageError("missing --out");
  const fs::path dataset = input_path("--dataset", o.dataset, "dataset.jsonl");
  const auto instances = load_dataset(dataset);
  if (o.n > instances.size()) {
    throw UsageError("--n " + std::to_string(o.n) + " exceeds dataset size " +
                     std::to_string(instances.size()));
  }
  auto f = open_out(o.out);
  audit_sample(instances, o.n, o.seed, f);
  out << "wrote " << o.n << " audit items to " << o.out << "\n";
  return kExitOk;
}

}  // namespace

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return hex.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scene layout prediction from image captions"};
  app.set_version_flag("--version", SCENELAY_VERSION);
  app.require_subcommand(1);

  SynthOptions synth;
  auto* s = app.add_subcommand("synth", "Write a synthetic rule-based corpus");
  s->add_option("--out-dir", synth.out_dir, "Output directory")->required();
  s->add_option("--instances", synth.instances, "Number of triplets")->capture_default_str();
  s->add_option("--dim", synth.dim, "Embedding dimension")->capture_default_str();
  s->add_option("--seed", synth.seed, "Random seed")->capture_default_str();

  BuildOptions build;
  auto* b = app.add_subcommand("build-dataset", "Align triplets to captions");
  b->add_option("--triplets", build.triplets, "Triplets JSONL");
  b->add_option("--captions", build.captions, "Captions JSONL");
  b->add_option("--embeddings", build.embeddings, "Word vectors, text format");
  b->add_option("--dim", build.dim, "Word vector dimension")->capture_default_str();
  b->add_option("--threshold", build.threshold, "Similarity threshold")->capture_default_str();
  b->add_option("--threshold-scope", build.scope, "so | sro | sum")->capture_default_str();
  b->add_option("--banned-actions", build.banned, "Single-argument action list");
  b->add_option("--out", build.out, "Dataset JSONL output")->capture_default_str();
  b->add_option("--report", build.report, "Build report JSON (default <out>.report.json)");
  b->add_option("--manifest", build.manifest, "Run manifest (default <out>.manifest.json)");
  b->add_option("--seed", build.seed, "Recorded in the manifest")->capture_default_str();
  b->add_option("--jobs", build.jobs, "Worker threads")->capture_default_str();

  TrainOptions train;
  auto* t = app.add_subcommand("train", "Cross-validate or train a model");
  t->add_option("--dataset", train.dataset, "Dataset JSONL");
  t->add_option("--embeddings", train.embeddings, "Word vectors, text format");
  t->add_option("--dim", train.dim, "Word vector dimension")->capture_default_str();
  t->add_option("--out", train.out, "Run directory")->required();
  t->add_option("--mode", train.mode, "caption | triplet | caption+relation | caption-so")
      ->capture_default_str();
  t->add_option("--encoder", train.encoder, "avg | bilstm | precomputed")->capture_default_str();
  t->add_option("--store", train.store, "Precomputed caption vectors JSONL");
  t->add_option("--epochs", train.cfg.epochs)->capture_default_str();
  t->add_option("--batch-size", train.cfg.batch_size)->capture_default_str();
  t->add_option("--lr", train.cfg.lr)->capture_default_str();
  t->add_option("--lr-decay", train.cfg.lr_decay, "Per-epoch learning-rate factor")
      ->capture_default_str();
  t->add_option("--rho", train.cfg.rho)->capture_default_str();
  t->add_option("--eps", train.cfg.eps)->capture_default_str();
  t->add_option("--clip", train.cfg.clip, "Global gradient-norm clip, 0 = off")
      ->capture_default_str();
  t->add_option("--folds", train.cfg.folds)->capture_default_str();
  t->add_option("--seed", train.cfg.seed)->capture_default_str();
  t->add_option("--jobs", train.cfg.jobs, "Folds trained in parallel")->capture_default_str();
  t->add_option("--caption-width", train.cfg.model.caption_width)->capture_default_str();
  t->add_option("--fusion-width", train.cfg.model.fusion_width)->capture_default_str();
  t->add_option("--hidden-width", train.cfg.model.hidden_width)->capture_default_str();
  t->add_option("--lstm-hidden", train.cfg.model.lstm_hidden)->capture_default_str();
  t->add_flag("--trainable-embeddings", train.cfg.model.trainable_embeddings);
  t->add_flag("--group-by-image", train.cfg.group_by_image);
  t->add_flag("--no-cv", train.no_cv, "Single seeded train/test split");
  t->add_option("--split", train.split, "Training fraction with --no-cv")->capture_default_str();

  EvalOptions eval;
  auto* e = app.add_subcommand("eval", "Score prediction files");
  e->add_option("--predictions", eval.predictions, "Predictions JSONL (repeatable)");
  e->add_option("--label", eval.labels, "Row label per predictions file");
  e->add_option("--out", eval.out, "Metrics JSON output");

  PredictOptions pred;
  auto* p = app.add_subcommand("predict", "Predict object boxes with a checkpoint");
  p->add_option("--checkpoint", pred.checkpoint)->required();
  p->add_option("--dataset", pred.dataset, "Dataset JSONL");
  p->add_option("--embeddings", pred.embeddings, "Word vectors, text format");
  p->add_option("--store", pred.store, "Precomputed caption vectors JSONL");
  p->add_option("--out", pred.out, "Predictions JSONL (default stdout)");

  GradOptions grad;
  auto* g = app.add_subcommand("gradcheck", "Compare analytic and numeric gradients");
  g->add_option("--encoder", grad.encoder, "avg | bilstm | precomputed | all")
      ->capture_default_str();
  g->add_option("--mode", grad.mode)->capture_default_str();
  g->add_option("--seeds", grad.seeds)->delimiter(',')->capture_default_str();
  g->add_option("--tolerance", grad.tolerance)->capture_default_str();
  g->add_option("--sample", grad.sample, "Parameters per array, 0 = all")->capture_default_str();
  g->add_flag("--trainable-embeddings", grad.trainable_embeddings);

  AuditOptions audit;
  auto* a = app.add_subcommand("audit", "Sample instances for manual review");
  a->add_option("--dataset", audit.dataset, "Dataset JSONL");
  a->add_option("--n", audit.n)->capture_default_str();
  a->add_option("--seed", audit.seed)->capture_default_str();
  a->add_option("--out", audit.out)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << SCENELAY_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << "scenelay: " << ex.what() << "\n";
    return kExitUsage;
  }

  try {
    if (s->parsed()) return cmd_synth(synth, out);
    if (b->parsed()) return cmd_build_dataset(build, out);
    if (t->parsed()) return cmd_train(train, out, err);
    if (e->parsed()) return cmd_eval(eval, out);
    if (p->parsed()) return cmd_predict(pred, out);
    if (g->parsed()) return cmd_gradcheck(grad, out);
    if (a->parsed()) return cmd_audit(audit, out);
  } catch (const UsageError& ex) {
    err << "scenelay: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const CheckFailed& ex) {
    err << "scenelay: " << ex.what() << "\n";
    return kExitCheckFailed;
  } catch (const std::exception& ex) {
    err << "scenelay: " << ex.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitUsage;
}

}  // namespace scenelay::cli
