//
// Copyright 2026 The svlc-kit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "settings.h"
#include "svlc/analogy.h"
#include "svlc/common.h"
#include "svlc/evalkit.h"
#include "svlc/lexicon.h"
#include "svlc/lora.h"
#include "svlc/losses.h"
#include "svlc/pipeline.h"
#include "svlc/unmask.h"

namespace {

using nlohmann::json;
using namespace svlc;

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    auto piece = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!piece.empty()) out.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out.flush()) throw IoError("cannot write '" + path + "'");
}

ServiceOptions service(const std::string& endpoint, std::size_t concurrency) {
  ServiceOptions o;
  o.endpoint = endpoint;
  o.max_in_flight = concurrency;
  return o;
}

// ---- augment ---------------------------------------------------------------

struct AugmentArgs {
  std::string input = "-";
  std::string output = "-";
  std::string format = "tsv";
  std::string methods = "rb";
  std::string svlc = "color,material,size,state,action";
  std::vector<std::string> lexicon_files;
  std::uint64_t seed = 0;
  std::string unmask_endpoint;
  std::string complete_endpoint;
  std::string tag_endpoint;
  int top_k = kDefaultTopK;
  std::size_t concurrency = 8;
  std::size_t workers = 1;
  std::size_t num_negatives = 1;
  std::string match_policy = "first";
  int max_tokens = kDefaultMaxTokens;
  std::size_t min_tokens = kDefaultMinAnalogyTokens;
  std::size_t batch_size = 256;
};

std::vector<SvlcLexicon> select_lexicons(const std::string& svlc, const std::vector<std::string>& files) {
  std::map<SvlcType, SvlcLexicon> custom;
  for (const auto& spec : files) {
    auto eq = spec.find('=');
    auto type = eq == std::string::npos ? std::nullopt : parse_svlc_type(spec.substr(0, eq));
    if (!type) throw UsageError("--lexicon expects <svlc_type>=<path>, got '" + spec + "'");
    custom.insert_or_assign(*type, load_lexicon_file(*type, spec.substr(eq + 1)));
  }
  std::vector<SvlcLexicon> out;
  for (const auto& name : split_list(svlc)) {
    auto type = parse_svlc_type(name);
    if (!type) throw UsageError("unknown svlc type '" + name + "'");
    if (auto it = custom.find(*type); it != custom.end()) {
      out.push_back(it->second);
    } else if (*type == SvlcType::kSpatialRelation || *type == SvlcType::kActionRelation) {
      throw UsageError("'" + name + "' has no substitution lexicon");
    } else {
      out.push_back(builtin_lexicon(*type));
    }
  }
  return out;
}

int cmd_augment(const AugmentArgs& a) {
  AugmentConfig cfg;
  cfg.seed = a.seed;
  auto methods = split_list(a.methods);
  if (methods.empty()) throw UsageError("--methods must name at least one of rb, llm-neg, llm-pos");
  for (const auto& m : methods) {
    if (m == "rb") {
      cfg.rule_based = true;
    } else if (m == "llm-neg") {
      cfg.llm_negatives = true;
    } else if (m == "llm-pos") {
      cfg.llm_positives = true;
    } else {
      throw UsageError("unknown method '" + m + "' (expected rb, llm-neg, llm-pos)");
    }
  }
  auto format = parse_pair_format(a.format);
  if (!format) throw UsageError("--format must be tsv or jsonl");
  if (a.match_policy != "first" && a.match_policy != "uniform") {
    throw UsageError("--match-policy must be first or uniform");
  }
  cfg.match_policy = a.match_policy == "first" ? MatchPolicy::kFirst : MatchPolicy::kUniform;
  if (cfg.rule_based) {
    cfg.lexicons = select_lexicons(a.svlc, a.lexicon_files);
    if (cfg.lexicons.empty()) throw UsageError("--svlc selects no lexicon");
  }
  cfg.negatives_per_source = a.num_negatives;
  cfg.top_k = a.top_k;
  cfg.analogy = {a.max_tokens, a.min_tokens};
  cfg.workers = a.workers;
  cfg.batch_size = a.batch_size;

  BuiltinTagger builtin_tagger;
  std::unique_ptr<HttpTagger> http_tagger;
  std::unique_ptr<HttpFillMaskClient> fill;
  std::unique_ptr<HttpCompletionClient> completion;
  Services services;
  if (cfg.llm_negatives) {
    if (a.unmask_endpoint.empty()) throw UsageError("llm-neg needs --unmask-endpoint or SVLC_UNMASK_ENDPOINT");
    fill = std::make_unique<HttpFillMaskClient>(service(a.unmask_endpoint, a.concurrency));
    services.fill_mask = fill.get();
    services.tagger = &builtin_tagger;
    if (!a.tag_endpoint.empty()) {
      http_tagger = std::make_unique<HttpTagger>(service(a.tag_endpoint, a.concurrency));
      services.tagger = http_tagger.get();
    }
  }
  if (cfg.llm_positives) {
    if (a.complete_endpoint.empty()) throw UsageError("llm-pos needs --complete-endpoint or SVLC_COMPLETE_ENDPOINT");
    completion = std::make_unique<HttpCompletionClient>(service(a.complete_endpoint, a.concurrency));
    services.completion = completion.get();
  }

  std::ifstream in_file;
  if (a.input != "-") {
    in_file.open(a.input, std::ios::binary);
    if (!in_file) throw IoError("cannot open input '" + a.input + "'");
  }
  std::ofstream out_file;
  if (a.output != "-") {
    out_file.open(a.output, std::ios::binary | std::ios::trunc);
    if (!out_file) throw IoError("cannot open output '" + a.output + "'");
  }
  std::istream& in = a.input == "-" ? std::cin : in_file;
  std::ostream& out = a.output == "-" ? std::cout : out_file;

  auto summary = run_augment(in, *format, out, cfg, services);
  (a.output == "-" ? std::cerr : std::cout) << summary_to_json(summary) << "\n";
  return kExitOk;
}

// ---- loss-eval -------------------------------------------------------------

struct LossArgs {
  std::string batch;
  double tau = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  std::string neg_mode = "separate_loss";
  bool gradients = false;
};

Matrix matrix_from(const json& j, const char* key) {
  try {
    return Matrix::from_rows(j.at(key).get<std::vector<std::vector<double>>>());
  } catch (const json::exception& e) {
    throw FormatError(std::string("batch field '") + key + "': " + e.what());
  }
}

json matrix_to_json(const Matrix& m) { return m.empty() ? json::array() : json(m.to_rows()); }

int cmd_loss_eval(const LossArgs& a) {
  LossConfig cfg{a.tau, a.alpha, a.beta, NegMode::kSeparateLoss};
  auto mode = parse_neg_mode(a.neg_mode);
  if (!mode) throw UsageError("--neg-mode must be separate_loss or merged_into_contrastive");
  cfg.neg_mode = *mode;

  auto j = json::parse(read_file(a.batch), nullptr, false);
  if (!j.is_object()) throw FormatError("batch file is not a JSON object");
  EmbeddingBatch batch;
  batch.text = matrix_from(j, "text_emb");
  batch.image = matrix_from(j, "image_emb");
  if (j.contains("neg_text_emb")) batch.neg_text = matrix_from(j, "neg_text_emb");
  if (j.contains("pos_text_emb")) batch.pos_text = matrix_from(j, "pos_text_emb");
  try {
    if (j.contains("has_neg")) batch.has_neg = j["has_neg"].get<std::vector<bool>>();
    if (j.contains("has_pos")) batch.has_pos = j["has_pos"].get<std::vector<bool>>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("batch mask: ") + e.what());
  }

  auto result = total_loss(batch, cfg);
  nlohmann::ordered_json out;
  out["total"] = result.total;
  out["parts"] = {{"contrastive", result.parts.contrastive},
                  {"negatives", result.parts.negatives},
                  {"analogy_text", result.parts.analogy_text},
                  {"analogy_image", result.parts.analogy_image}};
  out["no_negatives"] = result.no_negatives;
  out["no_positives"] = result.no_positives;
  if (a.gradients) {
    const auto& g = result.gradients;
    out["gradients"] = {{"text_emb", matrix_to_json(g.text)},
                        {"image_emb", matrix_to_json(g.image)},
                        {"neg_text_emb", matrix_to_json(g.neg_text)},
                        {"pos_text_emb", matrix_to_json(g.pos_text)},
                        {"tau", g.tau}};
  }
  std::cout << out.dump() << "\n";
  return kExitOk;
}

// ---- lora ------------------------------------------------------------------

struct LoraArgs {
  std::string base;
  std::string adapter;
  std::string out;
  std::string input;
  std::size_t rank = lora::kDefaultRank;
  std::uint64_t seed = 0;
};

int cmd_lora_fold(const LoraArgs& a) {
  auto base = lora::load_base(a.base);
  auto adapter = lora::load_adapter(a.adapter);
  lora::save_base(lora::fold(base, adapter), a.out);
  return kExitOk;
}

int cmd_lora_init(const LoraArgs& a) {
  auto base = lora::load_base(a.base);
  Rng rng(derive_seed(a.seed, base.name));
  lora::save_adapter(lora::init_adapter(base, a.rank, rng), base.kind, a.out);
  return kExitOk;
}

// Linear: input is a list of vectors. Embedding: a list of integer ids.
int cmd_lora_apply(const LoraArgs& a) {
  auto base = lora::load_base(a.base);
  std::optional<lora::LoraAdapter> adapter;
  if (!a.adapter.empty()) adapter = lora::load_adapter(a.adapter);
  const lora::LoraAdapter* ad = adapter ? &*adapter : nullptr;

  auto j = json::parse(read_file(a.input), nullptr, false);
  if (!j.is_array()) throw FormatError("--input must hold a JSON array");
  json outputs = json::array();
  try {
    if (base.kind == lora::LayerKind::kLinear) {
      for (const auto& x : j) outputs.push_back(lora::apply_linear(base, ad, x.get<std::vector<double>>()));
    } else {
      auto ids = j.get<std::vector<std::int64_t>>();
      for (auto& col : lora::apply_embedding(base, ad, ids)) outputs.push_back(col);
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("--input: ") + e.what());
  }
  std::string text = json{{"outputs", outputs}}.dump() + "\n";
  if (a.out.empty() || a.out == "-") {
    std::cout << text;
  } else {
    write_file(a.out, text);
  }
  return kExitOk;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string items;
  std::string backend;
  std::string embed_endpoint;
  double tau = 1.0;
  std::string report;
  std::size_t batch_size = 64;
  std::size_t concurrency = 8;
};

int cmd_eval(const EvalArgs& a) {
  std::string spec = a.backend;
  if (spec.empty() && !a.embed_endpoint.empty()) spec = "http:" + a.embed_endpoint;
  if (spec.empty()) throw UsageError("eval needs --backend http:URL|synthetic:SEED or SVLC_EMBED_ENDPOINT");

  std::unique_ptr<eval::EmbeddingBackend> backend;
  if (spec.rfind("synthetic:", 0) == 0) {
    std::uint64_t seed = 0;
    auto digits = spec.substr(10);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), seed);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) throw UsageError("bad synthetic seed in '" + spec + "'");
    backend = std::make_unique<eval::SyntheticBackend>(seed);
  } else if (spec.rfind("http:", 0) == 0) {
    // Accept both "http:http://host" and a bare "http://host".
    std::string url = spec.rfind("http://", 0) == 0 ? spec : spec.substr(5);
    backend = std::make_unique<eval::HttpEmbeddingBackend>(service(url, a.concurrency));
  } else {
    throw UsageError("--backend must be http:URL or synthetic:SEED");
  }

  std::ifstream in(a.items);
  if (!in) throw IoError("cannot open items '" + a.items + "'");
  auto report = eval::evaluate(eval::read_items(in), *backend, {a.tau, a.batch_size});
  auto text = eval::report_to_json(report);
  if (!a.report.empty()) write_file(a.report, text + "\n");
  std::cout << text << "\n";
  return kExitOk;
}

// ---- lexicon ---------------------------------------------------------------

int cmd_lexicon_list(const AugmentArgs& a) {
  for (const auto& lex : select_lexicons(a.svlc, a.lexicon_files)) {
    std::cout << to_string(lex.type()) << "\t" << lex.words().size() << "\t";
    for (std::size_t i = 0; i < lex.words().size(); ++i) std::cout << (i ? " " : "") << lex.words()[i];
    std::cout << "\n";
  }
  return kExitOk;
}

// ---- wiring ----------------------------------------------------------------

// Options absent from the command line take their value from SVLC_<NAME>,
// then from the config file section named after the subcommand.
void apply_fallbacks(CLI::App& sub, const std::string& section, const cli::ConfigFile* file) {
  cli::SettingSources sources(cli::process_env(), file, section);
  for (CLI::Option* opt : sub.get_options()) {
    if (opt->count() > 0 || opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    auto value = sources.lookup(name);
    if (!value) continue;
    if (opt->get_items_expected_max() > 1) {
      opt->add_result(split_list(*value));
    } else {
      opt->add_result(*value);
    }
    opt->run_callback();
  }
}

void add_service_options(CLI::App* sub, AugmentArgs& a) {
  sub->add_option("--unmask-endpoint", a.unmask_endpoint, "Fill-mask service base URL (env SVLC_UNMASK_ENDPOINT)");
  sub->add_option("--complete-endpoint", a.complete_endpoint,
                  "Text completion service base URL (env SVLC_COMPLETE_ENDPOINT)");
  sub->add_option("--tag-endpoint", a.tag_endpoint, "Optional POS tagging service; the built-in tagger is used otherwise");
  sub->add_option("--top-k", a.top_k, "Fill-mask candidates requested per query")->capture_default_str()
      ->check(CLI::Range(2, 1000));
  sub->add_option("--concurrency", a.concurrency, "Maximum in-flight requests per service")->capture_default_str()
      ->check(CLI::Range(std::size_t{1}, std::size_t{1024}));
}

int run(int argc, char** argv) {
  CLI::App app{"Structured vision-language concept augmentation toolkit"};
  app.require_subcommand(1);
  app.footer(
      "Option values are resolved as: command-line flag, then environment variable SVLC_<FLAG_NAME>\n"
      "(e.g. SVLC_SEED, SVLC_TOP_K), then the [<subcommand>] section or top level of --config, then defaults.\n"
      "Exit codes: 0 success, 1 fatal error, 2 usage error.");
  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file with optional [subcommand] sections");

  AugmentArgs aug;
  auto* augment = app.add_subcommand("augment", "Generate negative and analogy captions for image-caption pairs");
  augment->add_option("-i,--input", aug.input, "Input pairs file, '-' for stdin")->capture_default_str();
  augment->add_option("-o,--output", aug.output, "Output JSONL file, '-' for stdout")->capture_default_str();
  augment->add_option("--format", aug.format, "Input format: tsv (caption<TAB>image_ref) or jsonl")
      ->capture_default_str();
  augment->add_option("--methods", aug.methods, "Comma list of rb, llm-neg, llm-pos")->capture_default_str();
  augment->add_option("--svlc", aug.svlc, "Comma list of lexicon types for rb negatives")->capture_default_str();
  augment->add_option("--lexicon", aug.lexicon_files, "Replace a built-in list: <svlc_type>=<path> (repeatable)");
  augment->add_option("--seed", aug.seed, "Global seed; each record draws from hash(seed, id) (env SVLC_SEED)")
      ->capture_default_str();
  add_service_options(augment, aug);
  augment->add_option("--workers", aug.workers, "Worker threads over records")->capture_default_str()
      ->check(CLI::Range(std::size_t{1}, std::size_t{256}));
  augment->add_option("--num-negatives", aug.num_negatives, "Draws per lexicon and for unmasking, per caption")
      ->capture_default_str()->check(CLI::Range(std::size_t{1}, std::size_t{100}));
  augment->add_option("--match-policy", aug.match_policy, "rb token choice: first or uniform")->capture_default_str();
  augment->add_option("--max-tokens", aug.max_tokens, "Completion length budget for analogies")->capture_default_str()
      ->check(CLI::Range(1, 4096));
  augment->add_option("--min-tokens", aug.min_tokens, "Shortest accepted analogy, in words")->capture_default_str();
  augment->add_option("--batch-size", aug.batch_size, "Records buffered per parallel batch")->capture_default_str()
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 20));

  LossArgs loss;
  auto* loss_eval = app.add_subcommand("loss-eval", "Evaluate the combined loss on an embedding batch JSON file");
  loss_eval->add_option("--batch", loss.batch,
                        "JSON with text_emb, image_emb and optional neg_text_emb, pos_text_emb, has_neg, has_pos");
  loss_eval->add_option("--tau", loss.tau, "Similarity temperature")->capture_default_str();
  loss_eval->add_option("--alpha", loss.alpha, "Weight of the negatives loss")->capture_default_str();
  loss_eval->add_option("--beta", loss.beta, "Weight of the two analogy losses")->capture_default_str();
  loss_eval->add_option("--neg-mode", loss.neg_mode, "separate_loss or merged_into_contrastive")->capture_default_str();
  loss_eval->add_flag("--gradients", loss.gradients, "Include analytic gradients in the output");

  LoraArgs lora_args;
  auto* lora_cmd = app.add_subcommand("lora", "Low-rank adapter utilities");
  lora_cmd->require_subcommand(1);
  auto* fold = lora_cmd->add_subcommand("fold", "Write base + A*B as a new base weight file");
  fold->add_option("--base", lora_args.base, "Base weight file");
  fold->add_option("--adapter", lora_args.adapter, "Adapter file");
  fold->add_option("--out", lora_args.out, "Folded base weight file");
  auto* init = lora_cmd->add_subcommand("init", "Create a behavior-neutral adapter (B = 0) for a base weight");
  init->add_option("--base", lora_args.base, "Base weight file");
  init->add_option("--rank", lora_args.rank, "Adapter rank")->capture_default_str();
  init->add_option("--seed", lora_args.seed, "Seed for A ~ N(0, 0.02^2) (env SVLC_SEED)")->capture_default_str();
  init->add_option("--out", lora_args.out, "Adapter file");
  auto* apply = lora_cmd->add_subcommand("apply", "Apply a base weight, optionally with an adapter, to inputs");
  apply->add_option("--base", lora_args.base, "Base weight file");
  apply->add_option("--adapter", lora_args.adapter, "Adapter file (omit for the plain base)");
  apply->add_option("--input", lora_args.input, "JSON array: vectors for linear, token ids for embedding");
  apply->add_option("--out", lora_args.out, "Output JSON file, '-' for stdout")->capture_default_str();

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score positive vs negative captions per image");
  eval_cmd->add_option("--items", ev.items, "Checklist JSONL with image_ref, positive, negative, svlc_type");
  eval_cmd->add_option("--backend", ev.backend, "http:URL or synthetic:SEED");
  eval_cmd->add_option("--embed-endpoint", ev.embed_endpoint,
                       "Embedding service URL used when --backend is absent (env SVLC_EMBED_ENDPOINT)");
  eval_cmd->add_option("--tau", ev.tau, "Similarity temperature (> 0; does not change accuracy)")
      ->capture_default_str();
  eval_cmd->add_option("--report", ev.report, "Also write the JSON report to this file");
  eval_cmd->add_option("--batch-size", ev.batch_size, "Items embedded per backend call")->capture_default_str()
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 20));
  eval_cmd->add_option("--concurrency", ev.concurrency, "Maximum in-flight requests")->capture_default_str();

  AugmentArgs lex_args;
  auto* lexicon_cmd = app.add_subcommand("lexicon", "Inspect substitution lexicons");
  lexicon_cmd->require_subcommand(1);
  auto* list = lexicon_cmd->add_subcommand("list", "Print each selected lexicon as type, size, words");
  list->add_option("--svlc", lex_args.svlc, "Comma list of lexicon types")->capture_default_str();
  list->add_option("--lexicon", lex_args.lexicon_files, "Replace a built-in list: <svlc_type>=<path> (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    std::optional<cli::ConfigFile> file;
    if (!config_path.empty()) file = cli::ConfigFile::load(config_path);
    const cli::ConfigFile* cfg = file ? &*file : nullptr;
    auto fill = [&](CLI::App* sub, const std::string& section) { apply_fallbacks(*sub, section, cfg); };

    auto require = [](const std::string& value, const char* flag) {
      if (value.empty()) throw UsageError(std::string(flag) + " is required");
    };

    if (augment->parsed()) {
      fill(augment, "augment");
      return cmd_augment(aug);
    }
    if (loss_eval->parsed()) {
      fill(loss_eval, "loss-eval");
      require(loss.batch, "--batch");
      return cmd_loss_eval(loss);
    }
    if (eval_cmd->parsed()) {
      fill(eval_cmd, "eval");
      require(ev.items, "--items");
      return cmd_eval(ev);
    }
    if (fold->parsed()) {
      fill(fold, "lora");
      require(lora_args.base, "--base");
      require(lora_args.adapter, "--adapter");
      require(lora_args.out, "--out");
      return cmd_lora_fold(lora_args);
    }
    if (init->parsed()) {
      fill(init, "lora");
      require(lora_args.base, "--base");
      require(lora_args.out, "--out");
      return cmd_lora_init(lora_args);
    }
    if (apply->parsed()) {
      fill(apply, "lora");
      require(lora_args.base, "--base");
      require(lora_args.input, "--input");
      return cmd_lora_apply(lora_args);
    }
    if (list->parsed()) {
      fill(list, "lexicon");
      return cmd_lexicon_list(lex_args);
    }
  } catch (const CLI::ParseError& e) {
    // Validation failures of environment or config-file values.
    std::cerr << "svlc: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "svlc: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "svlc: error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
