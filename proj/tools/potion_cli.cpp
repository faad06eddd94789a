// potion: ingest a labeled recipe corpus, train a category classifier,
// generate novel recipes and report their predicted categories.
//
// Exit codes: 0 success, 2 input/validation error, 3 degenerate domain
// input (empty pool, exhausted retries, empty recipe file), 4 internal error.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "potion/potion.hpp"

#ifndef POTION_DATA_DIR
#define POTION_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace potion;

namespace {

enum Exit { kOk = 0, kInput = 2, kDomain = 3, kInternal = 4 };

std::string default_out_dir() {
  if (const char* env = std::getenv("POTION_OUT_DIR"); env && *env) return env;
  return "potion-out";
}

struct CorpusOptions {
  std::string corpus = std::string(POTION_DATA_DIR) + "/potions.jsonl";
  std::string lexicon = std::string(POTION_DATA_DIR) + "/lexicon.txt";

  void add(CLI::App* cmd) {
    cmd->add_option("--corpus", corpus, "Labeled corpus (JSON lines: id, category, text)")->capture_default_str();
    cmd->add_option("--lexicon", lexicon, "Leading-verb lexicon file")->capture_default_str();
  }
};

struct TrainOptions {
  TrainConfig cfg;
  std::string features = "hashed";
  std::size_t dim = 4096;
  std::string embeddings;
  std::vector<std::size_t> ngrams{1, 2};
  bool no_lowercase = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--learning-rate", cfg.learning_rate, "SGD step size")->capture_default_str();
    cmd->add_option("--epochs", cfg.epochs, "Training epochs")->capture_default_str();
    cmd->add_option("--batch-size", cfg.batch_size, "Mini-batch size")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--l2", cfg.l2, "L2 penalty on weight matrices")->capture_default_str();
    cmd->add_option("--train-seed", cfg.seed, "Seed for initialization and shuffling")->capture_default_str();
    cmd->add_option("--hidden", cfg.hidden_size, "Hidden units (0 = softmax regression)")->capture_default_str();
    cmd->add_option("--features", features, "Feature stage")
        ->check(CLI::IsMember({"hashed", "embedding"}))
        ->capture_default_str();
    cmd->add_option("--dim", dim, "Hash buckets for hashed features")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--embeddings", embeddings, "Frozen embedding table for --features embedding");
    cmd->add_option("--ngrams", ngrams, "N-gram orders")->capture_default_str()->expected(1, -1);
    cmd->add_flag("--no-lowercase", no_lowercase, "Keep token case");
  }

  TokenizerConfig tokenizer() const {
    TokenizerConfig t;
    t.lowercase = !no_lowercase;
    t.ngram_orders = {ngrams.begin(), ngrams.end()};
    t.validate();
    return t;
  }

  Featurizer featurizer() const {
    if (features == "embedding") {
      if (embeddings.empty()) throw InvalidConfig("--features embedding requires --embeddings");
      return Featurizer::embedding(EmbeddingTable::load(embeddings));
    }
    return Featurizer::hashed(dim);
  }
};

struct GenerateOptions {
  GeneratorConfig cfg;

  void add(CLI::App* cmd) {
    cmd->add_option("--count", cfg.count, "Recipes to generate")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--gen-seed", cfg.seed, "Generator seed")->capture_default_str();
    cmd->add_option("--min-ingredients", cfg.min_ingredients)->capture_default_str();
    cmd->add_option("--max-ingredients", cfg.max_ingredients)->capture_default_str();
    cmd->add_option("--min-mixings", cfg.min_mixings)->capture_default_str();
    cmd->add_option("--max-mixings", cfg.max_mixings)->capture_default_str();
  }
};

struct ReportOptions {
  ReportConfig cfg;

  void add(CLI::App* cmd) {
    cmd->add_option("--bins", cfg.bins, "Histogram bins over [0,1]")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--top-k", cfg.top_k, "Categories listed per recipe in ambiguity.csv")
        ->capture_default_str()
        ->check(CLI::Range(1, 11));
    cmd->add_option("--threshold", cfg.ambiguity_threshold, "Runner-up probability that marks a recipe ambiguous")
        ->capture_default_str();
  }
};

std::string iso_time_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

struct LoadedCorpus {
  Lexicon lexicon;
  Dataset dataset;
  std::string digest;
  std::string lexicon_digest;
};

LoadedCorpus load_corpus(const CorpusOptions& opt) {
  LoadedCorpus c;
  const std::string lex_bytes = read_file(opt.lexicon);
  c.lexicon = Lexicon::parse(std::string_view(lex_bytes));
  c.lexicon_digest = content_digest(lex_bytes);
  const std::string bytes = read_file(opt.corpus);
  std::istringstream in(bytes);
  c.dataset = parse_corpus(in, c.lexicon);
  c.digest = content_digest(bytes);
  return c;
}

void print_counts(const CategoryCountArray& counts, std::size_t total) {
  for (const auto& cat : kCategories)
    std::cout << "  " << (cat.atc_code.empty() ? std::string("-") : std::string(cat.atc_code)) << "\t" << counts[cat.id]
              << "\t" << cat.name << "\n";
  std::cout << "  total\t" << total << "\n";
}

int cmd_ingest(const CorpusOptions& opt) {
  const LoadedCorpus c = load_corpus(opt);
  std::cout << "corpus " << opt.corpus << " (" << c.digest << ")\n";
  print_counts(c.dataset.counts_per_category, c.dataset.size());
  const FragmentPool pool = build_pool(c.dataset);
  std::cout << "fragment pool: " << pool.ingredients.size() << " ingredient, " << pool.mixings.size()
            << " mixing\n";
  return kOk;
}

ModelParams run_train(const LoadedCorpus& c, const TrainOptions& opt) {
  return train(c.dataset, opt.featurizer(), opt.cfg, opt.tokenizer());
}

int cmd_train(const CorpusOptions& copt, const TrainOptions& topt, const std::string& model_out) {
  const LoadedCorpus c = load_corpus(copt);
  const ModelParams model = run_train(c, topt);
  if (fs::path(model_out).has_parent_path()) fs::create_directories(fs::path(model_out).parent_path());
  save_model(model, model_out);
  std::cout << "trained on " << c.dataset.size() << " recipes, final loss " << format_fixed(model.meta.final_loss)
            << "\nmodel written to " << model_out << "\n";
  return kOk;
}

std::vector<Recipe> run_generate(const LoadedCorpus& c, const GeneratorConfig& cfg, std::size_t threads) {
  const FragmentPool pool = build_pool(c.dataset);
  return generate(pool, c.dataset, cfg, threads);
}

void write_recipes(const std::vector<Recipe>& recipes, const std::string& path) {
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ostringstream out;
  write_records(out, recipes);
  write_file(path, out.str());
}

int cmd_generate(const CorpusOptions& copt, const GenerateOptions& gopt, const std::string& out_path,
                 std::size_t threads) {
  const LoadedCorpus c = load_corpus(copt);
  const auto recipes = run_generate(c, gopt.cfg, threads);
  write_recipes(recipes, out_path);
  std::cout << "generated " << recipes.size() << " recipes, all differ from the " << c.dataset.size()
            << " training recipes\nwritten to " << out_path << "\n";
  return kOk;
}

void print_summary(const ClassificationSummary& s) {
  std::cout << "classified " << s.counts.total << " recipes\n";
  print_counts(s.counts.counts, s.counts.total);
  std::cout << "modal category: " << category_name(s.counts.modal()) << " (" << s.counts.counts[s.counts.modal()]
            << ")\n"
            << "top probability above 0.9: " << format_fixed(s.fraction_above_90 * 100.0, 2) << "%\n"
            << "ambiguous recipes: " << s.ambiguous << "\n";
}

ClassificationSummary classify_and_report(const ModelParams& model, const std::vector<Recipe>& recipes,
                                          const ReportConfig& rcfg, std::size_t threads,
                                          nlohmann::ordered_json run_meta, const fs::path& out_dir) {
  const auto preds = classify_batch(model, recipes, threads);
  ClassificationSummary s = summarize(preds, recipes, rcfg);
  run_meta["results"] = summary_json(s);
  emit_reports(s.counts, s.hist, s.ambiguity, rcfg.top_k, run_meta, out_dir);
  return s;
}

int cmd_classify(const std::string& model_path, const std::string& recipes_path, const CorpusOptions& copt,
                 const ReportOptions& ropt, const fs::path& out_dir, std::size_t threads) {
  const ModelParams model = load_model(model_path);
  const Lexicon lexicon = Lexicon::load(copt.lexicon);
  std::vector<Recipe> recipes;
  try {
    recipes = parse_recipes(recipes_path, lexicon);
  } catch (const EmptyCorpus&) {
    std::cerr << "error: recipe file " << recipes_path << " contains no records\n";
    return kDomain;
  }
  nlohmann::ordered_json meta;
  meta["tool"] = "potion";
  meta["tool_version"] = std::string(kToolVersion);
  meta["command"] = "classify";
  meta["model_digest"] = content_digest(read_file(model_path));
  meta["recipes_digest"] = content_digest(read_file(recipes_path));
  meta["report"] = report_config_json(ropt.cfg);
  const auto s = classify_and_report(model, recipes, ropt.cfg, threads, meta, out_dir);
  print_summary(s);
  std::cout << "reports written to " << out_dir.string() << "\n";
  return kOk;
}


int cmd_pipeline(const CorpusOptions& copt, const TrainOptions& topt, const GenerateOptions& gopt,
                 const ReportOptions& ropt, const fs::path& out_dir, std::size_t threads, bool timestamps) {
  const std::string started = timestamps ? iso_time_now() : std::string();
  const LoadedCorpus c = load_corpus(copt);
  std::cout << "ingested " << c.dataset.size() << " recipes\n";

  const ModelParams model = run_train(c, topt);
  fs::create_directories(out_dir);
  save_model(model, (out_dir / "model.bin").string());
  std::cout << "trained, final loss " << format_fixed(model.meta.final_loss) << "\n";

  const auto recipes = run_generate(c, gopt.cfg, threads);
  write_recipes(recipes, (out_dir / "recipes.jsonl").string());
  std::cout << "generated " << recipes.size() << " novel recipes\n";

  nlohmann::ordered_json meta;
  meta["tool"] = "potion";
  meta["tool_version"] = std::string(kToolVersion);
  meta["command"] = "pipeline";
  meta["corpus_digest"] = c.digest;
  meta["corpus_recipes"] = c.dataset.size();
  meta["lexicon_digest"] = c.lexicon_digest;
  meta["lexicon_version"] = c.lexicon.version;
  meta["train"] = train_config_json(topt.cfg);
  meta["features"] = featurizer_json(model.meta.featurizer, model.meta.tokenizer);
  meta["final_loss"] = format_fixed(model.meta.final_loss);
  meta["generator"] = generator_config_json(gopt.cfg);
  meta["report"] = report_config_json(ropt.cfg);
  meta["threads"] = threads;
  if (timestamps) {
    meta["started_at"] = started;
    meta["finished_at"] = iso_time_now();
  }
  const auto s = classify_and_report(model, recipes, ropt.cfg, threads, meta, out_dir);
  print_summary(s);
  std::cout << "artifacts written to " << out_dir.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Potion recipe generator and category classifier"};
  app.set_config("--config", "", "TOML/INI file with option defaults (flags take precedence)");
  app.require_subcommand(1);

  std::size_t threads = 1;
  std::string out_dir = default_out_dir();

  CorpusOptions corpus_opt;
  TrainOptions train_opt;
  GenerateOptions gen_opt;
  ReportOptions report_opt;

  auto* ingest = app.add_subcommand("ingest", "Validate a corpus and print category counts and pool sizes");
  corpus_opt.add(ingest);

  auto* train_cmd = app.add_subcommand("train", "Train a classifier on the corpus and save it");
  corpus_opt.add(train_cmd);
  train_opt.add(train_cmd);
  std::string model_out;
  train_cmd->add_option("--model-out", model_out, "Model file (default <out-dir>/model.bin)");
  train_cmd->add_option("--out-dir", out_dir, "Output directory ($POTION_OUT_DIR)")->capture_default_str();

  auto* gen_cmd = app.add_subcommand("generate", "Generate novel recipes from the corpus fragment pool");
  corpus_opt.add(gen_cmd);
  gen_opt.add(gen_cmd);
  std::string recipes_out;
  gen_cmd->add_option("--out", recipes_out, "Recipe file (default <out-dir>/recipes.jsonl)");
  gen_cmd->add_option("--out-dir", out_dir, "Output directory ($POTION_OUT_DIR)")->capture_default_str();
  gen_cmd->add_option("--threads", threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  auto* classify_cmd = app.add_subcommand("classify", "Classify recipes and write count/histogram/ambiguity reports");
  std::string model_path, recipes_path;
  classify_cmd->add_option("--model", model_path, "Model file written by train")->required();
  classify_cmd->add_option("--recipes", recipes_path, "Recipe file (JSON lines)")->required();
  classify_cmd->add_option("--lexicon", corpus_opt.lexicon, "Leading-verb lexicon file")->capture_default_str();
  classify_cmd->add_option("--out-dir", out_dir, "Report directory ($POTION_OUT_DIR)")->capture_default_str();
  classify_cmd->add_option("--threads", threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  report_opt.add(classify_cmd);

  auto* pipeline_cmd = app.add_subcommand("pipeline", "Ingest, train, generate and classify in one run");
  bool timestamps = false;
  corpus_opt.add(pipeline_cmd);
  train_opt.add(pipeline_cmd);
  gen_opt.add(pipeline_cmd);
  report_opt.add(pipeline_cmd);
  pipeline_cmd->add_option("--out-dir", out_dir, "Artifact directory ($POTION_OUT_DIR)")->capture_default_str();
  pipeline_cmd->add_option("--threads", threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  pipeline_cmd->add_flag("--timestamps", timestamps, "Record wall-clock start/finish times in run_meta.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }

  try {
    if (*ingest) return cmd_ingest(corpus_opt);
    if (*train_cmd)
      return cmd_train(corpus_opt, train_opt,
                       model_out.empty() ? (fs::path(out_dir) / "model.bin").string() : model_out);
    if (*gen_cmd)
      return cmd_generate(corpus_opt, gen_opt,
                          recipes_out.empty() ? (fs::path(out_dir) / "recipes.jsonl").string() : recipes_out,
                          threads);
    if (*classify_cmd) return cmd_classify(model_path, recipes_path, corpus_opt, report_opt, out_dir, threads);
    if (*pipeline_cmd)
      return cmd_pipeline(corpus_opt, train_opt, gen_opt, report_opt, out_dir, threads, timestamps);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomain;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
