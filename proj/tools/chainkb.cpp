// chainkb: synthesize benchmark graphs, extract paths, train the path
// composition model, evaluate rankings, and score path queries.
//
// Every subcommand takes a --seed and writes a JSON config echo next to its
// outputs; identical seeds and inputs reproduce every artifact byte for byte
// (timestamps live only in the echo).

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "chainkb/checkpoint.hpp"
#include "chainkb/eval.hpp"
#include "chainkb/io.hpp"
#include "chainkb/synth.hpp"
#include "chainkb/training.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace chainkb;

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in = open_input(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_config_echo(const std::string& path, ordered_json echo) {
  echo["timestamp"] = timestamp_utc();
  std::ofstream out = open_output(path);
  out << echo.dump(2) << '\n';
}

KnowledgeGraph load_graph(const std::string& triples_path,
                          const std::string& types_path) {
  std::ifstream triples = open_input(triples_path);
  TripleLoadStats stats;
  KnowledgeGraph kg = load_triples(triples, &stats);
  if (stats.duplicates) {
    std::cerr << "note: " << stats.duplicates << " duplicate triples dropped\n";
  }
  if (!types_path.empty()) {
    std::ifstream types = open_input(types_path);
    const TypeLoadStats tstats = load_entity_types(types, kg);
    if (tstats.unknown_entities) {
      std::cerr << "warning: " << tstats.unknown_entities
                << " type lines referenced unknown entities\n";
    }
  }
  return kg;
}

struct ModelFlag {
  ModelConfig config;
  bool needs_types = false;
};

// --model {pathrnn|single|single+ent|single+types|single+ent+types}
ModelFlag resolve_model_flag(const std::string& flag) {
  ModelFlag m;
  if (flag == "pathrnn") {
    m.config.sharing = Sharing::kPerRelation;
    m.config.activation = Activation::kSigmoid;
    m.config.entity_mode = EntityMode::kNone;
    return m;
  }
  m.config.sharing = Sharing::kShared;
  m.config.activation = Activation::kRelu;
  if (flag == "single") {
    m.config.entity_mode = EntityMode::kNone;
  } else if (flag == "single+ent") {
    m.config.entity_mode = EntityMode::kLearnedEntity;
  } else if (flag == "single+types") {
    m.config.entity_mode = EntityMode::kTypeSum;
    m.needs_types = true;
  } else if (flag == "single+ent+types") {
    m.config.entity_mode = EntityMode::kEntityPlusTypeSum;
    m.needs_types = true;
  } else {
    throw std::runtime_error(
        "--model: expected pathrnn|single|single+ent|single+types|single+ent+types");
  }
  return m;
}

EntityId require_entity(const KnowledgeGraph& kg, const std::string& name) {
  const auto id = kg.entities().find(name);
  if (!id) throw std::runtime_error("unknown entity '" + name + "'");
  return *id;
}

RelationId require_relation(const KnowledgeGraph& kg, const std::string& name) {
  const auto id = kg.relations().find(name);
  if (!id) throw std::runtime_error("unknown relation '" + name + "'");
  return *id;
}

// ---------------------------------------------------------------- synth ----

struct SynthArgs {
  std::string spec_path;
  std::string out_dir;
  std::uint64_t seed = 0;
};

int run_synth(const SynthArgs& args) {
  const SynthSpec spec = args.spec_path.empty()
                             ? SynthSpec::defaults()
                             : SynthSpec::from_json(read_file(args.spec_path));
  const SynthDataset data = generate(spec, args.seed);
  fs::create_directories(args.out_dir);
  const auto path = [&](const char* name) {
    return (fs::path(args.out_dir) / name).string();
  };
  {
    auto out = open_output(path("triples.tsv"));
    write_triples_tsv(out, data.graph_triples);
  }
  {
    auto out = open_output(path("types.tsv"));
    write_types_tsv(out, data.entity_types);
  }
  {
    auto out = open_output(path("train.tsv"));
    write_triples_tsv(out, data.train);
  }
  {
    auto out = open_output(path("dev.tsv"));
    write_triples_tsv(out, data.dev);
  }
  {
    auto out = open_output(path("test.tsv"));
    write_triples_tsv(out, data.test);
  }
  {
    auto out = open_output(path("dev_candidates.tsv"));
    write_candidates_tsv(out, data.dev_candidates);
  }
  {
    auto out = open_output(path("test_candidates.tsv"));
    write_candidates_tsv(out, data.test_candidates);
  }
  ordered_json echo;
  echo["command"] = "synth";
  echo["seed"] = args.seed;
  echo["spec"] = ordered_json::parse(spec.to_json());
  echo["out_dir"] = args.out_dir;
  write_config_echo(path("synth.config.json"), std::move(echo));
  std::cout << "synth: " << data.graph_triples.size() << " graph triples, "
            << data.train.size() << "/" << data.dev.size() << "/"
            << data.test.size() << " train/dev/test heads -> " << args.out_dir
            << '\n';
  return 0;
}

// ---------------------------------------------------------------- paths ----

struct PathsArgs {
  std::string kg_path;
  std::string pairs_path;
  std::string out_path;
  std::size_t max_len = 7;
  std::size_t walks = 200;
  std::uint64_t seed = 0;
};

int run_paths(const PathsArgs& args) {
  const KnowledgeGraph kg = load_graph(args.kg_path, "");
  auto pairs_in = open_input(args.pairs_path);
  const auto name_pairs = read_entity_pairs(pairs_in);
  std::vector<std::pair<EntityId, EntityId>> pairs;
  pairs.reserve(name_pairs.size());
  for (const auto& [s, t] : name_pairs) {
    pairs.emplace_back(require_entity(kg, s), require_entity(kg, t));
  }
  PathProvider provider(kg, args.max_len, args.walks, args.seed);
  std::size_t emitted = 0;
  {
    auto out = open_output(args.out_path);
    write_paths_tsv(out, kg, pairs, provider);
    for (const auto& [s, t] : pairs) emitted += provider.paths_for(s, t).size();
  }
  ordered_json echo;
  echo["command"] = "paths";
  echo["seed"] = args.seed;
  echo["kg"] = args.kg_path;
  echo["pairs"] = args.pairs_path;
  echo["max_len"] = args.max_len;
  echo["walks"] = args.walks;
  echo["out"] = args.out_path;
  write_config_echo(args.out_path + ".config.json", std::move(echo));
  std::cout << "paths: " << emitted << " paths over " << pairs.size()
            << " pairs -> " << args.out_path << '\n';
  return 0;
}

// ---------------------------------------------------------------- train ----

struct TrainArgs {
  std::string kg_path;
  std::string types_path;
  std::string paths_path;
  std::string train_path;
  std::string model_flag = "single";
  std::string pool_flag = "lse";
  std::size_t relation_dim = 250;
  std::size_t hidden_dim = 250;
  std::size_t entity_dim = 50;
  std::size_t epochs = 30;
  std::size_t batch = 16;
  std::size_t negatives = 4;
  std::size_t max_len = 7;
  std::size_t walks = 200;
  std::size_t max_steps = 0;
  double learning_rate = 1e-3;
  bool mtl_types = false;
  double mtl_weight = 0.1;
  std::uint64_t seed = 0;
  std::string out_path;
};

ordered_json train_echo(const TrainArgs& args) {
  ordered_json echo;
  echo["command"] = "train";
  echo["seed"] = args.seed;
  echo["kg"] = args.kg_path;
  echo["types"] = args.types_path;
  echo["paths"] = args.paths_path;
  echo["train"] = args.train_path;
  echo["model"] = args.model_flag;
  echo["pool"] = args.pool_flag;
  echo["relation_dim"] = args.relation_dim;
  echo["hidden_dim"] = args.hidden_dim;
  echo["entity_dim"] = args.entity_dim;
  echo["epochs"] = args.epochs;
  echo["batch"] = args.batch;
  echo["negatives"] = args.negatives;
  echo["max_len"] = args.max_len;
  echo["walks"] = args.walks;
  echo["max_steps"] = args.max_steps;
  echo["learning_rate"] = args.learning_rate;
  echo["mtl_types"] = args.mtl_types;
  echo["mtl_weight"] = args.mtl_weight;
  echo["out"] = args.out_path;
  return echo;
}

int run_train(const TrainArgs& args) {
  const ModelFlag model_flag = resolve_model_flag(args.model_flag);
  if (model_flag.needs_types && args.types_path.empty()) {
    throw std::runtime_error("--model " + args.model_flag + " requires --types");
  }
  const KnowledgeGraph kg = load_graph(args.kg_path, args.types_path);

  auto train_in = open_input(args.train_path);
  const auto train_rows = read_triple_rows(train_in);
  std::vector<std::string> query_names;
  for (const auto& row : train_rows) {
    if (std::find(query_names.begin(), query_names.end(), row[1]) ==
        query_names.end()) {
      query_names.push_back(row[1]);
    }
  }
  const QueryRelationSet queries = QueryRelationSet::from_names(kg, query_names);

  std::optional<PathProvider> provider;
  if (!args.paths_path.empty()) {
    auto paths_in = open_input(args.paths_path);
    provider.emplace(PathProvider::preloaded(kg, paths_in));
  } else {
    provider.emplace(kg, args.max_len, args.walks,
                     SplitMix64::derive(args.seed, "paths").next_u64());
  }

  DatasetConfig dataset_config;
  dataset_config.negatives_per_positive = args.negatives;
  SplitMix64 dataset_rng = SplitMix64::derive(args.seed, "dataset");
  DatasetStats dataset_stats;
  const auto dataset = build_dataset(kg, queries, *provider, dataset_config,
                                     dataset_rng, &dataset_stats);
  if (dataset.empty()) {
    throw std::runtime_error("no usable training instances (every pair pathless?)");
  }
  if (dataset_stats.relations_without_positives) {
    std::cerr << "warning: " << dataset_stats.relations_without_positives
              << " query relations have no usable positives\n";
  }
  std::cout << "dataset: " << dataset_stats.positives << " positives, "
            << dataset_stats.negatives << " negatives ("
            << dataset_stats.dropped_pathless_positives << " pathless dropped, "
            << dataset_stats.dropped_negative_slots << " negative slots unfilled)\n";

  ModelConfig config = model_flag.config;
  config.relation_dim = args.relation_dim;
  config.hidden_dim = args.hidden_dim;
  config.entity_dim = args.entity_dim;
  const VocabSizes sizes{kg.entities().size(), kg.relations().size(),
                         kg.types().size(), queries.size()};
  PathModel model(config, sizes, SplitMix64::derive(args.seed, "init").next_u64());

  TrainConfig train_config;
  train_config.epochs = args.epochs;
  train_config.batch_size = args.batch;
  train_config.pooling = PoolingKind::parse(args.pool_flag);
  train_config.seed = args.seed;
  train_config.adam.learning_rate = args.learning_rate;
  train_config.max_steps = args.max_steps;
  train_config.mtl_types = args.mtl_types;
  train_config.mtl_weight = args.mtl_weight;

  const TrainResult result = train(kg, dataset, model, train_config);

  {
    auto out = open_output(args.out_path);
    save_checkpoint(out, model, queries.names(kg));
  }
  {
    auto out = open_output(args.out_path + ".trace.csv");
    write_loss_trace_csv(out, result.loss_trace);
  }
  ordered_json echo = train_echo(args);
  echo["steps"] = result.steps;
  echo["aborted"] = result.aborted;
  write_config_echo(args.out_path + ".config.json", std::move(echo));

  if (result.aborted) {
    std::cerr << "training aborted: " << result.abort_reason
              << " (last good checkpoint written)\n";
    return 1;
  }
  std::cout << "train: " << result.steps << " steps, final batch loss "
            << format_double(result.loss_trace.back()) << " -> " << args.out_path
            << '\n';
  return 0;
}

// ----------------------------------------------------------------- eval ----

struct EvalArgs {
  std::string ckpt_path;
  std::string kg_path;
  std::string types_path;
  std::string test_path;
  std::string paths_path;
  std::string pool_flag = "lse";
  std::size_t max_len = 7;
  std::size_t walks = 200;
  std::uint64_t seed = 0;
  std::string report_path;
};

int run_eval(const EvalArgs& args) {
  const KnowledgeGraph kg = load_graph(args.kg_path, args.types_path);
  auto ckpt_in = open_input(args.ckpt_path);
  const LoadedCheckpoint ckpt = load_checkpoint(ckpt_in);
  if (ckpt.sizes.entities != kg.entities().size() ||
      ckpt.sizes.relations != kg.relations().size() ||
      ckpt.sizes.types != kg.types().size()) {
    throw std::runtime_error(
        "checkpoint vocabulary sizes do not match the provided graph/types");
  }
  const PathModel model = ckpt.make_model();
  const QueryRelationSet queries =
      QueryRelationSet::from_names(kg, ckpt.query_relation_names);

  auto test_in = open_input(args.test_path);
  const auto rows = read_labeled_pairs(test_in);

  std::optional<PathProvider> provider;
  if (!args.paths_path.empty()) {
    auto paths_in = open_input(args.paths_path);
    provider.emplace(PathProvider::preloaded(kg, paths_in));
  } else {
    provider.emplace(kg, args.max_len, args.walks,
                     SplitMix64::derive(args.seed, "paths").next_u64());
  }

  // group candidates by query relation, keeping first-appearance order
  std::vector<std::pair<QueryId, std::vector<CandidatePair>>> by_query;
  for (const LabeledPair& row : rows) {
    const RelationId rel = require_relation(kg, row.relation);
    const auto query = queries.query_of(rel);
    if (!query) {
      throw std::runtime_error("candidate relation '" + row.relation +
                               "' is not a query relation of this checkpoint");
    }
    auto it = std::find_if(by_query.begin(), by_query.end(),
                           [&](const auto& e) { return e.first == *query; });
    if (it == by_query.end()) {
      by_query.emplace_back(*query, std::vector<CandidatePair>{});
      it = std::prev(by_query.end());
    }
    it->second.push_back(CandidatePair{require_entity(kg, row.source),
                                       require_entity(kg, row.target),
                                       row.relevant});
  }

  const PoolingKind pooling = PoolingKind::parse(args.pool_flag);
  std::vector<RankedList> lists;
  ordered_json relation_report = ordered_json::array();
  for (const auto& [query, candidates] : by_query) {
    const std::string& name = kg.relations().name(queries.relations[query]);
    RankedList list =
        rank_pairs(model, kg, query, name, candidates, *provider, pooling);
    std::size_t pathless = 0;
    for (const RankedItem& item : list.items) {
      pathless += std::isinf(item.score) ? 1 : 0;
    }
    ordered_json entry;
    entry["relation"] = name;
    entry["pairs"] = list.items.size();
    entry["positives"] = list.relevant_count();
    entry["pathless"] = pathless;
    if (list.relevant_count() > 0) {
      entry["ap"] = average_precision(list);
    } else {
      entry["ap"] = nullptr;
      std::cerr << "warning: relation '" << name
                << "' has no relevant candidates; excluded from MAP\n";
    }
    relation_report.push_back(std::move(entry));
    lists.push_back(std::move(list));
  }
  std::size_t skipped = 0;
  const double map = mean_average_precision(lists, &skipped);

  ordered_json config_echo;
  config_echo["command"] = "eval";
  config_echo["seed"] = args.seed;
  config_echo["ckpt"] = args.ckpt_path;
  config_echo["kg"] = args.kg_path;
  config_echo["types"] = args.types_path;
  config_echo["test"] = args.test_path;
  config_echo["paths"] = args.paths_path;
  config_echo["pool"] = args.pool_flag;
  config_echo["max_len"] = args.max_len;
  config_echo["walks"] = args.walks;

  ordered_json report;
  report["map"] = map;
  report["query_relations"] = std::move(relation_report);
  report["skipped_without_relevant"] = skipped;
  report["config"] = config_echo;
  {
    auto out = open_output(args.report_path);
    out << report.dump(2) << '\n';
  }
  write_config_echo(args.report_path + ".config.json", std::move(config_echo));
  std::cout << "eval: MAP " << format_double(map) << " over " << lists.size()
            << " query relations -> " << args.report_path << '\n';
  return 0;
}

// ------------------------------------------------------------ pathquery ----

struct PathQueryArgs {
  std::string kg_path;
  std::string variant_flag = "rnn_diag";
  std::size_t dim = 100;
  std::size_t train_n = 300;
  std::size_t test_n = 100;
  std::size_t min_hops = 2;
  std::size_t max_hops = 3;
  std::size_t epochs = 30;
  std::size_t batch = 16;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  std::string report_path;
};

int run_pathquery(const PathQueryArgs& args) {
  if (args.min_hops < 1 || args.max_hops < args.min_hops) {
    throw std::runtime_error("bad hop range");
  }
  const KnowledgeGraph kg = load_graph(args.kg_path, "");
  SplitMix64 query_rng = SplitMix64::derive(args.seed, "pq_queries");
  std::set<PathQuery> seen;
  const auto train_queries = generate_path_queries(
      kg, args.train_n, args.min_hops, args.max_hops, query_rng, seen);
  const auto test_queries = generate_path_queries(
      kg, args.test_n, args.min_hops, args.max_hops, query_rng, seen);

  const PathQueryVariant variant = parse_pathquery_variant(args.variant_flag);
  PathQueryModel model(variant, kg.entities().size(), kg.relations().size(),
                       args.dim,
                       SplitMix64::derive(args.seed, "pq_init").next_u64());
  const double mq_untrained = pathquery_mean_quantile(model, kg, test_queries);

  PathQueryTrainConfig config;
  config.epochs = args.epochs;
  config.batch_size = args.batch;
  config.seed = args.seed;
  config.adam.learning_rate = args.learning_rate;
  const TrainResult result =
      train_pathquery(model, train_queries, kg.entities().size(), config);
  const double mq = pathquery_mean_quantile(model, kg, test_queries);

  ordered_json config_echo;
  config_echo["command"] = "pathquery";
  config_echo["seed"] = args.seed;
  config_echo["kg"] = args.kg_path;
  config_echo["variant"] = args.variant_flag;
  config_echo["dim"] = args.dim;
  config_echo["train_n"] = args.train_n;
  config_echo["test_n"] = args.test_n;
  config_echo["min_hops"] = args.min_hops;
  config_echo["max_hops"] = args.max_hops;
  config_echo["epochs"] = args.epochs;
  config_echo["batch"] = args.batch;
  config_echo["learning_rate"] = args.learning_rate;

  ordered_json report;
  report["variant"] = args.variant_flag;
  report["mean_quantile"] = mq;
  report["mean_quantile_untrained"] = mq_untrained;
  report["train_queries"] = train_queries.size();
  report["test_queries"] = test_queries.size();
  report["steps"] = result.steps;
  report["config"] = config_echo;
  {
    auto out = open_output(args.report_path);
    out << report.dump(2) << '\n';
  }
  write_config_echo(args.report_path + ".config.json", std::move(config_echo));
  std::cout << "pathquery: MQ " << format_double(mq) << " (untrained "
            << format_double(mq_untrained) << ") -> " << args.report_path << '\n';
  return result.aborted ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chainkb: multi-hop relation path reasoning over knowledge graphs"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic benchmark graph");
  synth->add_option("--spec", synth_args.spec_path, "rule spec JSON (defaults built in)");
  synth->add_option("--seed", synth_args.seed, "random seed")->required();
  synth->add_option("--out-dir", synth_args.out_dir, "output directory")->required();

  PathsArgs paths_args;
  CLI::App* paths = app.add_subcommand("paths", "extract bounded random-walk paths");
  paths->add_option("--kg", paths_args.kg_path, "triples.tsv")->required();
  paths->add_option("--pairs", paths_args.pairs_path, "entity pair file")->required();
  paths->add_option("--max-len", paths_args.max_len, "maximum path length");
  paths->add_option("--walks", paths_args.walks, "random walks per pair");
  paths->add_option("--seed", paths_args.seed, "random seed")->required();
  paths->add_option("--out", paths_args.out_path, "paths.tsv output")->required();

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "train a path composition model");
  train_cmd->add_option("--kg", train_args.kg_path, "triples.tsv")->required();
  train_cmd->add_option("--types", train_args.types_path, "types.tsv");
  train_cmd->add_option("--paths", train_args.paths_path,
                        "precomputed paths.tsv (otherwise sampled)");
  train_cmd->add_option("--train", train_args.train_path,
                        "positive triples defining the query relations")
      ->required();
  train_cmd->add_option("--model", train_args.model_flag,
                        "pathrnn|single|single+ent|single+types|single+ent+types");
  train_cmd->add_option("--pool", train_args.pool_flag, "max|topk:K|avg|lse");
  train_cmd->add_option("--relation-dim", train_args.relation_dim,
                        "relation embedding dim");
  train_cmd->add_option("--hidden-dim", train_args.hidden_dim, "RNN hidden dim");
  train_cmd->add_option("--entity-dim", train_args.entity_dim,
                        "entity/type embedding dim");
  train_cmd->add_option("--epochs", train_args.epochs, "training epochs");
  train_cmd->add_option("--batch", train_args.batch, "batch size");
  train_cmd->add_option("--negatives", train_args.negatives, "negatives per positive");
  train_cmd->add_option("--max-len", train_args.max_len, "sampled path length cap");
  train_cmd->add_option("--walks", train_args.walks, "random walks per pair");
  train_cmd->add_option("--max-steps", train_args.max_steps,
                        "stop after this many gradient steps (0 = all epochs)");
  train_cmd->add_option("--lr", train_args.learning_rate, "Adam learning rate");
  train_cmd->add_flag("--mtl-types", train_args.mtl_types,
                      "interleave the type-prediction ranking task");
  train_cmd->add_option("--mtl-weight", train_args.mtl_weight, "side-task weight");
  train_cmd->add_option("--seed", train_args.seed, "random seed")->required();
  train_cmd->add_option("--out", train_args.out_path, "checkpoint output")->required();

  EvalArgs eval_args;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "rank labeled candidates and report AP/MAP");
  eval_cmd->add_option("--ckpt", eval_args.ckpt_path, "checkpoint")->required();
  eval_cmd->add_option("--kg", eval_args.kg_path, "triples.tsv")->required();
  eval_cmd->add_option("--types", eval_args.types_path, "types.tsv");
  eval_cmd->add_option("--test", eval_args.test_path,
                       "labeled candidates (source rel target label)")
      ->required();
  eval_cmd->add_option("--paths", eval_args.paths_path,
                       "precomputed paths.tsv (otherwise sampled)");
  eval_cmd->add_option("--pool", eval_args.pool_flag, "max|topk:K|avg|lse");
  eval_cmd->add_option("--max-len", eval_args.max_len, "sampled path length cap");
  eval_cmd->add_option("--walks", eval_args.walks, "random walks per pair");
  eval_cmd->add_option("--seed", eval_args.seed, "random seed");
  eval_cmd->add_option("--report", eval_args.report_path, "report JSON output")
      ->required();

  PathQueryArgs pq_args;
  CLI::App* pq =
      app.add_subcommand("pathquery", "train and score compositional path queries");
  pq->add_option("--kg", pq_args.kg_path, "triples.tsv")->required();
  pq->add_option("--variant", pq_args.variant_flag,
                 "rnn_diag|comp_transe|comp_bilinear_diag");
  pq->add_option("--dim", pq_args.dim, "shared embedding/hidden dim");
  pq->add_option("--train-n", pq_args.train_n, "training queries");
  pq->add_option("--test-n", pq_args.test_n, "held-out queries");
  pq->add_option("--min-hops", pq_args.min_hops, "minimum query length");
  pq->add_option("--max-hops", pq_args.max_hops, "maximum query length");
  pq->add_option("--epochs", pq_args.epochs, "training epochs");
  pq->add_option("--batch", pq_args.batch, "batch size");
  pq->add_option("--lr", pq_args.learning_rate, "Adam learning rate");
  pq->add_option("--seed", pq_args.seed, "random seed")->required();
  pq->add_option("--report", pq_args.report_path, "report JSON output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth->parsed()) return run_synth(synth_args);
    if (paths->parsed()) return run_paths(paths_args);
    if (train_cmd->parsed()) return run_train(train_args);
    if (eval_cmd->parsed()) return run_eval(eval_args);
    if (pq->parsed()) return run_pathquery(pq_args);
  } catch (const std::exception& e) {
    std::cerr << "chainkb: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
