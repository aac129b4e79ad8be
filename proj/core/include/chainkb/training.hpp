#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chainkb/graph.hpp"
#include "chainkb/model.hpp"
#include "chainkb/optim.hpp"
#include "chainkb/paths.hpp"
#include "chainkb/pathquery.hpp"
#include "chainkb/pooling.hpp"

namespace chainkb {

enum class Label { kPositive, kNegative };

struct TrainInstance {
  EntityId source = 0;
  EntityId target = 0;
  RelationId relation = 0;
  QueryId query = 0;
  Label label = Label::kPositive;
  std::vector<Path> paths;
};

// The relations a model is asked to predict; QueryId is the index here.
struct QueryRelationSet {
  std::vector<RelationId> relations;

  static QueryRelationSet from_names(const KnowledgeGraph& kg,
                                     std::span<const std::string> names);
  std::optional<QueryId> query_of(RelationId relation) const;
  std::vector<std::string> names(const KnowledgeGraph& kg) const;
  std::size_t size() const { return relations.size(); }
};

struct DatasetConfig {
  std::size_t negatives_per_positive = 4;
  std::size_t negative_attempts = 100;
};

struct DatasetStats {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t dropped_pathless_positives = 0;
  std::size_t dropped_negative_slots = 0;
  std::size_t relations_without_positives = 0;
};

// Turns every observed (s, gamma, t) with a nonempty path set into a positive
// instance and corrupts its target into negatives. Negative targets share a
// type with the true target when possible, must be unobserved under gamma,
// and must themselves have at least one path from s. The pair's own direct
// edge for the query relation never appears in its path set.
std::vector<TrainInstance> build_dataset(const KnowledgeGraph& kg,
                                         const QueryRelationSet& queries,
                                         PathProvider& provider,
                                         const DatasetConfig& config,
                                         SplitMix64& rng,
                                         DatasetStats* stats = nullptr);

// Forward diagnostics; pattern/kink_margin feed the gradient checker.
struct InstanceForward {
  double loss = 0.0;
  double probability = 0.0;
  double pooled = 0.0;
  double kink_margin = 0.0;
  std::uint64_t pattern = 0;
  // Count of nonzero pooling weights (min(k,N) for max/top-k, N otherwise).
  std::size_t pool_nonzero_weights = 0;
};

// Negative log-likelihood of one instance under pooled path scores. The
// probability is clamped to [1e-12, 1-1e-12] before the log. When `grads`
// is non-null the full backward pass accumulates into it.
InstanceForward instance_loss(const PathModel& model, const KnowledgeGraph& kg,
                              const TrainInstance& instance,
                              const PoolingKind& pooling,
                              ParamSet* grads = nullptr);

// Mean instance loss over a dataset: sum of instance losses divided by the
// total number of training examples (positives and negatives alike).
double dataset_loss(const PathModel& model, const KnowledgeGraph& kg,
                    std::span<const TrainInstance> dataset,
                    const PoolingKind& pooling);

// Pairwise ranking loss for the auxiliary type-prediction task: the
// entity's representation should score its observed type above a type it
// does not carry. Shares the type (and entity) embeddings with the model.
struct BprSample {
  EntityId entity = 0;
  TypeId observed = 0;
  TypeId negative = 0;
};

double bpr_type_loss(const PathModel& model, const KnowledgeGraph& kg,
                     const BprSample& sample, ParamSet* grads = nullptr);

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 16;
  PoolingKind pooling = PoolingKind::logsumexp();
  std::uint64_t seed = 0;
  AdamConfig adam;
  // Stop after this many gradient steps when nonzero.
  std::size_t max_steps = 0;
  bool mtl_types = false;
  double mtl_weight = 0.1;
};

struct TrainResult {
  // Mean batch loss per gradient step (main objective only).
  std::vector<double> loss_trace;
  std::size_t steps = 0;
  bool aborted = false;
  std::string abort_reason;
  // Instances whose pooling weights did not show the expected nonzero count
  // (min(k,N) for max/top-k, N otherwise). Stays zero in sane runs.
  std::size_t pool_sparsity_violations = 0;
};

// Mini-batch Adam over the instance losses. Per-relation sharing trains each
// query relation's partition separately with its own optimizer state; the
// mtl_types flag interleaves one weighted type-prediction batch per main
// batch. A non-finite batch loss aborts before the update, leaving the
// parameters at their last good values.
TrainResult train(const KnowledgeGraph& kg, std::span<const TrainInstance> dataset,
                  PathModel& model, const TrainConfig& config);

struct PathQueryTrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
  AdamConfig adam;
};

// Ranking objective for path queries: the query's target should outscore a
// uniformly corrupted target, -log sigmoid(s_pos - s_neg).
TrainResult train_pathquery(PathQueryModel& model,
                            std::span<const PathQuery> queries,
                            std::size_t n_entities,
                            const PathQueryTrainConfig& config);

}  // namespace chainkb
