#include "chainkb/training.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "chainkb/numeric.hpp"
#include "chainkb/rng.hpp"

namespace chainkb {

namespace {

constexpr double kProbClamp = 1e-12;

// -log sigmoid(x), stable for large |x|.
double softplus_neg(double x) {
  return std::max(0.0, -x) + std::log1p(std::exp(-std::fabs(x)));
}

void shuffle_indices(std::vector<std::size_t>& idx, SplitMix64& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    std::swap(idx[i - 1], idx[rng.below(i)]);
  }
}

}  // namespace

QueryRelationSet QueryRelationSet::from_names(const KnowledgeGraph& kg,
                                              std::span<const std::string> names) {
  QueryRelationSet set;
  for (const auto& name : names) {
    const auto rel = kg.relations().find(name);
    if (!rel) {
      throw std::invalid_argument("query relation '" + name +
                                  "' is not in the graph");
    }
    if (std::find(set.relations.begin(), set.relations.end(), *rel) ==
        set.relations.end()) {
      set.relations.push_back(*rel);
    }
  }
  return set;
}

std::optional<QueryId> QueryRelationSet::query_of(RelationId relation) const {
  for (std::size_t i = 0; i < relations.size(); ++i) {
    if (relations[i] == relation) return static_cast<QueryId>(i);
  }
  return std::nullopt;
}

std::vector<std::string> QueryRelationSet::names(const KnowledgeGraph& kg) const {
  std::vector<std::string> out;
  out.reserve(relations.size());
  for (RelationId r : relations) out.push_back(kg.relations().name(r));
  return out;
}

namespace {

// Path set for (source, target) with the pair's own query edge excluded:
// no returned path may traverse (source, query, target) or its inverse at
// any step, as if that edge were absent from the graph.
std::vector<Path> usable_paths(const KnowledgeGraph& kg, PathProvider& provider,
                               EntityId source, EntityId target,
                               RelationId query_relation) {
  const RelationId inverse = kg.inverse_relation(query_relation);
  std::vector<Path> paths;
  for (const Path& p : provider.paths_for(source, target)) {
    EntityId at = p.source;
    bool leaks = false;
    for (const PathStep& step : p.steps) {
      if ((at == source && step.relation == query_relation && step.entity == target) ||
          (at == target && step.relation == inverse && step.entity == source)) {
        leaks = true;
        break;
      }
      at = step.entity;
    }
    if (!leaks) paths.push_back(p);
  }
  return paths;
}

// Entities sharing at least one type with `target` (target excluded),
// deduplicated and sorted; empty when the target is untyped.
std::vector<EntityId> type_peers(const KnowledgeGraph& kg, EntityId target) {
  std::vector<EntityId> peers;
  for (TypeId t : kg.entity_types(target)) {
    const auto members = kg.entities_with_type(t);
    peers.insert(peers.end(), members.begin(), members.end());
  }
  std::sort(peers.begin(), peers.end());
  peers.erase(std::unique(peers.begin(), peers.end()), peers.end());
  peers.erase(std::remove(peers.begin(), peers.end(), target), peers.end());
  return peers;
}

}  // namespace

std::vector<TrainInstance> build_dataset(const KnowledgeGraph& kg,
                                         const QueryRelationSet& queries,
                                         PathProvider& provider,
                                         const DatasetConfig& config,
                                         SplitMix64& rng, DatasetStats* stats) {
  DatasetStats local;
  std::vector<TrainInstance> dataset;
  std::vector<std::size_t> positives_per_query(queries.size(), 0);
  const std::size_t n_entities = kg.entities().size();

  for (const Triple& triple : kg.triples()) {
    const auto query = queries.query_of(triple.relation);
    if (!query) continue;
    auto paths =
        usable_paths(kg, provider, triple.source, triple.target, triple.relation);
    if (paths.empty()) {
      ++local.dropped_pathless_positives;
      continue;
    }
    ++positives_per_query[*query];
    ++local.positives;
    dataset.push_back(TrainInstance{triple.source, triple.target, triple.relation,
                                    *query, Label::kPositive, std::move(paths)});

    const auto peers = type_peers(kg, triple.target);
    for (std::size_t slot = 0; slot < config.negatives_per_positive; ++slot) {
      bool filled = false;
      for (std::size_t attempt = 0; attempt < config.negative_attempts; ++attempt) {
        EntityId candidate;
        if (!peers.empty()) {
          candidate = peers[rng.below(peers.size())];
        } else {
          candidate = static_cast<EntityId>(rng.below(n_entities));
        }
        if (candidate == triple.target) continue;
        if (kg.has_triple(triple.source, triple.relation, candidate)) continue;
        auto neg_paths =
            usable_paths(kg, provider, triple.source, candidate, triple.relation);
        if (neg_paths.empty()) continue;
        dataset.push_back(TrainInstance{triple.source, candidate, triple.relation,
                                        *query, Label::kNegative,
                                        std::move(neg_paths)});
        ++local.negatives;
        filled = true;
        break;
      }
      if (!filled) ++local.dropped_negative_slots;
    }
  }
  for (std::size_t q = 0; q < queries.size(); ++q) {
    if (positives_per_query[q] == 0) ++local.relations_without_positives;
  }
  if (stats) *stats = local;
  return dataset;
}

InstanceForward instance_loss(const PathModel& model, const KnowledgeGraph& kg,
                              const TrainInstance& instance,
                              const PoolingKind& pooling, ParamSet* grads) {
  if (instance.paths.empty()) {
    throw std::invalid_argument("instance_loss: instance has no paths");
  }
  std::vector<PathEncoding> encodings;
  encodings.reserve(instance.paths.size());
  std::vector<double> scores;
  scores.reserve(instance.paths.size());
  InstanceForward fwd;
  fwd.kink_margin = std::numeric_limits<double>::infinity();
  std::uint64_t pattern = 0xcbf29ce484222325ULL;
  for (const Path& path : instance.paths) {
    encodings.push_back(model.encode_path(kg, path, instance.query));
    const PathEncoding& enc = encodings.back();
    scores.push_back(model.score_path(enc, instance.query));
    fwd.kink_margin = std::min(fwd.kink_margin, enc.relu_margin);
    pattern = fnv1a64_mix(pattern, enc.relu_pattern);
  }

  const PoolResult pooled = pool(scores, pooling);
  pattern = fnv1a64_mix(pattern, pooled.selection_pattern);
  fwd.pattern = pattern;
  fwd.pooled = pooled.pooled;
  fwd.probability = pooled.probability;
  for (double w : pooled.weights) fwd.pool_nonzero_weights += w != 0.0;

  const double p = std::clamp(pooled.probability, kProbClamp, 1.0 - kProbClamp);
  const bool positive = instance.label == Label::kPositive;
  fwd.loss = positive ? -std::log(p) : -std::log(1.0 - p);

  if (grads) {
    // d(loss)/d(pooled); zero where the clamp flattens the objective.
    double d_pooled = 0.0;
    if (p == pooled.probability) {
      d_pooled = positive ? pooled.probability - 1.0 : pooled.probability;
    }
    for (std::size_t i = 0; i < instance.paths.size(); ++i) {
      const double d_score = d_pooled * pooled.weights[i];
      if (d_score == 0.0) continue;
      model.backward(kg, instance.paths[i], instance.query, encodings[i],
                     d_score, *grads);
    }
  }
  return fwd;
}

double dataset_loss(const PathModel& model, const KnowledgeGraph& kg,
                    std::span<const TrainInstance> dataset,
                    const PoolingKind& pooling) {
  if (dataset.empty()) throw std::invalid_argument("dataset_loss: empty dataset");
  double total = 0.0;
  for (const TrainInstance& instance : dataset) {
    total += instance_loss(model, kg, instance, pooling).loss;
  }
  return total / static_cast<double>(dataset.size());
}

double bpr_type_loss(const PathModel& model, const KnowledgeGraph& kg,
                     const BprSample& sample, ParamSet* grads) {
  if (!model.config().uses_entities()) {
    throw std::invalid_argument("bpr_type_loss: model has no entity representation");
  }
  const auto types = kg.entity_types(sample.entity);
  if (types.empty()) {
    throw std::invalid_argument("bpr_type_loss: entity has no observed types");
  }
  const Matrix& type_table = model.params().at("type_emb");
  const Vector rep = model.entity_vector(kg, sample.entity);
  const double s_pos = dot(rep, type_table.row(sample.observed));
  const double s_neg = dot(rep, type_table.row(sample.negative));
  const double diff = s_pos - s_neg;
  const double loss = softplus_neg(diff);
  if (grads) {
    const double g = sigmoid(diff) - 1.0;  // d(loss)/d(diff)
    Matrix& type_grads = grads->at("type_emb");
    const auto y_pos = type_table.row(sample.observed);
    const auto y_neg = type_table.row(sample.negative);
    axpy(g, rep, type_grads.row(sample.observed));
    axpy(-g, rep, type_grads.row(sample.negative));
    // rep itself is a sum of type rows (and possibly an entity row), so the
    // representation gradient fans out to those.
    Vector d_rep(rep.size());
    for (std::size_t i = 0; i < rep.size(); ++i) {
      d_rep[i] = g * (y_pos[i] - y_neg[i]);
    }
    if (model.config().uses_types()) {
      for (TypeId t : types) axpy(1.0, d_rep, type_grads.row(t));
    }
    if (model.config().uses_entity_table()) {
      axpy(1.0, d_rep, grads->at("entity_emb").row(sample.entity));
    }
  }
  return loss;
}

namespace {

struct MtlSampler {
  std::vector<EntityId> eligible;

  MtlSampler(const KnowledgeGraph& kg, std::size_t n_types) {
    for (EntityId e = 0; e < kg.entities().size(); ++e) {
      const auto types = kg.entity_types(e);
      if (!types.empty() && types.size() < n_types) eligible.push_back(e);
    }
  }

  std::optional<BprSample> draw(const KnowledgeGraph& kg, std::size_t n_types,
                                SplitMix64& rng) const {
    if (eligible.empty()) return std::nullopt;
    const EntityId entity = eligible[rng.below(eligible.size())];
    const auto types = kg.entity_types(entity);
    const TypeId observed = types[rng.below(types.size())];
    for (std::size_t attempt = 0; attempt < 64; ++attempt) {
      const auto negative = static_cast<TypeId>(rng.below(n_types));
      if (std::find(types.begin(), types.end(), negative) == types.end()) {
        return BprSample{entity, observed, negative};
      }
    }
    return std::nullopt;
  }
};

std::size_t expected_nonzero_weights(const PoolingKind& pooling, std::size_t n) {
  switch (pooling.kind) {
    case PoolingKind::Kind::kMax: return 1;
    case PoolingKind::Kind::kTopK: return std::min(pooling.k, n);
    default: return n;
  }
}

// Epochs of mini-batch Adam over one slice of the dataset.
void run_partition(const KnowledgeGraph& kg,
                   std::span<const TrainInstance* const> instances,
                   PathModel& model, const TrainConfig& config,
                   std::uint64_t shuffle_stream, TrainResult& result) {
  AdamOptimizer adam(model.params(), config.adam);
  ParamSet grads = model.params().zeros_like();
  SplitMix64 shuffle_rng = SplitMix64::derive(config.seed, "shuffle", shuffle_stream);
  SplitMix64 mtl_rng = SplitMix64::derive(config.seed, "mtl", shuffle_stream);
  const std::size_t n_types = kg.types().size();
  std::optional<MtlSampler> mtl;
  if (config.mtl_types) mtl.emplace(kg, n_types);

  std::vector<std::size_t> order(instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_indices(order, shuffle_rng);
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      if (config.max_steps && result.steps >= config.max_steps) return;
      const std::size_t end = std::min(start + config.batch_size, order.size());
      grads.set_zero();
      double batch_loss = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        const TrainInstance& instance = *instances[order[i]];
        const InstanceForward fwd =
            instance_loss(model, kg, instance, config.pooling, &grads);
        batch_loss += fwd.loss;
        if (fwd.pool_nonzero_weights !=
            expected_nonzero_weights(config.pooling, instance.paths.size())) {
          ++result.pool_sparsity_violations;
        }
      }
      const double count = static_cast<double>(end - start);
      batch_loss /= count;
      if (!std::isfinite(batch_loss)) {
        result.aborted = true;
        result.abort_reason = "non-finite batch loss at step " +
                              std::to_string(result.steps + 1);
        return;
      }
      grads.scale(1.0 / count);
      adam.step(model.params(), grads);
      result.loss_trace.push_back(batch_loss);
      ++result.steps;

      if (mtl) {
        grads.set_zero();
        double mtl_loss = 0.0;
        std::size_t drawn = 0;
        for (std::size_t i = 0; i < config.batch_size; ++i) {
          const auto sample = mtl->draw(kg, n_types, mtl_rng);
          if (!sample) continue;
          mtl_loss += bpr_type_loss(model, kg, *sample, &grads);
          ++drawn;
        }
        if (drawn > 0) {
          grads.scale(config.mtl_weight / static_cast<double>(drawn));
          adam.step(model.params(), grads);
        }
      }
    }
  }
}

}  // namespace

TrainResult train(const KnowledgeGraph& kg, std::span<const TrainInstance> dataset,
                  PathModel& model, const TrainConfig& config) {
  if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
  TrainResult result;
  if (model.config().sharing == Sharing::kShared) {
    std::vector<const TrainInstance*> all;
    all.reserve(dataset.size());
    for (const TrainInstance& inst : dataset) all.push_back(&inst);
    run_partition(kg, all, model, config, 0, result);
    return result;
  }
  // Per-relation models: disjoint parameter blocks, one optimizer each.
  std::size_t n_queries = model.sizes().query_relations;
  for (QueryId q = 0; q < n_queries; ++q) {
    std::vector<const TrainInstance*> slice;
    for (const TrainInstance& inst : dataset) {
      if (inst.query == q) slice.push_back(&inst);
    }
    if (slice.empty()) continue;
    TrainResult part;
    run_partition(kg, slice, model, config, q + 1, part);
    result.loss_trace.insert(result.loss_trace.end(), part.loss_trace.begin(),
                             part.loss_trace.end());
    result.steps += part.steps;
    result.pool_sparsity_violations += part.pool_sparsity_violations;
    if (part.aborted) {
      result.aborted = true;
      result.abort_reason = part.abort_reason;
      return result;
    }
  }
  return result;
}

TrainResult train_pathquery(PathQueryModel& model,
                            std::span<const PathQuery> queries,
                            std::size_t n_entities,
                            const PathQueryTrainConfig& config) {
  if (queries.empty()) throw std::invalid_argument("train_pathquery: no queries");
  TrainResult result;
  AdamOptimizer adam(model.params(), config.adam);
  ParamSet grads = model.params().zeros_like();
  SplitMix64 shuffle_rng = SplitMix64::derive(config.seed, "pq_shuffle");
  SplitMix64 neg_rng = SplitMix64::derive(config.seed, "pq_negatives");

  std::vector<std::size_t> order(queries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_indices(order, shuffle_rng);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(start + config.batch_size, order.size());
      grads.set_zero();
      double batch_loss = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        const PathQuery& q = queries[order[i]];
        EntityId corrupt = q.target;
        while (corrupt == q.target) {
          corrupt = static_cast<EntityId>(neg_rng.below(n_entities));
        }
        const double s_pos = model.score(q.source, q.relations, q.target);
        const double s_neg = model.score(q.source, q.relations, corrupt);
        const double diff = s_pos - s_neg;
        batch_loss += softplus_neg(diff);
        const double g = sigmoid(diff) - 1.0;
        model.score_with_grad(q.source, q.relations, q.target, g, grads);
        model.score_with_grad(q.source, q.relations, corrupt, -g, grads);
      }
      const double count = static_cast<double>(end - start);
      batch_loss /= count;
      if (!std::isfinite(batch_loss)) {
        result.aborted = true;
        result.abort_reason = "non-finite batch loss at step " +
                              std::to_string(result.steps + 1);
        return result;
      }
      grads.scale(1.0 / count);
      adam.step(model.params(), grads);
      result.loss_trace.push_back(batch_loss);
      ++result.steps;
    }
  }
  return result;
}

}  // namespace chainkb
