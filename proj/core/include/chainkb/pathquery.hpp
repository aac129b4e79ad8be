#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chainkb/graph.hpp"
#include "chainkb/params.hpp"
#include "chainkb/rng.hpp"

namespace chainkb {

enum class PathQueryVariant { kRnnDiag, kCompTransE, kCompBilinearDiag };

std::string_view to_string(PathQueryVariant v);
PathQueryVariant parse_pathquery_variant(std::string_view s);

// (source, relation sequence, expected target).
struct PathQuery {
  EntityId source = 0;
  std::vector<RelationId> relations;
  EntityId target = 0;
  friend auto operator<=>(const PathQuery&, const PathQuery&) = default;
};

// Compositional scorers for path queries. Entity, relation, and hidden
// dimensions are tied to one `dim`. rnn_diag composes the relation sequence
// with the shared ReLU recurrence, sums the per-step hidden states into H,
// and scores x_s^T diag(H) x_t; the two baselines combine relation vectors
// additively (TransE) or multiplicatively (bilinear-diag).
class PathQueryModel {
 public:
  PathQueryModel(PathQueryVariant variant, std::size_t n_entities,
                 std::size_t n_relations, std::size_t dim, std::uint64_t seed);

  PathQueryVariant variant() const { return variant_; }
  std::size_t dim() const { return dim_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }

  double score(EntityId source, std::span<const RelationId> relations,
               EntityId target) const;

  // Scores many targets against one (source, relation sequence); the shared
  // part of the computation is done once.
  std::vector<double> score_targets(EntityId source,
                                    std::span<const RelationId> relations,
                                    std::span<const EntityId> targets) const;

  // Accumulates d(score)/d(theta) * d_score into grads; returns the score.
  double score_with_grad(EntityId source, std::span<const RelationId> relations,
                         EntityId target, double d_score, ParamSet& grads) const;

 private:
  struct RnnForward {
    std::vector<Vector> pre_activations;
    std::vector<Vector> hidden;
    Vector hidden_sum;
  };
  RnnForward run_rnn(std::span<const RelationId> relations) const;
  // x_s + sum of relation vectors, accumulated in sequence order.
  Vector transe_accumulate(EntityId source,
                           std::span<const RelationId> relations) const;
  Vector bilinear_product(std::span<const RelationId> relations) const;

  PathQueryVariant variant_;
  std::size_t dim_;
  ParamSet params_;
};

// Random-walk path queries over the graph, deduplicated against `seen`
// (pass the same set across calls to keep train and test disjoint).
std::vector<PathQuery> generate_path_queries(const KnowledgeGraph& kg,
                                             std::size_t count,
                                             std::size_t min_hops,
                                             std::size_t max_hops,
                                             SplitMix64& rng,
                                             std::set<PathQuery>& seen);

// Entities reachable from `source` by following the exact relation sequence.
std::set<EntityId> reachable_targets(const KnowledgeGraph& kg, EntityId source,
                                     std::span<const RelationId> relations);

// Mean quantile of the queries' targets against all non-answer entities.
double pathquery_mean_quantile(const PathQueryModel& model,
                               const KnowledgeGraph& kg,
                               std::span<const PathQuery> queries);

}  // namespace chainkb
