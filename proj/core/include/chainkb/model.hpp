#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "chainkb/graph.hpp"
#include "chainkb/params.hpp"

namespace chainkb {

enum class Activation { kSigmoid, kRelu };
enum class Sharing { kPerRelation, kShared };
enum class EntityMode { kNone, kLearnedEntity, kTypeSum, kEntityPlusTypeSum };

std::string_view to_string(Activation a);
std::string_view to_string(Sharing s);
std::string_view to_string(EntityMode m);
Activation parse_activation(std::string_view s);
Sharing parse_sharing(std::string_view s);
EntityMode parse_entity_mode(std::string_view s);

struct ModelConfig {
  std::size_t relation_dim = 250;  // d
  std::size_t hidden_dim = 250;    // h
  std::size_t entity_dim = 50;     // m
  Activation activation = Activation::kRelu;
  Sharing sharing = Sharing::kShared;
  EntityMode entity_mode = EntityMode::kNone;

  bool uses_entities() const { return entity_mode != EntityMode::kNone; }
  bool uses_types() const {
    return entity_mode == EntityMode::kTypeSum ||
           entity_mode == EntityMode::kEntityPlusTypeSum;
  }
  bool uses_entity_table() const {
    return entity_mode == EntityMode::kLearnedEntity ||
           entity_mode == EntityMode::kEntityPlusTypeSum;
  }
  void validate() const;
};

struct VocabSizes {
  std::size_t entities = 0;
  std::size_t relations = 0;
  std::size_t types = 0;
  std::size_t query_relations = 0;
};

// Forward caches for one encoded path, kept for the backward pass.
struct PathEncoding {
  std::vector<Vector> pre_activations;  // a_t
  std::vector<Vector> hidden;           // h_t = f(a_t)
  std::vector<Vector> entity_inputs;    // entity vector consumed at step t
  // Smallest |a_t[i]| seen across ReLU units; infinity under sigmoid.
  double relu_margin = std::numeric_limits<double>::infinity();
  // FNV fold of the ReLU sign bits, for kink detection.
  std::uint64_t relu_pattern = 0xcbf29ce484222325ULL;

  std::size_t length() const { return hidden.size(); }
  const Vector& final_hidden() const { return hidden.back(); }
};

// Recurrent composition of a relation path plus the dot-product scorer
// against a query-relation vector. One parameter block serves every query
// relation under shared mode; per-relation mode keeps a private block
// (recurrence matrices + relation table) for each query relation.
class PathModel {
 public:
  PathModel(ModelConfig config, VocabSizes sizes, std::uint64_t init_seed);
  PathModel(ModelConfig config, VocabSizes sizes, ParamSet params);

  const ModelConfig& config() const { return config_; }
  const VocabSizes& sizes() const { return sizes_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }

  // Entity representation per entity_mode: its type-embedding sum, its own
  // embedding row, or both; a typeless entity contributes a zero vector.
  Vector entity_vector(const KnowledgeGraph& kg, EntityId entity) const;

  PathEncoding encode_path(const KnowledgeGraph& kg, const Path& path,
                           QueryId query) const;
  double score_path(const PathEncoding& encoding, QueryId query) const;
  double score_path(const KnowledgeGraph& kg, const Path& path, QueryId query) const;

  // Accumulates d(score)/d(theta) * d_score into `grads` for the path that
  // produced `encoding`.
  void backward(const KnowledgeGraph& kg, const Path& path, QueryId query,
                const PathEncoding& encoding, double d_score,
                ParamSet& grads) const;

  // Parameter naming; shared entries have no block prefix.
  static std::string block_name(const ModelConfig& config, QueryId query,
                                std::string_view param);
  static ParamSet make_layout(const ModelConfig& config, const VocabSizes& sizes);

  const Matrix& recurrence(QueryId query) const;       // W_hh, h x h
  const Matrix& input_projection(QueryId query) const; // W_ih, h x d
  const Matrix& relation_table(QueryId query) const;   // |relations| x d
  const Matrix& query_table() const;                   // |query relations| x h

 private:
  ModelConfig config_;
  VocabSizes sizes_;
  ParamSet params_;
};

}  // namespace chainkb
