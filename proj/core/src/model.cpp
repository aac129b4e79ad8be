#include "chainkb/model.hpp"

#include <cmath>
#include <stdexcept>

#include "chainkb/numeric.hpp"
#include "chainkb/rng.hpp"

namespace chainkb {

std::string_view to_string(Activation a) {
  return a == Activation::kSigmoid ? "sigmoid" : "relu";
}

std::string_view to_string(Sharing s) {
  return s == Sharing::kPerRelation ? "per_relation" : "shared";
}

std::string_view to_string(EntityMode m) {
  switch (m) {
    case EntityMode::kNone: return "none";
    case EntityMode::kLearnedEntity: return "learned_entity";
    case EntityMode::kTypeSum: return "type_sum";
    case EntityMode::kEntityPlusTypeSum: return "entity_plus_type_sum";
  }
  return "?";
}

Activation parse_activation(std::string_view s) {
  if (s == "sigmoid") return Activation::kSigmoid;
  if (s == "relu") return Activation::kRelu;
  throw std::invalid_argument("unknown activation '" + std::string(s) + "'");
}

Sharing parse_sharing(std::string_view s) {
  if (s == "per_relation") return Sharing::kPerRelation;
  if (s == "shared") return Sharing::kShared;
  throw std::invalid_argument("unknown sharing mode '" + std::string(s) + "'");
}

EntityMode parse_entity_mode(std::string_view s) {
  if (s == "none") return EntityMode::kNone;
  if (s == "learned_entity") return EntityMode::kLearnedEntity;
  if (s == "type_sum") return EntityMode::kTypeSum;
  if (s == "entity_plus_type_sum") return EntityMode::kEntityPlusTypeSum;
  throw std::invalid_argument("unknown entity mode '" + std::string(s) + "'");
}

void ModelConfig::validate() const {
  if (relation_dim == 0 || hidden_dim == 0 || entity_dim == 0) {
    throw std::invalid_argument("model dims must be positive");
  }
}

std::string PathModel::block_name(const ModelConfig& config, QueryId query,
                                  std::string_view param) {
  if (config.sharing == Sharing::kShared) return std::string(param);
  return "q" + std::to_string(query) + "/" + std::string(param);
}

ParamSet PathModel::make_layout(const ModelConfig& config, const VocabSizes& sizes) {
  config.validate();
  ParamSet params;
  const std::size_t d = config.relation_dim;
  const std::size_t h = config.hidden_dim;
  const std::size_t m = config.entity_dim;
  params.add("query_emb", sizes.query_relations, h);
  const std::size_t blocks =
      config.sharing == Sharing::kShared ? 1 : sizes.query_relations;
  for (std::size_t q = 0; q < blocks; ++q) {
    const auto query = static_cast<QueryId>(q);
    params.add(block_name(config, query, "relation_emb"), sizes.relations, d);
    params.add(block_name(config, query, "W_hh"), h, h);
    params.add(block_name(config, query, "W_ih"), h, d);
  }
  if (config.uses_entities()) {
    params.add("W_eh", h, m);
    if (config.uses_types()) params.add("type_emb", sizes.types, m);
    if (config.uses_entity_table()) params.add("entity_emb", sizes.entities, m);
  }
  return params;
}

namespace {

// Projection matrices get uniform(-a, a) with a = sqrt(6/(fan_in+fan_out));
// embedding tables are scaled by their row width only, so the draw does not
// shrink with vocabulary size.
void init_entry(ParamSet::Entry& entry, std::uint64_t seed) {
  Matrix& m = entry.value;
  const bool is_table = entry.name.ends_with("_emb");
  const double denom = is_table
                           ? 2.0 * static_cast<double>(m.cols())
                           : static_cast<double>(m.rows() + m.cols());
  const double a = std::sqrt(6.0 / denom);
  SplitMix64 rng = SplitMix64::derive(seed, "init", fnv1a64(entry.name));
  for (double& x : m.data()) x = rng.uniform(-a, a);
}

}  // namespace

PathModel::PathModel(ModelConfig config, VocabSizes sizes, std::uint64_t init_seed)
    : config_(config), sizes_(sizes), params_(make_layout(config, sizes)) {
  for (std::size_t e = 0; e < params_.entry_count(); ++e) {
    init_entry(params_.entry(e), init_seed);
  }
}

PathModel::PathModel(ModelConfig config, VocabSizes sizes, ParamSet params)
    : config_(config), sizes_(sizes), params_(std::move(params)) {
  const ParamSet expected = make_layout(config_, sizes_);
  if (!params_.same_layout(expected)) {
    throw std::invalid_argument(
        "PathModel: parameter layout does not match config/vocab sizes");
  }
}

const Matrix& PathModel::recurrence(QueryId query) const {
  return params_.at(block_name(config_, query, "W_hh"));
}

const Matrix& PathModel::input_projection(QueryId query) const {
  return params_.at(block_name(config_, query, "W_ih"));
}

const Matrix& PathModel::relation_table(QueryId query) const {
  return params_.at(block_name(config_, query, "relation_emb"));
}

const Matrix& PathModel::query_table() const { return params_.at("query_emb"); }

Vector PathModel::entity_vector(const KnowledgeGraph& kg, EntityId entity) const {
  Vector v(config_.entity_dim, 0.0);
  if (config_.uses_types()) {
    const Matrix& types = params_.at("type_emb");
    for (TypeId t : kg.entity_types(entity)) {
      axpy(1.0, types.row(t), v);
    }
  }
  if (config_.uses_entity_table()) {
    axpy(1.0, params_.at("entity_emb").row(entity), v);
  }
  return v;
}

PathEncoding PathModel::encode_path(const KnowledgeGraph& kg, const Path& path,
                                    QueryId query) const {
  if (path.steps.empty()) {
    throw std::invalid_argument("encode_path: path has no steps");
  }
  if (query >= sizes_.query_relations) {
    throw std::invalid_argument("encode_path: query relation id out of range");
  }
  const Matrix& w_hh = recurrence(query);
  const Matrix& w_ih = input_projection(query);
  const Matrix& relations = relation_table(query);

  PathEncoding enc;
  enc.pre_activations.reserve(path.steps.size());
  enc.hidden.reserve(path.steps.size());

  Vector prev(config_.hidden_dim, 0.0);  // h_0 = 0
  for (const PathStep& step : path.steps) {
    if (step.relation >= sizes_.relations || step.entity >= sizes_.entities) {
      throw std::invalid_argument("encode_path: id out of range");
    }
    Vector a = matvec(w_hh, prev);
    axpy(1.0, matvec(w_ih, relations.row(step.relation)), a);
    if (config_.uses_entities()) {
      Vector ev = entity_vector(kg, step.entity);
      axpy(1.0, matvec(params_.at("W_eh"), ev), a);
      enc.entity_inputs.push_back(std::move(ev));
    }
    Vector h;
    if (config_.activation == Activation::kRelu) {
      for (double x : a) {
        enc.relu_margin = std::min(enc.relu_margin, std::fabs(x));
        enc.relu_pattern = fnv1a64_mix(enc.relu_pattern, x > 0.0 ? 1 : 0);
      }
      h = relu(a);
    } else {
      h.resize(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) h[i] = sigmoid(a[i]);
    }
    enc.pre_activations.push_back(std::move(a));
    enc.hidden.push_back(h);
    prev = std::move(h);
  }
  return enc;
}

double PathModel::score_path(const PathEncoding& encoding, QueryId query) const {
  return dot(encoding.final_hidden(), query_table().row(query));
}

double PathModel::score_path(const KnowledgeGraph& kg, const Path& path,
                             QueryId query) const {
  return score_path(encode_path(kg, path, query), query);
}

void PathModel::backward(const KnowledgeGraph& kg, const Path& path,
                         QueryId query, const PathEncoding& encoding,
                         double d_score, ParamSet& grads) const {
  const std::size_t k = encoding.length();
  if (k != path.steps.size()) {
    throw std::invalid_argument("backward: encoding does not match path");
  }
  const Matrix& w_hh = recurrence(query);
  const Matrix& w_ih = input_projection(query);
  const Matrix& relations = relation_table(query);

  // score = h_k . y_q
  axpy(d_score, encoding.final_hidden(), grads.at("query_emb").row(query));
  Vector dh(config_.hidden_dim);
  const auto query_row = query_table().row(query);
  for (std::size_t i = 0; i < dh.size(); ++i) dh[i] = d_score * query_row[i];

  for (std::size_t t = k; t-- > 0;) {
    const Vector& a = encoding.pre_activations[t];
    const Vector& h = encoding.hidden[t];
    Vector da(dh.size());
    if (config_.activation == Activation::kRelu) {
      for (std::size_t i = 0; i < da.size(); ++i) {
        da[i] = a[i] > 0.0 ? dh[i] : 0.0;
      }
    } else {
      for (std::size_t i = 0; i < da.size(); ++i) {
        da[i] = dh[i] * h[i] * (1.0 - h[i]);
      }
    }
    if (t > 0) {
      add_outer(grads.at(block_name(config_, query, "W_hh")), da,
                encoding.hidden[t - 1]);
    }
    const RelationId rel = path.steps[t].relation;
    add_outer(grads.at(block_name(config_, query, "W_ih")), da, relations.row(rel));
    axpy(1.0, matvec_transposed(w_ih, da),
         grads.at(block_name(config_, query, "relation_emb")).row(rel));
    if (config_.uses_entities()) {
      const Matrix& w_eh = params_.at("W_eh");
      add_outer(grads.at("W_eh"), da, encoding.entity_inputs[t]);
      const Vector de = matvec_transposed(w_eh, da);
      const EntityId entity = path.steps[t].entity;
      if (config_.uses_types()) {
        Matrix& type_grads = grads.at("type_emb");
        for (TypeId ty : kg.entity_types(entity)) {
          axpy(1.0, de, type_grads.row(ty));
        }
      }
      if (config_.uses_entity_table()) {
        axpy(1.0, de, grads.at("entity_emb").row(entity));
      }
    }
    dh = matvec_transposed(w_hh, da);
  }
}

}  // namespace chainkb
