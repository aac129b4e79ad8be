#include "chainkb/pathquery.hpp"

#include <cmath>
#include <stdexcept>

#include "chainkb/eval.hpp"
#include "chainkb/numeric.hpp"
#include "chainkb/rng.hpp"

namespace chainkb {

std::string_view to_string(PathQueryVariant v) {
  switch (v) {
    case PathQueryVariant::kRnnDiag: return "rnn_diag";
    case PathQueryVariant::kCompTransE: return "comp_transe";
    case PathQueryVariant::kCompBilinearDiag: return "comp_bilinear_diag";
  }
  return "?";
}

PathQueryVariant parse_pathquery_variant(std::string_view s) {
  if (s == "rnn_diag") return PathQueryVariant::kRnnDiag;
  if (s == "comp_transe") return PathQueryVariant::kCompTransE;
  if (s == "comp_bilinear_diag") return PathQueryVariant::kCompBilinearDiag;
  throw std::invalid_argument("unknown path-query variant '" + std::string(s) + "'");
}

PathQueryModel::PathQueryModel(PathQueryVariant variant, std::size_t n_entities,
                               std::size_t n_relations, std::size_t dim,
                               std::uint64_t seed)
    : variant_(variant), dim_(dim) {
  if (dim == 0) throw std::invalid_argument("PathQueryModel: dim must be positive");
  params_.add("entity_emb", n_entities, dim);
  params_.add("relation_emb", n_relations, dim);
  if (variant == PathQueryVariant::kRnnDiag) {
    params_.add("W_hh", dim, dim);
    params_.add("W_ih", dim, dim);
  }
  for (std::size_t e = 0; e < params_.entry_count(); ++e) {
    auto& entry = params_.entry(e);
    const bool is_table = entry.name.ends_with("_emb");
    const double denom = is_table ? 2.0 * static_cast<double>(dim)
                                  : static_cast<double>(2 * dim);
    const double a = std::sqrt(6.0 / denom);
    SplitMix64 rng = SplitMix64::derive(seed, "pathquery_init", fnv1a64(entry.name));
    for (double& x : entry.value.data()) x = rng.uniform(-a, a);
  }
}

PathQueryModel::RnnForward PathQueryModel::run_rnn(
    std::span<const RelationId> relations) const {
  const Matrix& w_hh = params_.at("W_hh");
  const Matrix& w_ih = params_.at("W_ih");
  const Matrix& table = params_.at("relation_emb");
  RnnForward fwd;
  fwd.hidden_sum.assign(dim_, 0.0);
  Vector prev(dim_, 0.0);
  for (RelationId r : relations) {
    Vector a = matvec(w_hh, prev);
    axpy(1.0, matvec(w_ih, table.row(r)), a);
    Vector h = relu(a);
    axpy(1.0, h, fwd.hidden_sum);
    fwd.pre_activations.push_back(std::move(a));
    fwd.hidden.push_back(h);
    prev = std::move(h);
  }
  return fwd;
}

Vector PathQueryModel::transe_accumulate(
    EntityId source, std::span<const RelationId> relations) const {
  const Matrix& entities = params_.at("entity_emb");
  const Matrix& table = params_.at("relation_emb");
  Vector acc(entities.row(source).begin(), entities.row(source).end());
  for (RelationId r : relations) axpy(1.0, table.row(r), acc);
  return acc;
}

Vector PathQueryModel::bilinear_product(std::span<const RelationId> relations) const {
  const Matrix& table = params_.at("relation_emb");
  Vector prod(dim_, 1.0);
  for (RelationId r : relations) {
    const auto row = table.row(r);
    for (std::size_t i = 0; i < dim_; ++i) prod[i] *= row[i];
  }
  return prod;
}

double PathQueryModel::score(EntityId source, std::span<const RelationId> relations,
                             EntityId target) const {
  const EntityId targets[1] = {target};
  return score_targets(source, relations, targets)[0];
}

std::vector<double> PathQueryModel::score_targets(
    EntityId source, std::span<const RelationId> relations,
    std::span<const EntityId> targets) const {
  if (relations.empty()) {
    throw std::invalid_argument("path query has no relations");
  }
  const Matrix& entities = params_.at("entity_emb");
  std::vector<double> out;
  out.reserve(targets.size());
  switch (variant_) {
    case PathQueryVariant::kRnnDiag: {
      const RnnForward fwd = run_rnn(relations);
      const auto xs = entities.row(source);
      for (EntityId t : targets) {
        const auto xt = entities.row(t);
        double s = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
          // (x_s * x_t) first keeps the form exactly symmetric in s and t
          s += xs[i] * xt[i] * fwd.hidden_sum[i];
        }
        out.push_back(s);
      }
      break;
    }
    case PathQueryVariant::kCompTransE: {
      const Vector acc = transe_accumulate(source, relations);
      for (EntityId t : targets) {
        const auto xt = entities.row(t);
        double sq = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
          const double delta = acc[i] - xt[i];
          sq += delta * delta;
        }
        out.push_back(-sq);
      }
      break;
    }
    case PathQueryVariant::kCompBilinearDiag: {
      const Vector prod = bilinear_product(relations);
      const auto xs = entities.row(source);
      for (EntityId t : targets) {
        const auto xt = entities.row(t);
        double s = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) s += xs[i] * xt[i] * prod[i];
        out.push_back(s);
      }
      break;
    }
  }
  return out;
}

double PathQueryModel::score_with_grad(EntityId source,
                                       std::span<const RelationId> relations,
                                       EntityId target, double d_score,
                                       ParamSet& grads) const {
  if (relations.empty()) {
    throw std::invalid_argument("path query has no relations");
  }
  const Matrix& entities = params_.at("entity_emb");
  const auto xs = entities.row(source);
  const auto xt = entities.row(target);
  Matrix& entity_grads = grads.at("entity_emb");

  switch (variant_) {
    case PathQueryVariant::kRnnDiag: {
      const RnnForward fwd = run_rnn(relations);
      double score = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) {
        score += xs[i] * xt[i] * fwd.hidden_sum[i];
      }
      Vector d_sum(dim_);
      for (std::size_t i = 0; i < dim_; ++i) {
        entity_grads.row(source)[i] += d_score * fwd.hidden_sum[i] * xt[i];
        entity_grads.row(target)[i] += d_score * xs[i] * fwd.hidden_sum[i];
        d_sum[i] = d_score * xs[i] * xt[i];
      }
      // Every step's hidden state feeds the sum, so the recurrent gradient
      // picks up d_sum at each step on the way down.
      const Matrix& w_hh = params_.at("W_hh");
      const Matrix& w_ih = params_.at("W_ih");
      const Matrix& table = params_.at("relation_emb");
      Vector carry(dim_, 0.0);
      for (std::size_t t = relations.size(); t-- > 0;) {
        Vector dh = carry;
        axpy(1.0, d_sum, dh);
        const Vector& a = fwd.pre_activations[t];
        Vector da(dim_);
        for (std::size_t i = 0; i < dim_; ++i) da[i] = a[i] > 0.0 ? dh[i] : 0.0;
        if (t > 0) add_outer(grads.at("W_hh"), da, fwd.hidden[t - 1]);
        add_outer(grads.at("W_ih"), da, table.row(relations[t]));
        axpy(1.0, matvec_transposed(w_ih, da),
             grads.at("relation_emb").row(relations[t]));
        carry = matvec_transposed(w_hh, da);
      }
      return score;
    }
    case PathQueryVariant::kCompTransE: {
      const Vector acc = transe_accumulate(source, relations);
      double sq = 0.0;
      Vector delta(dim_);
      for (std::size_t i = 0; i < dim_; ++i) {
        delta[i] = acc[i] - xt[i];
        sq += delta[i] * delta[i];
      }
      Matrix& rel_grads = grads.at("relation_emb");
      for (std::size_t i = 0; i < dim_; ++i) {
        const double g = -2.0 * d_score * delta[i];
        entity_grads.row(source)[i] += g;
        entity_grads.row(target)[i] -= g;
      }
      for (RelationId r : relations) {
        for (std::size_t i = 0; i < dim_; ++i) {
          rel_grads.row(r)[i] += -2.0 * d_score * delta[i];
        }
      }
      return -sq;
    }
    case PathQueryVariant::kCompBilinearDiag: {
      const Matrix& table = params_.at("relation_emb");
      const std::size_t k = relations.size();
      // prefix[t][i] = prod of w_{r_1..r_t}[i]; suffix likewise from the end.
      std::vector<Vector> prefix(k + 1, Vector(dim_, 1.0));
      std::vector<Vector> suffix(k + 1, Vector(dim_, 1.0));
      for (std::size_t t = 0; t < k; ++t) {
        const auto row = table.row(relations[t]);
        for (std::size_t i = 0; i < dim_; ++i) {
          prefix[t + 1][i] = prefix[t][i] * row[i];
        }
      }
      for (std::size_t t = k; t-- > 0;) {
        const auto row = table.row(relations[t]);
        for (std::size_t i = 0; i < dim_; ++i) {
          suffix[t][i] = row[i] * suffix[t + 1][i];
        }
      }
      double score = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) {
        score += xs[i] * xt[i] * prefix[k][i];
        entity_grads.row(source)[i] += d_score * prefix[k][i] * xt[i];
        entity_grads.row(target)[i] += d_score * xs[i] * prefix[k][i];
      }
      Matrix& rel_grads = grads.at("relation_emb");
      for (std::size_t t = 0; t < k; ++t) {
        for (std::size_t i = 0; i < dim_; ++i) {
          rel_grads.row(relations[t])[i] +=
              d_score * xs[i] * prefix[t][i] * suffix[t + 1][i] * xt[i];
        }
      }
      return score;
    }
  }
  throw std::logic_error("unreachable");
}

std::vector<PathQuery> generate_path_queries(const KnowledgeGraph& kg,
                                             std::size_t count,
                                             std::size_t min_hops,
                                             std::size_t max_hops,
                                             SplitMix64& rng,
                                             std::set<PathQuery>& seen) {
  if (min_hops < 1 || max_hops < min_hops) {
    throw std::invalid_argument("generate_path_queries: bad hop range");
  }
  std::vector<EntityId> sources;
  for (EntityId e = 0; e < kg.entities().size(); ++e) {
    if (!kg.out_edges(e).empty()) sources.push_back(e);
  }
  if (sources.empty()) {
    throw std::invalid_argument("generate_path_queries: graph has no edges");
  }
  std::vector<PathQuery> queries;
  std::size_t guard = 0;
  const std::size_t guard_limit = count * 200;
  while (queries.size() < count && guard++ < guard_limit) {
    PathQuery q;
    q.source = sources[rng.below(sources.size())];
    const std::size_t hops = min_hops + rng.below(max_hops - min_hops + 1);
    EntityId at = q.source;
    bool ok = true;
    for (std::size_t h = 0; h < hops; ++h) {
      const auto edges = kg.out_edges(at);
      if (edges.empty()) {
        ok = false;
        break;
      }
      const Edge& e = edges[rng.below(edges.size())];
      q.relations.push_back(e.relation);
      at = e.target;
    }
    if (!ok) continue;
    q.target = at;
    if (seen.insert(q).second) queries.push_back(std::move(q));
  }
  if (queries.size() < count) {
    throw std::runtime_error(
        "generate_path_queries: could not draw enough distinct queries");
  }
  return queries;
}

std::set<EntityId> reachable_targets(const KnowledgeGraph& kg, EntityId source,
                                     std::span<const RelationId> relations) {
  std::set<EntityId> frontier{source};
  for (RelationId r : relations) {
    std::set<EntityId> next;
    for (EntityId e : frontier) {
      for (const Edge& edge : kg.out_edges(e)) {
        if (edge.relation == r) next.insert(edge.target);
      }
    }
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  return frontier;
}

double pathquery_mean_quantile(const PathQueryModel& model,
                               const KnowledgeGraph& kg,
                               std::span<const PathQuery> queries) {
  std::vector<PathQueryJudgment> judgments;
  std::vector<EntityId> all(kg.entities().size());
  for (EntityId e = 0; e < all.size(); ++e) all[e] = e;
  for (const PathQuery& q : queries) {
    const auto correct = reachable_targets(kg, q.source, q.relations);
    const auto scores = model.score_targets(q.source, q.relations, all);
    PathQueryJudgment judgment;
    judgment.correct_score = scores[q.target];
    for (EntityId e = 0; e < all.size(); ++e) {
      if (!correct.contains(e)) judgment.incorrect_scores.push_back(scores[e]);
    }
    if (!judgment.incorrect_scores.empty()) {
      judgments.push_back(std::move(judgment));
    }
  }
  return mean_quantile(judgments);
}

}  // namespace chainkb
