#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "chainkb/model.hpp"
#include "chainkb/numeric.hpp"
#include "chainkb/rng.hpp"
#include "test_helpers.hpp"

using namespace chainkb;
using namespace chainkb::testing;

namespace {

ModelConfig small_config(EntityMode mode = EntityMode::kNone,
                         Sharing sharing = Sharing::kShared,
                         Activation act = Activation::kRelu) {
  ModelConfig cfg;
  cfg.relation_dim = 8;
  cfg.hidden_dim = 8;
  cfg.entity_dim = 4;
  cfg.activation = act;
  cfg.sharing = sharing;
  cfg.entity_mode = mode;
  return cfg;
}

}  // namespace

TEST_CASE("entity_vector under type_sum") {
  KnowledgeGraph kg = toy_graph();
  PathModel model(small_config(EntityMode::kTypeSum), sizes_of(kg, 1), 1);
  const Matrix& types = model.params().at("type_emb");

  // single type: exactly that row
  const EntityId e2 = entity(kg, "e2");
  const auto t1 = *kg.types().find("t1");
  const Vector v2 = model.entity_vector(kg, e2);
  for (std::size_t i = 0; i < v2.size(); ++i) CHECK(v2[i] == types.row(t1)[i]);

  // untyped entity: zero vector
  const Vector v0 = model.entity_vector(kg, entity(kg, "e0"));
  CHECK(v0 == Vector(4, 0.0));

  // two types: element-wise sum, checked against scalar addition
  const EntityId e1 = entity(kg, "e1");
  const auto t0 = *kg.types().find("t0");
  const Vector v1 = model.entity_vector(kg, e1);
  for (std::size_t i = 0; i < v1.size(); ++i) {
    CHECK(v1[i] == doctest::Approx(types.row(t0)[i] + types.row(t1)[i]).epsilon(1e-15));
  }
}

TEST_CASE("entity_vector under learned and combined modes") {
  KnowledgeGraph kg = toy_graph();
  const EntityId e1 = entity(kg, "e1");
  {
    PathModel model(small_config(EntityMode::kLearnedEntity), sizes_of(kg, 1), 2);
    const Vector v = model.entity_vector(kg, e1);
    const auto row = model.params().at("entity_emb").row(e1);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == row[i]);
  }
  {
    PathModel model(small_config(EntityMode::kEntityPlusTypeSum), sizes_of(kg, 1), 2);
    const Vector v = model.entity_vector(kg, e1);
    const auto row = model.params().at("entity_emb").row(e1);
    const Matrix& types = model.params().at("type_emb");
    const auto t0 = *kg.types().find("t0");
    const auto t1 = *kg.types().find("t1");
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(v[i] ==
            doctest::Approx(row[i] + types.row(t0)[i] + types.row(t1)[i]).epsilon(1e-15));
    }
  }
}

TEST_CASE("length-1 path with identity input projection encodes relu(y_r)") {
  KnowledgeGraph kg = toy_graph();
  PathModel model(small_config(), sizes_of(kg, 1), 3);
  model.params().at("W_hh").set_zero();
  Matrix& w_ih = model.params().at("W_ih");
  w_ih.set_zero();
  for (std::size_t i = 0; i < 8; ++i) w_ih(i, i) = 1.0;

  const auto r0 = relation(kg, "r0");
  const Path path{entity(kg, "e0"), {{r0, entity(kg, "e1")}}};
  const PathEncoding enc = model.encode_path(kg, path, 0);
  const Vector expected = relu(model.params().at("relation_emb").row(r0));
  CHECK(enc.final_hidden() == expected);
}

TEST_CASE("all-zero parameters encode to f(0)") {
  KnowledgeGraph kg = toy_graph();
  const Path path{entity(kg, "e0"),
                  {{relation(kg, "r0"), entity(kg, "e1")},
                   {relation(kg, "r1"), entity(kg, "e2")}}};
  {
    PathModel model(small_config(), sizes_of(kg, 1), 4);
    model.params().set_zero();
    CHECK(model.encode_path(kg, path, 0).final_hidden() == Vector(8, 0.0));
  }
  {
    PathModel model(small_config(EntityMode::kNone, Sharing::kShared,
                                 Activation::kSigmoid),
                    sizes_of(kg, 1), 4);
    model.params().set_zero();
    CHECK(model.encode_path(kg, path, 0).final_hidden() == Vector(8, 0.5));
  }
}

TEST_CASE("a three-hop encoding matches a step-by-step hand computation") {
  KnowledgeGraph kg = toy_graph();
  PathModel model(small_config(EntityMode::kTypeSum), sizes_of(kg, 1), 5);
  const Path path{entity(kg, "e0"),
                  {{relation(kg, "r0"), entity(kg, "e1")},
                   {relation(kg, "r1"), entity(kg, "e2")},
                   {relation(kg, "r2"), entity(kg, "e3")}}};
  const PathEncoding enc = model.encode_path(kg, path, 0);

  const Matrix& w_hh = model.params().at("W_hh");
  const Matrix& w_ih = model.params().at("W_ih");
  const Matrix& w_eh = model.params().at("W_eh");
  const Matrix& rel = model.params().at("relation_emb");
  Vector h(8, 0.0);
  for (const PathStep& step : path.steps) {
    Vector a = matvec(w_hh, h);
    axpy(1.0, matvec(w_ih, rel.row(step.relation)), a);
    axpy(1.0, matvec(w_eh, model.entity_vector(kg, step.entity)), a);
    h = relu(a);
  }
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(enc.final_hidden()[i] == doctest::Approx(h[i]).epsilon(1e-15));
  }
}

TEST_CASE("score_path is the dot product with the query vector") {
  KnowledgeGraph kg = toy_graph();
  PathModel model(small_config(), sizes_of(kg, 2), 6);
  // basis alignment: y_pi = y_q = e_0 basis vector -> score 1
  PathEncoding enc;
  enc.hidden.push_back(Vector(8, 0.0));
  enc.hidden.back()[0] = 1.0;
  Matrix& queries = model.params().at("query_emb");
  queries.set_zero();
  queries(0, 0) = 1.0;
  queries(1, 1) = 1.0;
  CHECK(model.score_path(enc, 0) == 1.0);
  CHECK(model.score_path(enc, 1) == 0.0);  // orthogonal

  SplitMix64 rng(8);
  Vector y(8), q(8);
  for (double& x : y) x = rng.uniform(-1.0, 1.0);
  for (double& x : q) x = rng.uniform(-1.0, 1.0);
  enc.hidden.back() = y;
  for (std::size_t i = 0; i < 8; ++i) queries(0, i) = q[i];
  CHECK(model.score_path(enc, 0) == dot(y, q));
}

TEST_CASE("shared encodings are independent of the query relation") {
  KnowledgeGraph kg = toy_graph();
  PathModel model(small_config(EntityMode::kTypeSum), sizes_of(kg, 3), 7);
  const Path path{entity(kg, "e0"),
                  {{relation(kg, "r3"), entity(kg, "e4")},
                   {relation(kg, "r4"), entity(kg, "e3")}}};
  const auto a = model.encode_path(kg, path, 0);
  const auto b = model.encode_path(kg, path, 2);
  CHECK(a.final_hidden() == b.final_hidden());
}

TEST_CASE("without entities, paths with equal relation sequences score identically") {
  KnowledgeGraph kg = toy_graph();
  PathModel model(small_config(), sizes_of(kg, 1), 9);
  // same relation sequence [r0, r1] through different intermediates
  const Path via_e1{entity(kg, "e0"),
                    {{relation(kg, "r0"), entity(kg, "e1")},
                     {relation(kg, "r1"), entity(kg, "e2")}}};
  const Path via_e5{entity(kg, "e0"),
                    {{relation(kg, "r0"), entity(kg, "e5")},
                     {relation(kg, "r1"), entity(kg, "e3")}}};
  const double s1 = model.score_path(kg, via_e1, 0);
  const double s2 = model.score_path(kg, via_e5, 0);
  CHECK(s1 == s2);  // bit-exact

  // with types the same pair of paths may separate
  PathModel typed(small_config(EntityMode::kTypeSum), sizes_of(kg, 1), 9);
  CHECK(typed.score_path(kg, via_e1, 0) != typed.score_path(kg, via_e5, 0));
}

TEST_CASE("per-relation sharing keeps private blocks apart") {
  KnowledgeGraph kg = toy_graph();
  PathModel model(small_config(EntityMode::kNone, Sharing::kPerRelation,
                               Activation::kSigmoid),
                  sizes_of(kg, 2), 10);
  CHECK(model.params().has("q0/W_hh"));
  CHECK(model.params().has("q1/W_hh"));
  CHECK(model.params().has("q0/relation_emb"));
  CHECK_FALSE(model.params().has("W_hh"));

  const Path path{entity(kg, "e0"), {{relation(kg, "r0"), entity(kg, "e1")}}};
  // Different blocks, different parameters, different encodings.
  const auto enc0 = model.encode_path(kg, path, 0);
  const auto enc1 = model.encode_path(kg, path, 1);
  CHECK(enc0.final_hidden() != enc1.final_hidden());
}

TEST_CASE("model construction validates parameter layout") {
  KnowledgeGraph kg = toy_graph();
  const ModelConfig cfg = small_config();
  PathModel model(cfg, sizes_of(kg, 1), 11);
  ParamSet params = model.params();
  CHECK_NOTHROW(PathModel(cfg, sizes_of(kg, 1), params));
  CHECK_THROWS_AS(PathModel(cfg, sizes_of(kg, 2), params), std::invalid_argument);
}
