#include <doctest.h>

#include <stdexcept>

#include <sstream>

#include "chainkb/graph.hpp"

using namespace chainkb;

TEST_CASE("load_triples builds vocabularies, inverses and adjacency") {
  std::istringstream in("a\tr\tb\nb\ts\tc\n");
  TripleLoadStats stats;
  KnowledgeGraph kg = load_triples(in, &stats);
  CHECK(kg.entities().size() == 3);
  CHECK(kg.relations().size() == 4);  // r, s and their inverses
  CHECK(kg.triple_count() == 4);      // two facts, two synthesized inverses
  CHECK(stats.stored == 2);
  CHECK(stats.duplicates == 0);

  const auto a = *kg.entities().find("a");
  const auto b = *kg.entities().find("b");
  const auto r = *kg.relations().find("r");
  const auto r_inv = *kg.relations().find("_inv:r");
  CHECK(kg.has_triple(a, r, b));
  CHECK(kg.has_triple(b, r_inv, a));
  CHECK(kg.inverse_relation(r) == r_inv);
  CHECK(kg.inverse_relation(r_inv) == r);
  CHECK(kg.is_inverse(r_inv));
  CHECK_FALSE(kg.is_inverse(r));
  CHECK(kg.check_invariants());
}

TEST_CASE("load_triples on an empty file gives an empty valid graph") {
  std::istringstream in("");
  TripleLoadStats stats;
  KnowledgeGraph kg = load_triples(in, &stats);
  CHECK(kg.entities().size() == 0);
  CHECK(kg.triple_count() == 0);
  CHECK(stats.lines == 0);
  CHECK(kg.check_invariants());
}

TEST_CASE("load_triples deduplicates repeats and counts them") {
  std::istringstream in("a\tr\tb\na\tr\tb\n");
  TripleLoadStats stats;
  KnowledgeGraph kg = load_triples(in, &stats);
  CHECK(stats.stored == 1);
  CHECK(stats.duplicates == 1);
  CHECK(kg.triple_count() == 2);  // fact + inverse
}

TEST_CASE("load_triples reports malformed lines with their number") {
  std::istringstream in("a\tr\tb\nbroken line\n");
  CHECK_THROWS_WITH_AS(load_triples(in),
                       "triples line 2: expected source<TAB>relation<TAB>target",
                       std::runtime_error);
}

TEST_CASE("load_triples rejects the reserved inverse prefix") {
  std::istringstream in("a\t_inv:r\tb\n");
  CHECK_THROWS_AS(load_triples(in), std::runtime_error);
}

TEST_CASE("entity types keep the seven globally most frequent") {
  std::istringstream triples("a\tr\tb\nc\tr\td\ne\tr\tf\n");
  KnowledgeGraph kg = load_triples(triples);
  // t1..t7 appear on two entities (more frequent), t8/t9 only on 'a'.
  std::istringstream types(
      "a\tt1,t2,t3,t4,t5,t6,t7,t8,t9\n"
      "b\tt1,t2,t3,t4,t5,t6,t7\n");
  const TypeLoadStats stats = load_entity_types(types, kg);
  CHECK(stats.entities_typed == 2);
  CHECK(stats.dropped_by_cap == 2);
  const auto a = *kg.entities().find("a");
  const auto list = kg.entity_types(a);
  REQUIRE(list.size() == 7);
  for (TypeId t : list) {
    const auto& name = kg.types().name(t);
    CHECK(name != "t8");
    CHECK(name != "t9");
  }
}

TEST_CASE("type cap ties break toward the lexicographically smaller name") {
  std::istringstream triples("a\tr\tb\n");
  KnowledgeGraph kg = load_triples(triples);
  // All eight types occur exactly once; the cap must keep q1..q7, drop q8.
  std::istringstream types("a\tq8,q7,q6,q5,q4,q3,q2,q1\n");
  load_entity_types(types, kg);
  const auto a = *kg.entities().find("a");
  bool saw_q8 = false;
  for (TypeId t : kg.entity_types(a)) saw_q8 |= kg.types().name(t) == "q8";
  CHECK_FALSE(saw_q8);
  CHECK(kg.entity_types(a).size() == 7);
}

TEST_CASE("unknown entities in the type file are skipped") {
  std::istringstream triples("a\tr\tb\n");
  KnowledgeGraph kg = load_triples(triples);
  std::istringstream types("nobody\tt1\na\tt2\n");
  const TypeLoadStats stats = load_entity_types(types, kg);
  CHECK(stats.unknown_entities == 1);
  CHECK(stats.entities_typed == 1);
}

TEST_CASE("an entity without type annotations has an empty list") {
  std::istringstream triples("a\tr\tb\n");
  KnowledgeGraph kg = load_triples(triples);
  std::istringstream types("a\tt1\n");
  load_entity_types(types, kg);
  const auto b = *kg.entities().find("b");
  CHECK(kg.entity_types(b).empty());
}

TEST_CASE("textual relation truncation") {
  using V = std::vector<std::string>;
  CHECK(truncate_textual_relation(V{"was", "born", "in"}) == "was born in");
  CHECK(truncate_textual_relation(V{"ceo"}) == "ceo");
  CHECK(truncate_textual_relation(V{"a", "b", "c", "d"}) == "a b c d");
  CHECK(truncate_textual_relation(V{"is", "commonly", "known", "to", "all", "as"}) ==
        "is commonly … all as");
  CHECK(truncate_textual_relation(V{"one", "two", "three", "four", "five"}) ==
        "one two … four five");
  CHECK_THROWS_AS(truncate_textual_relation(V{}), std::invalid_argument);
}

TEST_CASE("validate_path checks edge consistency") {
  std::istringstream in("a\tr\tb\nb\ts\tc\n");
  KnowledgeGraph kg = load_triples(in);
  const auto a = *kg.entities().find("a");
  const auto b = *kg.entities().find("b");
  const auto c = *kg.entities().find("c");
  const auto r = *kg.relations().find("r");
  const auto s = *kg.relations().find("s");

  Path good{a, {{r, b}, {s, c}}};
  CHECK(kg.validate_path(good));
  Path bad{a, {{s, c}}};
  CHECK_FALSE(kg.validate_path(bad));
  Path empty{a, {}};
  CHECK_FALSE(kg.validate_path(empty));
}
