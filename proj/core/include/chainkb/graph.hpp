#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace chainkb {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;
using TypeId = std::uint32_t;
// Index into the set of query relations a model is trained for.
using QueryId = std::uint32_t;

// Synthesized inverse relations carry this reserved prefix; it may not
// appear in input files.
inline constexpr std::string_view kInversePrefix = "_inv:";
// Surface-pattern relations share the relation vocabulary with KB-schema
// relations and are told apart only by this prefix.
inline constexpr std::string_view kTextualPrefix = "text:";

// Bidirectional name <-> dense id map. Ids are assigned contiguously from 0
// in interning order, so identical input files always produce identical ids.
class Vocab {
 public:
  std::uint32_t intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  const std::string& name(std::uint32_t id) const;
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

struct Triple {
  EntityId source;
  RelationId relation;
  EntityId target;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct Edge {
  RelationId relation;
  EntityId target;
};

struct PathStep {
  RelationId relation;
  // Entity reached after traversing `relation`; the last step holds the
  // path's target.
  EntityId entity;
  friend auto operator<=>(const PathStep&, const PathStep&) = default;
};

struct Path {
  EntityId source = 0;
  std::vector<PathStep> steps;

  std::size_t length() const { return steps.size(); }
  EntityId target() const;
  friend auto operator<=>(const Path&, const Path&) = default;
};

class KnowledgeGraph {
 public:
  static constexpr std::size_t kMaxTypesPerEntity = 7;

  Vocab& entities() { return entities_; }
  const Vocab& entities() const { return entities_; }
  Vocab& relations() { return relations_; }
  const Vocab& relations() const { return relations_; }
  Vocab& types() { return types_; }
  const Vocab& types() const { return types_; }

  EntityId intern_entity(std::string_view name);
  // Interns `name` and its `_inv:` partner; rejects names that already carry
  // the reserved prefix.
  RelationId intern_relation_with_inverse(std::string_view name);
  RelationId inverse_relation(RelationId r) const { return inverse_of_.at(r); }
  bool is_inverse(RelationId r) const;

  // Stores (s, r, t) and (t, r^-1, s). Returns false when the forward triple
  // is already present (nothing is added).
  bool add_fact(EntityId source, RelationId relation, EntityId target);

  // Replaces the entity's type list; at most kMaxTypesPerEntity entries.
  void set_entity_types(EntityId entity, std::vector<TypeId> types);

  std::span<const Edge> out_edges(EntityId entity) const;
  bool has_triple(EntityId source, RelationId relation, EntityId target) const;
  // All stored triples (inverses included) in insertion order.
  std::span<const Triple> triples() const { return triples_; }
  std::size_t triple_count() const { return triples_.size(); }
  std::span<const TypeId> entity_types(EntityId entity) const;
  // Entities carrying a type, in the order their types were assigned.
  std::span<const EntityId> entities_with_type(TypeId type) const;

  // Every step of the path is an edge of the graph.
  bool validate_path(const Path& path) const;
  // Inverse closure, type cap, adjacency/triple-set agreement.
  bool check_invariants() const;

 private:
  struct TripleHash {
    std::size_t operator()(const Triple& t) const;
  };

  Vocab entities_;
  Vocab relations_;
  Vocab types_;
  std::vector<Triple> triples_;
  std::unordered_set<Triple, TripleHash> triple_set_;
  std::vector<std::vector<Edge>> adjacency_;
  std::vector<std::vector<TypeId>> entity_types_;
  std::vector<std::vector<EntityId>> type_members_;
  std::vector<RelationId> inverse_of_;
};

struct TripleLoadStats {
  std::size_t lines = 0;
  // Count of distinct input triples stored (inverses not counted).
  std::size_t stored = 0;
  std::size_t duplicates = 0;
};

// Reads `source<TAB>relation<TAB>target` lines. Malformed lines raise an
// error naming the line number; duplicates are dropped silently and counted.
KnowledgeGraph load_triples(std::istream& in, TripleLoadStats* stats = nullptr);

struct TypeLoadStats {
  std::size_t entities_typed = 0;
  std::size_t unknown_entities = 0;
  // Type annotations dropped by the per-entity cap.
  std::size_t dropped_by_cap = 0;
};

// Reads `entity<TAB>type1,type2,...` lines. Each entity keeps at most the
// seven types that occur most frequently across the whole file (ties broken
// by lexicographically smaller type name). Unknown entities are skipped.
TypeLoadStats load_entity_types(std::istream& in, KnowledgeGraph& kg);

// Collapses the token sequence between two entity mentions to a relation
// name: phrases of more than four tokens keep the first two and last two
// words around an ellipsis.
std::string truncate_textual_relation(std::span<const std::string> tokens);

}  // namespace chainkb
