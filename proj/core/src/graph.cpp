#include "chainkb/graph.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <stdexcept>

#include "chainkb/rng.hpp"

namespace chainkb {

namespace {

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      return fields;
    }
    fields.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::uint32_t Vocab::intern(std::string_view name) {
  auto it = ids_.find(std::string(name));
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<std::uint32_t> Vocab::find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocab::name(std::uint32_t id) const {
  if (id >= names_.size()) throw std::out_of_range("Vocab: id out of range");
  return names_[id];
}

EntityId Path::target() const {
  if (steps.empty()) throw std::logic_error("Path: empty path has no target");
  return steps.back().entity;
}

std::size_t KnowledgeGraph::TripleHash::operator()(const Triple& t) const {
  std::uint64_t h = fnv1a64_mix(0xcbf29ce484222325ULL, t.source);
  h = fnv1a64_mix(h, t.relation);
  h = fnv1a64_mix(h, t.target);
  return static_cast<std::size_t>(h);
}

EntityId KnowledgeGraph::intern_entity(std::string_view name) {
  const EntityId id = entities_.intern(name);
  if (id >= adjacency_.size()) {
    adjacency_.resize(id + 1);
    entity_types_.resize(id + 1);
  }
  return id;
}

RelationId KnowledgeGraph::intern_relation_with_inverse(std::string_view name) {
  if (name.starts_with(kInversePrefix)) {
    throw std::invalid_argument("relation name uses the reserved prefix '" +
                                std::string(kInversePrefix) + "': " +
                                std::string(name));
  }
  const RelationId r = relations_.intern(name);
  const RelationId ri = relations_.intern(std::string(kInversePrefix) + std::string(name));
  const std::size_t needed = std::max(r, ri) + 1;
  if (inverse_of_.size() < needed) inverse_of_.resize(needed, 0);
  inverse_of_[r] = ri;
  inverse_of_[ri] = r;
  return r;
}

bool KnowledgeGraph::is_inverse(RelationId r) const {
  return relations_.name(r).starts_with(kInversePrefix);
}

bool KnowledgeGraph::add_fact(EntityId source, RelationId relation, EntityId target) {
  const Triple forward{source, relation, target};
  if (triple_set_.contains(forward)) return false;
  const Triple backward{target, inverse_relation(relation), source};
  triple_set_.insert(forward);
  triples_.push_back(forward);
  adjacency_[source].push_back(Edge{relation, target});
  if (!triple_set_.contains(backward)) {
    triple_set_.insert(backward);
    triples_.push_back(backward);
    adjacency_[target].push_back(Edge{backward.relation, source});
  }
  return true;
}

void KnowledgeGraph::set_entity_types(EntityId entity, std::vector<TypeId> types) {
  if (types.size() > kMaxTypesPerEntity) {
    throw std::invalid_argument("entity type list exceeds the cap of 7");
  }
  if (entity >= entity_types_.size()) entity_types_.resize(entity + 1);
  entity_types_[entity] = std::move(types);
  for (TypeId t : entity_types_[entity]) {
    if (t >= type_members_.size()) type_members_.resize(t + 1);
    type_members_[t].push_back(entity);
  }
}

std::span<const Edge> KnowledgeGraph::out_edges(EntityId entity) const {
  if (entity >= adjacency_.size()) return {};
  return adjacency_[entity];
}

bool KnowledgeGraph::has_triple(EntityId source, RelationId relation,
                                EntityId target) const {
  return triple_set_.contains(Triple{source, relation, target});
}

std::span<const TypeId> KnowledgeGraph::entity_types(EntityId entity) const {
  if (entity >= entity_types_.size()) return {};
  return entity_types_[entity];
}

std::span<const EntityId> KnowledgeGraph::entities_with_type(TypeId type) const {
  if (type >= type_members_.size()) return {};
  return type_members_[type];
}

bool KnowledgeGraph::validate_path(const Path& path) const {
  EntityId at = path.source;
  for (const PathStep& step : path.steps) {
    if (!has_triple(at, step.relation, step.entity)) return false;
    at = step.entity;
  }
  return !path.steps.empty();
}

bool KnowledgeGraph::check_invariants() const {
  for (const Triple& t : triples_) {
    if (!has_triple(t.target, inverse_relation(t.relation), t.source)) return false;
  }
  for (const auto& types : entity_types_) {
    if (types.size() > kMaxTypesPerEntity) return false;
  }
  std::size_t edge_total = 0;
  for (EntityId e = 0; e < adjacency_.size(); ++e) {
    edge_total += adjacency_[e].size();
    for (const Edge& edge : adjacency_[e]) {
      if (!has_triple(e, edge.relation, edge.target)) return false;
    }
  }
  return edge_total == triples_.size();
}

KnowledgeGraph load_triples(std::istream& in, TripleLoadStats* stats) {
  KnowledgeGraph kg;
  TripleLoadStats local;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    ++local.lines;
    auto fields = split(line, '\t');
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() ||
        fields[2].empty()) {
      throw std::runtime_error("triples line " + std::to_string(line_no) +
                               ": expected source<TAB>relation<TAB>target");
    }
    RelationId rel;
    try {
      rel = kg.intern_relation_with_inverse(fields[1]);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("triples line " + std::to_string(line_no) + ": " +
                               e.what());
    }
    const EntityId s = kg.intern_entity(fields[0]);
    const EntityId t = kg.intern_entity(fields[2]);
    if (kg.add_fact(s, rel, t)) {
      ++local.stored;
    } else {
      ++local.duplicates;
    }
  }
  if (stats) *stats = local;
  return kg;
}

TypeLoadStats load_entity_types(std::istream& in, KnowledgeGraph& kg) {
  TypeLoadStats stats;
  std::string line;
  std::size_t line_no = 0;
  // (entity, its annotated type names) in first-appearance order; repeated
  // entity lines merge into one row.
  std::vector<std::pair<EntityId, std::vector<std::string>>> rows;
  std::unordered_map<EntityId, std::size_t> row_of;
  std::map<std::string, std::size_t> frequency;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    auto fields = split(line, '\t');
    if (fields.size() != 2 || fields[0].empty()) {
      throw std::runtime_error("types line " + std::to_string(line_no) +
                               ": expected entity<TAB>type1,type2,...");
    }
    const auto entity = kg.entities().find(fields[0]);
    if (!entity) {
      ++stats.unknown_entities;
      continue;
    }
    auto [it, inserted] = row_of.try_emplace(*entity, rows.size());
    if (inserted) rows.emplace_back(*entity, std::vector<std::string>{});
    auto& names = rows[it->second].second;
    for (auto& t : split(fields[1], ',')) {
      if (t.empty()) continue;
      if (std::find(names.begin(), names.end(), t) == names.end()) {
        ++frequency[t];
        names.push_back(std::move(t));
      }
    }
  }
  for (auto& [entity, names] : rows) {
    // Keep the 7 globally most frequent annotations; lexicographically
    // smaller names win ties.
    std::stable_sort(names.begin(), names.end(),
                     [&](const std::string& a, const std::string& b) {
                       const auto fa = frequency[a];
                       const auto fb = frequency[b];
                       if (fa != fb) return fa > fb;
                       return a < b;
                     });
    if (names.size() > KnowledgeGraph::kMaxTypesPerEntity) {
      stats.dropped_by_cap += names.size() - KnowledgeGraph::kMaxTypesPerEntity;
      names.resize(KnowledgeGraph::kMaxTypesPerEntity);
    }
    std::vector<TypeId> ids;
    ids.reserve(names.size());
    for (const auto& t : names) ids.push_back(kg.types().intern(t));
    kg.set_entity_types(entity, std::move(ids));
    ++stats.entities_typed;
  }
  return stats;
}

std::string truncate_textual_relation(std::span<const std::string> tokens) {
  if (tokens.empty()) {
    throw std::invalid_argument("textual relation phrase is empty");
  }
  std::string out;
  if (tokens.size() <= 4) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) out += ' ';
      out += tokens[i];
    }
    return out;
  }
  const std::size_t n = tokens.size();
  out = tokens[0] + " " + tokens[1] + " … " + tokens[n - 2] + " " + tokens[n - 1];
  return out;
}

}  // namespace chainkb
