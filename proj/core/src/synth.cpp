#include "chainkb/synth.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "chainkb/rng.hpp"

#include <nlohmann/json.hpp>

namespace chainkb {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string entity_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "e%03zu", i);
  return buf;
}

std::string type_name(std::size_t i) { return "T" + std::to_string(i); }
std::string body_name(std::size_t i) { return "b" + std::to_string(i); }

using PairKey = std::uint64_t;
PairKey pair_key(std::size_t s, std::size_t t) {
  return (static_cast<std::uint64_t>(s) << 32) | t;
}

}  // namespace

SynthSpec SynthSpec::defaults() {
  SynthSpec spec;
  spec.rules.push_back(PlantedRule{"h_univ", {"b0", "b1"}, std::nullopt, 0.05});
  spec.rules.push_back(PlantedRule{"h_cond", {"b2", "b3"}, "T0", 0.05});
  return spec;
}

void SynthSpec::validate() const {
  if (entities < 20) throw std::invalid_argument("synth: need at least 20 entities");
  if (types == 0) throw std::invalid_argument("synth: need at least one type");
  if (body_relations == 0) {
    throw std::invalid_argument("synth: need at least one body relation");
  }
  if (min_types_per_entity < 1 || max_types_per_entity < min_types_per_entity ||
      max_types_per_entity > std::min<std::size_t>(types, 7)) {
    throw std::invalid_argument("synth: bad types-per-entity range");
  }
  std::set<std::string> body_pool;
  for (std::size_t i = 0; i < body_relations; ++i) body_pool.insert(body_name(i));
  std::set<std::string> type_pool;
  for (std::size_t i = 0; i < types; ++i) type_pool.insert(type_name(i));
  std::set<std::string> heads;
  for (const PlantedRule& rule : rules) {
    if (rule.body.empty() || rule.body.size() > 4) {
      throw std::invalid_argument("synth: rule body must have 1..4 relations");
    }
    if (rule.noise < 0.0 || rule.noise >= 1.0) {
      throw std::invalid_argument("synth: rule noise must be in [0, 1)");
    }
    if (!heads.insert(rule.head).second) {
      throw std::invalid_argument("synth: duplicate head relation '" + rule.head + "'");
    }
    if (body_pool.contains(rule.head)) {
      throw std::invalid_argument("synth: head '" + rule.head +
                                  "' collides with a body relation name");
    }
    for (const std::string& b : rule.body) {
      if (b == rule.head) {
        throw std::invalid_argument("synth: head '" + rule.head +
                                    "' appears in its own body");
      }
      if (!body_pool.contains(b)) {
        throw std::invalid_argument("synth: body relation '" + b +
                                    "' is outside the generated pool");
      }
    }
    if (rule.condition_type) {
      if (rule.body.size() < 2) {
        throw std::invalid_argument(
            "synth: a type-conditional rule needs an intermediate entity "
            "(body length >= 2)");
      }
      if (!type_pool.contains(*rule.condition_type)) {
        throw std::invalid_argument("synth: condition type '" +
                                    *rule.condition_type +
                                    "' is outside the generated pool");
      }
    }
  }
}

SynthSpec SynthSpec::from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("synth spec: bad JSON: ") + e.what());
  }
  SynthSpec spec;
  spec.rules.clear();
  spec.entities = j.value("entities", spec.entities);
  spec.types = j.value("types", spec.types);
  spec.body_relations = j.value("body_relations", spec.body_relations);
  spec.edges_per_relation = j.value("edges_per_relation", spec.edges_per_relation);
  spec.min_types_per_entity = j.value("min_types_per_entity", spec.min_types_per_entity);
  spec.max_types_per_entity = j.value("max_types_per_entity", spec.max_types_per_entity);
  spec.candidate_negatives = j.value("candidate_negatives", spec.candidate_negatives);
  spec.typed_relation_signatures =
      j.value("typed_relation_signatures", spec.typed_relation_signatures);
  if (j.contains("rules")) {
    for (const auto& r : j.at("rules")) {
      PlantedRule rule;
      rule.head = r.at("head").get<std::string>();
      for (const auto& b : r.at("body")) rule.body.push_back(b.get<std::string>());
      if (r.contains("condition_type") && !r.at("condition_type").is_null()) {
        rule.condition_type = r.at("condition_type").get<std::string>();
      }
      rule.noise = r.value("noise", 0.0);
      spec.rules.push_back(std::move(rule));
    }
  } else {
    spec.rules = defaults().rules;
  }
  spec.validate();
  return spec;
}

std::string SynthSpec::to_json() const {
  ordered_json j;
  j["entities"] = entities;
  j["types"] = types;
  j["body_relations"] = body_relations;
  j["edges_per_relation"] = edges_per_relation;
  j["min_types_per_entity"] = min_types_per_entity;
  j["max_types_per_entity"] = max_types_per_entity;
  j["candidate_negatives"] = candidate_negatives;
  j["typed_relation_signatures"] = typed_relation_signatures;
  j["rules"] = ordered_json::array();
  for (const PlantedRule& rule : rules) {
    ordered_json r;
    r["head"] = rule.head;
    r["body"] = rule.body;
    if (rule.condition_type) {
      r["condition_type"] = *rule.condition_type;
    } else {
      r["condition_type"] = nullptr;
    }
    r["noise"] = rule.noise;
    j["rules"].push_back(std::move(r));
  }
  return j.dump(2);
}

namespace {

struct RuleChains {
  // Pairs for which the rule fires (a satisfying chain exists).
  std::set<PairKey> satisfied;
  // Pairs with a body chain but no satisfying one (conditional rules only).
  std::set<PairKey> unsatisfied;
};

RuleChains find_chains(const PlantedRule& rule,
                       const std::map<std::string, std::vector<std::vector<std::size_t>>>& adj,
                       const std::vector<std::set<std::size_t>>& entity_type_ids,
                       std::size_t condition_type_id) {
  RuleChains chains;
  const std::size_t depth = rule.body.size();
  // DFS over the fixed relation sequence of the body.
  std::vector<std::size_t> stack;
  auto walk = [&](auto&& self, std::size_t start, std::size_t at, std::size_t level) -> void {
    if (level == depth) {
      const PairKey key = pair_key(start, at);
      bool ok = true;
      if (rule.condition_type) {
        // stack[1] is the entity reached after the first body relation.
        ok = entity_type_ids[stack[1]].contains(condition_type_id);
      }
      if (ok) {
        chains.satisfied.insert(key);
      } else {
        chains.unsatisfied.insert(key);
      }
      return;
    }
    for (std::size_t next : adj.at(rule.body[level])[at]) {
      stack.push_back(next);
      self(self, start, next, level + 1);
      stack.pop_back();
    }
  };
  const std::size_t n = entity_type_ids.size();
  for (std::size_t a = 0; a < n; ++a) {
    stack.assign(1, a);
    walk(walk, a, a, 0);
  }
  for (PairKey key : chains.satisfied) chains.unsatisfied.erase(key);
  return chains;
}

}  // namespace

SynthDataset generate(const SynthSpec& spec, std::uint64_t seed) {
  spec.validate();
  SynthDataset out;
  const std::size_t n = spec.entities;

  // Types: 1..3 distinct types per entity.
  SplitMix64 type_rng = SplitMix64::derive(seed, "synth/types");
  std::vector<std::set<std::size_t>> entity_type_ids(n);
  for (std::size_t e = 0; e < n; ++e) {
    const std::size_t count =
        spec.min_types_per_entity +
        type_rng.below(spec.max_types_per_entity - spec.min_types_per_entity + 1);
    while (entity_type_ids[e].size() < count) {
      entity_type_ids[e].insert(type_rng.below(spec.types));
    }
    std::vector<std::string> names;
    for (std::size_t t : entity_type_ids[e]) names.push_back(type_name(t));
    out.entity_types.emplace_back(entity_name(e), std::move(names));
  }

  // Random body edges, distinct (s, t) with s != t per relation. With typed
  // signatures, relation r draws sources from T(r mod types) holders and
  // targets from T((r+1) mod types) holders.
  SplitMix64 edge_rng = SplitMix64::derive(seed, "synth/edges");
  std::vector<std::vector<std::size_t>> holders(spec.types);
  for (std::size_t e = 0; e < n; ++e) {
    for (std::size_t t : entity_type_ids[e]) holders[t].push_back(e);
  }
  std::map<std::string, std::vector<std::vector<std::size_t>>> adjacency;
  std::vector<TripleRow> body_rows;
  for (std::size_t r = 0; r < spec.body_relations; ++r) {
    const std::string rel = body_name(r);
    auto& adj = adjacency[rel];
    adj.assign(n, {});
    const std::vector<std::size_t>* src_pool = nullptr;
    const std::vector<std::size_t>* dst_pool = nullptr;
    if (spec.typed_relation_signatures) {
      src_pool = &holders[r % spec.types];
      dst_pool = &holders[(r + 1) % spec.types];
      if (src_pool->empty() || dst_pool->empty()) {
        throw std::runtime_error("synth: a relation type signature has no entities");
      }
    }
    std::set<PairKey> seen;
    std::size_t attempts = 0;
    const std::size_t limit = spec.edges_per_relation * 20;
    while (seen.size() < spec.edges_per_relation && attempts++ < limit) {
      const std::size_t s =
          src_pool ? (*src_pool)[edge_rng.below(src_pool->size())] : edge_rng.below(n);
      const std::size_t t =
          dst_pool ? (*dst_pool)[edge_rng.below(dst_pool->size())] : edge_rng.below(n);
      if (s == t) continue;
      if (!seen.insert(pair_key(s, t)).second) continue;
      adj[s].push_back(t);
      body_rows.push_back(TripleRow{entity_name(s), rel, entity_name(t)});
    }
  }

  // Materialize heads where a rule fires, dropping each with its noise rate.
  SplitMix64 noise_rng = SplitMix64::derive(seed, "synth/noise");
  std::vector<RuleChains> chains;
  std::vector<std::vector<PairKey>> kept_heads(spec.rules.size());
  for (std::size_t r = 0; r < spec.rules.size(); ++r) {
    const PlantedRule& rule = spec.rules[r];
    std::size_t condition_id = 0;
    if (rule.condition_type) {
      condition_id = std::stoul(rule.condition_type->substr(1));
    }
    chains.push_back(find_chains(rule, adjacency, entity_type_ids, condition_id));
    if (chains.back().satisfied.empty()) {
      throw std::runtime_error("synth: rule '" + rule.head +
                               "' has no satisfied chains; spec is unsatisfiable");
    }
    for (PairKey key : chains.back().satisfied) {
      if (noise_rng.next_double() < rule.noise) continue;
      kept_heads[r].push_back(key);
    }
    if (kept_heads[r].empty()) {
      throw std::runtime_error("synth: rule '" + rule.head +
                               "' lost every head to noise");
    }
  }

  // 70/10/20 split by entity pair so no pair leaks across splits.
  std::set<PairKey> head_pairs;
  for (const auto& heads : kept_heads) {
    head_pairs.insert(heads.begin(), heads.end());
  }
  std::vector<PairKey> pair_order(head_pairs.begin(), head_pairs.end());
  SplitMix64 split_rng = SplitMix64::derive(seed, "synth/split");
  for (std::size_t i = pair_order.size(); i > 1; --i) {
    std::swap(pair_order[i - 1], pair_order[split_rng.below(i)]);
  }
  std::map<PairKey, std::vector<std::size_t>> rules_of_pair;
  std::size_t total_heads = 0;
  for (std::size_t r = 0; r < kept_heads.size(); ++r) {
    for (PairKey key : kept_heads[r]) {
      rules_of_pair[key].push_back(r);
      ++total_heads;
    }
  }
  const auto head_row = [&](PairKey key, std::size_t rule) {
    return TripleRow{entity_name(key >> 32), spec.rules[rule].head,
                     entity_name(key & 0xffffffff)};
  };
  std::size_t assigned = 0;
  for (PairKey key : pair_order) {
    const double frac =
        static_cast<double>(assigned) / static_cast<double>(std::max<std::size_t>(total_heads, 1));
    auto* bucket = &out.train;
    if (frac >= 0.8) {
      bucket = &out.test;
    } else if (frac >= 0.7) {
      bucket = &out.dev;
    }
    for (std::size_t rule : rules_of_pair[key]) {
      bucket->push_back(head_row(key, rule));
      ++assigned;
    }
  }
  const auto row_less = [](const TripleRow& a, const TripleRow& b) {
    return std::tie(a.relation, a.source, a.target) <
           std::tie(b.relation, b.source, b.target);
  };
  std::sort(out.train.begin(), out.train.end(), row_less);
  std::sort(out.dev.begin(), out.dev.end(), row_less);
  std::sort(out.test.begin(), out.test.end(), row_less);

  out.graph_triples = body_rows;
  out.graph_triples.insert(out.graph_triples.end(), out.train.begin(), out.train.end());

  // Candidate files: each positive followed by sampled corruptions.
  SplitMix64 cand_rng = SplitMix64::derive(seed, "synth/candidates");
  std::map<std::string, std::size_t> rule_index;
  for (std::size_t r = 0; r < spec.rules.size(); ++r) {
    rule_index[spec.rules[r].head] = r;
  }
  std::vector<std::vector<std::size_t>> entities_of_type(spec.types);
  for (std::size_t e = 0; e < n; ++e) {
    for (std::size_t t : entity_type_ids[e]) entities_of_type[t].push_back(e);
  }
  auto emit_candidates = [&](const std::vector<TripleRow>& positives,
                             std::vector<LabeledPairRow>& dest) {
    for (const TripleRow& pos : positives) {
      const std::size_t rule = rule_index.at(pos.relation);
      const std::size_t s = std::stoul(pos.source.substr(1));
      const std::size_t t = std::stoul(pos.target.substr(1));
      dest.push_back(LabeledPairRow{pos.source, pos.relation, pos.target, true});
      std::set<std::size_t> used{t};
      std::size_t emitted = 0;
      const auto try_emit = [&](std::size_t z) {
        if (used.contains(z)) return;
        if (chains[rule].satisfied.contains(pair_key(s, z))) return;
        used.insert(z);
        dest.push_back(LabeledPairRow{pos.source, pos.relation, entity_name(z), false});
        ++emitted;
      };
      // Chained-but-unsatisfied targets first: these share the positive's
      // relation sequence and are only separable through the entities.
      std::vector<std::size_t> confusable;
      for (PairKey key : chains[rule].unsatisfied) {
        if ((key >> 32) == s) confusable.push_back(key & 0xffffffff);
      }
      for (std::size_t z : confusable) {
        if (emitted >= spec.candidate_negatives) break;
        try_emit(z);
      }
      // Then targets sharing a type with the true one, then anything.
      std::vector<std::size_t> peers;
      for (std::size_t ty : entity_type_ids[t]) {
        peers.insert(peers.end(), entities_of_type[ty].begin(),
                     entities_of_type[ty].end());
      }
      std::sort(peers.begin(), peers.end());
      peers.erase(std::unique(peers.begin(), peers.end()), peers.end());
      std::size_t guard = 0;
      while (emitted < spec.candidate_negatives && !peers.empty() &&
             guard++ < spec.candidate_negatives * 30) {
        try_emit(peers[cand_rng.below(peers.size())]);
      }
      guard = 0;
      while (emitted < spec.candidate_negatives &&
             guard++ < spec.candidate_negatives * 30) {
        try_emit(cand_rng.below(n));
      }
    }
  };
  emit_candidates(out.dev, out.dev_candidates);
  emit_candidates(out.test, out.test_candidates);

  // Build the knowledge graph through the normal loaders so the files and
  // the in-memory graph cannot drift apart.
  std::ostringstream triples_text;
  write_triples_tsv(triples_text, out.graph_triples);
  std::istringstream triples_in(triples_text.str());
  out.graph = load_triples(triples_in);
  std::ostringstream types_text;
  write_types_tsv(types_text, out.entity_types);
  std::istringstream types_in(types_text.str());
  load_entity_types(types_in, out.graph);
  if (!out.graph.check_invariants()) {
    throw std::logic_error("synth: generated graph violates invariants");
  }
  return out;
}

void write_triples_tsv(std::ostream& out, std::span<const TripleRow> rows) {
  for (const TripleRow& row : rows) {
    out << row.source << '\t' << row.relation << '\t' << row.target << '\n';
  }
}

void write_types_tsv(
    std::ostream& out,
    std::span<const std::pair<std::string, std::vector<std::string>>> rows) {
  for (const auto& [entity, types] : rows) {
    out << entity << '\t';
    for (std::size_t i = 0; i < types.size(); ++i) {
      if (i) out << ',';
      out << types[i];
    }
    out << '\n';
  }
}

void write_candidates_tsv(std::ostream& out, std::span<const LabeledPairRow> rows) {
  for (const LabeledPairRow& row : rows) {
    out << row.source << '\t' << row.relation << '\t' << row.target << '\t'
        << (row.relevant ? '1' : '0') << '\n';
  }
}

}  // namespace chainkb
