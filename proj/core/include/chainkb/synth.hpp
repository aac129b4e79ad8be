#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chainkb/graph.hpp"

namespace chainkb {

// A Horn clause planted into the generated graph: `head(a, z)` holds for
// every pair chained by the body relations (optionally only when the first
// intermediate entity carries `condition_type`). Each materialized head is
// dropped with probability `noise`.
struct PlantedRule {
  std::string head;
  std::vector<std::string> body;  // 1..4 body relation names
  std::optional<std::string> condition_type;
  double noise = 0.0;
};

struct SynthSpec {
  std::size_t entities = 200;
  std::size_t types = 8;
  std::size_t body_relations = 6;
  std::size_t edges_per_relation = 120;
  std::size_t min_types_per_entity = 1;
  std::size_t max_types_per_entity = 3;
  // Negatives emitted per positive in the dev/test candidate files.
  std::size_t candidate_negatives = 10;
  // When set, body relation r only connects entities typed T(r mod types)
  // to entities typed T((r+1) mod types), giving relations the selectional
  // type signatures real KB schemas have.
  bool typed_relation_signatures = false;
  std::vector<PlantedRule> rules;

  // 200 entities, 8 types, 6 body relations, one universal and one
  // type-conditional rule at noise 0.05. A full training run on this stays
  // under a minute.
  static SynthSpec defaults();
  static SynthSpec from_json(const std::string& text);
  std::string to_json() const;
  void validate() const;
};

struct TripleRow {
  std::string source;
  std::string relation;
  std::string target;
};

struct LabeledPairRow {
  std::string source;
  std::string relation;
  std::string target;
  bool relevant = false;
};

struct SynthDataset {
  // Body-relation edges plus the train-split head triples; this is the graph
  // visible to path extraction and training. Held-out heads are not edges.
  KnowledgeGraph graph;
  std::vector<TripleRow> graph_triples;
  std::vector<std::pair<std::string, std::vector<std::string>>> entity_types;
  std::vector<TripleRow> train;
  std::vector<TripleRow> dev;
  std::vector<TripleRow> test;
  // Positives interleaved with sampled corruptions. For conditional rules
  // the corruptions prefer chained-but-unsatisfied pairs, the cases an
  // entity-blind model cannot tell apart from positives.
  std::vector<LabeledPairRow> dev_candidates;
  std::vector<LabeledPairRow> test_candidates;
};

SynthDataset generate(const SynthSpec& spec, std::uint64_t seed);

void write_triples_tsv(std::ostream& out, std::span<const TripleRow> rows);
void write_types_tsv(
    std::ostream& out,
    std::span<const std::pair<std::string, std::vector<std::string>>> rows);
void write_candidates_tsv(std::ostream& out, std::span<const LabeledPairRow> rows);

}  // namespace chainkb
