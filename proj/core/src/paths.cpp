#include "chainkb/paths.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

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

}  // namespace

std::vector<Path> sample_paths(const KnowledgeGraph& kg, EntityId source,
                               EntityId target, std::size_t max_len,
                               std::size_t walks, SplitMix64& rng) {
  if (max_len < 1 || max_len > 7) {
    throw std::invalid_argument("sample_paths: max_len must be in [1, 7]");
  }
  std::set<Path> found;
  Path walk;
  for (std::size_t w = 0; w < walks; ++w) {
    walk.source = source;
    walk.steps.clear();
    EntityId at = source;
    for (std::size_t step = 0; step < max_len; ++step) {
      const auto edges = kg.out_edges(at);
      if (edges.empty()) break;
      const Edge& e = edges[rng.below(edges.size())];
      walk.steps.push_back(PathStep{e.relation, e.target});
      at = e.target;
      if (at == target) found.insert(walk);
    }
  }
  return {found.begin(), found.end()};
}

std::vector<Path> enumerate_paths(const KnowledgeGraph& kg, EntityId source,
                                  EntityId target, std::size_t max_len,
                                  std::size_t expansion_cap) {
  std::set<Path> found;
  if (max_len == 0) return {};
  std::size_t expansions = 0;
  Path current;
  current.source = source;
  auto dfs = [&](auto&& self, EntityId at, std::size_t depth) -> void {
    if (depth == max_len) return;
    for (const Edge& e : kg.out_edges(at)) {
      if (++expansions > expansion_cap) {
        throw std::runtime_error(
            "enumerate_paths: expansion cap exceeded; use sample_paths");
      }
      current.steps.push_back(PathStep{e.relation, e.target});
      if (e.target == target) found.insert(current);
      self(self, e.target, depth + 1);
      current.steps.pop_back();
    }
  };
  dfs(dfs, source, 0);
  return {found.begin(), found.end()};
}

PathProvider::PathProvider(const KnowledgeGraph& kg) : kg_(&kg) {}

PathProvider::PathProvider(const KnowledgeGraph& kg, std::size_t max_len,
                           std::size_t walks, std::uint64_t seed)
    : kg_(&kg), sampling_(true), max_len_(max_len), walks_(walks), seed_(seed) {}

PathProvider PathProvider::preloaded(const KnowledgeGraph& kg,
                                     std::istream& paths_tsv) {
  PathProvider provider(kg);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(paths_tsv, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw std::runtime_error("paths line " + std::to_string(line_no) +
                               ": expected source<TAB>target<TAB>sequence");
    }
    const auto source = kg.entities().find(fields[0]);
    const auto target = kg.entities().find(fields[1]);
    if (!source || !target) {
      throw std::runtime_error("paths line " + std::to_string(line_no) +
                               ": unknown entity");
    }
    const auto tokens = split(fields[2], ',');
    if (tokens.size() % 2 != 1) {
      throw std::runtime_error("paths line " + std::to_string(line_no) +
                               ": sequence must alternate r1,e1,...,rk");
    }
    Path path;
    path.source = *source;
    for (std::size_t i = 0; i < tokens.size(); i += 2) {
      const auto rel = kg.relations().find(tokens[i]);
      if (!rel) {
        throw std::runtime_error("paths line " + std::to_string(line_no) +
                                 ": unknown relation '" + tokens[i] + "'");
      }
      EntityId entity;
      if (i + 1 < tokens.size()) {
        const auto mid = kg.entities().find(tokens[i + 1]);
        if (!mid) {
          throw std::runtime_error("paths line " + std::to_string(line_no) +
                                   ": unknown entity '" + tokens[i + 1] + "'");
        }
        entity = *mid;
      } else {
        entity = *target;
      }
      path.steps.push_back(PathStep{*rel, entity});
    }
    if (!kg.validate_path(path)) {
      throw std::runtime_error("paths line " + std::to_string(line_no) +
                               ": path is not edge-consistent with the graph");
    }
    provider.cache_[pair_key(*source, *target)].push_back(std::move(path));
  }
  for (auto& [key, paths] : provider.cache_) {
    std::sort(paths.begin(), paths.end());
    paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
  }
  return provider;
}

std::span<const Path> PathProvider::paths_for(EntityId source, EntityId target) {
  const std::uint64_t key = pair_key(source, target);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  if (!sampling_) return {};
  SplitMix64 rng = SplitMix64::derive(seed_, "paths", key);
  auto [inserted, _] =
      cache_.emplace(key, sample_paths(*kg_, source, target, max_len_, walks_, rng));
  return inserted->second;
}

void write_paths_tsv(std::ostream& out, const KnowledgeGraph& kg,
                     std::span<const std::pair<EntityId, EntityId>> pairs,
                     PathProvider& provider) {
  for (const auto& [source, target] : pairs) {
    for (const Path& path : provider.paths_for(source, target)) {
      out << kg.entities().name(source) << '\t' << kg.entities().name(target)
          << '\t';
      for (std::size_t i = 0; i < path.steps.size(); ++i) {
        if (i) out << ',';
        out << kg.relations().name(path.steps[i].relation);
        if (i + 1 < path.steps.size()) {
          out << ',' << kg.entities().name(path.steps[i].entity);
        }
      }
      out << '\n';
    }
  }
}

}  // namespace chainkb
