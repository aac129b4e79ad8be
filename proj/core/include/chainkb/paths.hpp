#pragma once

#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "chainkb/graph.hpp"
#include "chainkb/rng.hpp"

namespace chainkb {

// Bounded random walks from `source`, uniform over outgoing edges. A walk
// emits the path walked so far every time it stands on `target`; walks that
// never touch the target contribute nothing. The result is deduplicated on
// the full (relation, entity) sequence and returned in sorted order.
std::vector<Path> sample_paths(const KnowledgeGraph& kg, EntityId source,
                               EntityId target, std::size_t max_len,
                               std::size_t walks, SplitMix64& rng);

// Exhaustive enumeration of all edge sequences of length <= max_len from
// source to target (revisits allowed, mirroring the walk semantics), sorted.
// Exceeds `expansion_cap` edge traversals -> error advising sampling.
std::vector<Path> enumerate_paths(const KnowledgeGraph& kg, EntityId source,
                                  EntityId target, std::size_t max_len,
                                  std::size_t expansion_cap = 10000);

// Hands out the path set of an entity pair, either freshly sampled (with a
// per-pair RNG stream derived from the base seed, so the answer does not
// depend on query order) or preloaded from a paths.tsv file.
class PathProvider {
 public:
  PathProvider(const KnowledgeGraph& kg, std::size_t max_len, std::size_t walks,
               std::uint64_t seed);
  static PathProvider preloaded(const KnowledgeGraph& kg, std::istream& paths_tsv);

  std::span<const Path> paths_for(EntityId source, EntityId target);

  std::size_t max_len() const { return max_len_; }
  std::size_t walks() const { return walks_; }
  bool sampling() const { return sampling_; }

  static std::uint64_t pair_key(EntityId source, EntityId target) {
    return (static_cast<std::uint64_t>(source) << 32) | target;
  }

 private:
  explicit PathProvider(const KnowledgeGraph& kg);

  const KnowledgeGraph* kg_;
  bool sampling_ = false;
  std::size_t max_len_ = 0;
  std::size_t walks_ = 0;
  std::uint64_t seed_ = 0;
  std::unordered_map<std::uint64_t, std::vector<Path>> cache_;
};

// One line per path: `source<TAB>target<TAB>r1,e1,r2,e2,...,rk` (the final
// entity is implied by the target column). Pairs are emitted in input order.
void write_paths_tsv(std::ostream& out, const KnowledgeGraph& kg,
                     std::span<const std::pair<EntityId, EntityId>> pairs,
                     PathProvider& provider);

}  // namespace chainkb
