#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "chainkb/model.hpp"
#include "chainkb/params.hpp"

namespace chainkb {

// Versioned checkpoint container: a line-oriented text header (model config,
// vocabulary sizes, query relation names) followed by the parameter arrays
// as raw little-endian 64-bit IEEE-754 values. Save -> load -> save is
// bit-exact. The byte layout is documented in docs/formats.md.
void save_checkpoint(std::ostream& out, const PathModel& model,
                     std::span<const std::string> query_relation_names);

struct LoadedCheckpoint {
  ModelConfig config;
  VocabSizes sizes;
  std::vector<std::string> query_relation_names;
  ParamSet params;

  PathModel make_model() const {
    return PathModel(config, sizes, params);
  }
};

LoadedCheckpoint load_checkpoint(std::istream& in);

}  // namespace chainkb
