#include "chainkb/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace chainkb {

namespace {

constexpr std::string_view kMagic = "chainkb checkpoint v1";

void write_f64_le(std::ostream& out, double value) {
  const auto bits = std::bit_cast<std::uint64_t>(value);
  char bytes[8];
  for (int i = 0; i < 8; ++i) {
    bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  }
  out.write(bytes, 8);
}

double read_f64_le(std::istream& in) {
  char bytes[8];
  in.read(bytes, 8);
  if (!in) throw std::runtime_error("checkpoint: truncated array data");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i]))
            << (8 * i);
  }
  return std::bit_cast<double>(bits);
}

std::string expect_line(std::istream& in, std::string_view what) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("checkpoint: unexpected end while reading " +
                             std::string(what));
  }
  return line;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::size_t parse_count(const std::string& text, std::string_view what) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("checkpoint: bad " + std::string(what) + " '" +
                             text + "'");
  }
}

}  // namespace

void save_checkpoint(std::ostream& out, const PathModel& model,
                     std::span<const std::string> query_relation_names) {
  const ModelConfig& cfg = model.config();
  const VocabSizes& sizes = model.sizes();
  if (query_relation_names.size() != sizes.query_relations) {
    throw std::invalid_argument("save_checkpoint: query name count mismatch");
  }
  out << kMagic << '\n';
  out << "config\trelation_dim\t" << cfg.relation_dim << '\n';
  out << "config\thidden_dim\t" << cfg.hidden_dim << '\n';
  out << "config\tentity_dim\t" << cfg.entity_dim << '\n';
  out << "config\tactivation\t" << to_string(cfg.activation) << '\n';
  out << "config\tsharing\t" << to_string(cfg.sharing) << '\n';
  out << "config\tentity_mode\t" << to_string(cfg.entity_mode) << '\n';
  out << "size\tentities\t" << sizes.entities << '\n';
  out << "size\trelations\t" << sizes.relations << '\n';
  out << "size\ttypes\t" << sizes.types << '\n';
  out << "size\tquery_relations\t" << sizes.query_relations << '\n';
  for (const std::string& name : query_relation_names) {
    out << "query\t" << name << '\n';
  }
  const ParamSet& params = model.params();
  out << "arrays\t" << params.entry_count() << '\n';
  for (std::size_t e = 0; e < params.entry_count(); ++e) {
    const auto& entry = params.entry(e);
    out << "array\t" << entry.name << '\t' << entry.value.rows() << '\t'
        << entry.value.cols() << '\n';
    for (double x : entry.value.data()) write_f64_le(out, x);
  }
  out << "end\n";
  if (!out) throw std::runtime_error("save_checkpoint: write failed");
}

LoadedCheckpoint load_checkpoint(std::istream& in) {
  if (expect_line(in, "magic") != kMagic) {
    throw std::runtime_error("checkpoint: bad magic line (expected '" +
                             std::string(kMagic) + "')");
  }
  LoadedCheckpoint ckpt;
  std::size_t array_count = 0;
  while (true) {
    const std::string line = expect_line(in, "header");
    const auto fields = split_tabs(line);
    if (fields[0] == "arrays" && fields.size() == 2) {
      array_count = parse_count(fields[1], "array count");
      break;
    }
    if (fields[0] == "config" && fields.size() == 3) {
      const std::string& key = fields[1];
      const std::string& value = fields[2];
      if (key == "relation_dim") ckpt.config.relation_dim = parse_count(value, key);
      else if (key == "hidden_dim") ckpt.config.hidden_dim = parse_count(value, key);
      else if (key == "entity_dim") ckpt.config.entity_dim = parse_count(value, key);
      else if (key == "activation") ckpt.config.activation = parse_activation(value);
      else if (key == "sharing") ckpt.config.sharing = parse_sharing(value);
      else if (key == "entity_mode") ckpt.config.entity_mode = parse_entity_mode(value);
      else throw std::runtime_error("checkpoint: unknown config key '" + key + "'");
    } else if (fields[0] == "size" && fields.size() == 3) {
      const std::string& key = fields[1];
      const std::size_t value = parse_count(fields[2], key);
      if (key == "entities") ckpt.sizes.entities = value;
      else if (key == "relations") ckpt.sizes.relations = value;
      else if (key == "types") ckpt.sizes.types = value;
      else if (key == "query_relations") ckpt.sizes.query_relations = value;
      else throw std::runtime_error("checkpoint: unknown size key '" + key + "'");
    } else if (fields[0] == "query" && fields.size() == 2) {
      ckpt.query_relation_names.push_back(fields[1]);
    } else {
      throw std::runtime_error("checkpoint: malformed header line '" + line + "'");
    }
  }
  if (ckpt.query_relation_names.size() != ckpt.sizes.query_relations) {
    throw std::runtime_error("checkpoint: query name count disagrees with size");
  }
  for (std::size_t a = 0; a < array_count; ++a) {
    const std::string line = expect_line(in, "array header");
    const auto fields = split_tabs(line);
    if (fields.size() != 4 || fields[0] != "array") {
      throw std::runtime_error("checkpoint: malformed array line '" + line + "'");
    }
    const std::size_t rows = parse_count(fields[2], "rows");
    const std::size_t cols = parse_count(fields[3], "cols");
    Matrix m(rows, cols);
    for (double& x : m.data()) x = read_f64_le(in);
    ckpt.params.add(fields[1], std::move(m));
  }
  if (expect_line(in, "end marker") != "end") {
    throw std::runtime_error("checkpoint: missing end marker");
  }
  return ckpt;
}

}  // namespace chainkb
