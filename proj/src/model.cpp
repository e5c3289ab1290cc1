#include "lcpsim/model.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lcpsim/error.hpp"

namespace lcpsim {

using nlohmann::json;

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error([&] {
        std::string msg = "invalid model:";
        for (const auto& v : violations) msg += " " + v + ";";
        return msg;
      }()),
      violations_(std::move(violations)) {}

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::LcpCtmc: return "lcp";
    case Mode::EmbeddedDtmc: return "dtmc";
    case Mode::UrnRemovals: return "urn";
  }
  return "dtmc";
}

Mode parse_mode(std::string_view name) {
  if (name == "lcp") return Mode::LcpCtmc;
  if (name == "dtmc") return Mode::EmbeddedDtmc;
  if (name == "urn") return Mode::UrnRemovals;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "' (expected lcp, dtmc or urn)");
}

// ---------------------------------------------------------------------------
// InteractionMatrix

InteractionMatrix::InteractionMatrix(std::vector<std::vector<Rational>> rows)
    : rows_(std::move(rows)) {}

InteractionMatrix InteractionMatrix::zero(std::size_t n) {
  return InteractionMatrix(std::vector<std::vector<Rational>>(n, std::vector<Rational>(n, Rational(0))));
}

bool InteractionMatrix::is_square() const {
  return std::all_of(rows_.begin(), rows_.end(),
                     [n = rows_.size()](const auto& r) { return r.size() == n; });
}

bool InteractionMatrix::is_zero() const {
  for (const auto& r : rows_) {
    for (const auto& x : r) {
      if (x != 0) return false;
    }
  }
  return true;
}

InteractionMatrix InteractionMatrix::scaled(const Rational& c) const {
  auto rows = rows_;
  for (auto& r : rows) {
    for (auto& x : r) x *= c;
  }
  return InteractionMatrix(std::move(rows));
}

InteractionMatrix InteractionMatrix::transposed() const {
  const std::size_t n = size();
  auto out = zero(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.rows_[j][i] = rows_[i][j];
  }
  return out;
}

InteractionMatrix InteractionMatrix::permuted(const std::vector<std::size_t>& perm) const {
  const std::size_t n = size();
  auto out = zero(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.rows_[i][j] = rows_[perm[i]][perm[j]];
  }
  return out;
}

InteractionMatrix InteractionMatrix::submatrix(const std::vector<std::size_t>& keep) const {
  auto out = zero(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    for (std::size_t j = 0; j < keep.size(); ++j) out.rows_[i][j] = rows_[keep[i]][keep[j]];
  }
  return out;
}

RationalMatrix InteractionMatrix::to_rational_matrix() const {
  const std::size_t n = size();
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows_[i][j];
  }
  return m;
}

std::vector<double> InteractionMatrix::to_doubles() const {
  std::vector<double> out;
  out.reserve(size() * size());
  for (const auto& r : rows_) {
    for (const auto& x : r) out.push_back(x.get_d());
  }
  return out;
}

// ---------------------------------------------------------------------------
// PopulationState / SurvivorSet

bool PopulationState::all_positive() const {
  return std::all_of(counts.begin(), counts.end(), [](auto c) { return c > 0; });
}

bool PopulationState::all_zero() const {
  return std::all_of(counts.begin(), counts.end(), [](auto c) { return c == 0; });
}

std::int64_t PopulationState::min() const {
  return counts.empty() ? 0 : *std::min_element(counts.begin(), counts.end());
}

SurvivorSet SurvivorSet::from_mask(std::uint64_t mask) {
  SurvivorSet s;
  for (std::size_t i = 0; i < 64; ++i) {
    if (mask & (std::uint64_t{1} << i)) s.members.push_back(i);
  }
  return s;
}

std::uint64_t SurvivorSet::mask() const {
  std::uint64_t m = 0;
  for (auto i : members) {
    if (i >= 64) throw SizeLimitError("survivor set index exceeds 64-bit mask");
    m |= std::uint64_t{1} << i;
  }
  return m;
}

bool SurvivorSet::contains(std::size_t i) const {
  return std::binary_search(members.begin(), members.end(), i);
}

bool SurvivorSet::pairwise_non_interacting(const InteractionMatrix& a) const {
  for (std::size_t x = 0; x < members.size(); ++x) {
    for (std::size_t y = x + 1; y < members.size(); ++y) {
      if (!a.non_interacting(members[x], members[y])) return false;
    }
  }
  return true;
}

std::string SurvivorSet::to_string() const {
  std::string out = "{";
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (k) out += ",";
    out += std::to_string(members[k] + 1);
  }
  return out + "}";
}

bool ModelSpec::has_immigration() const {
  if (mode == Mode::UrnRemovals || !immigration) return false;
  return std::any_of(immigration->begin(), immigration->end(), [](const Rational& x) { return x > 0; });
}

// ---------------------------------------------------------------------------
// Validation

ValidationReport validate_model(const ModelSpec& spec) {
  ValidationReport report;
  auto& v = report.violations;
  const auto& a = spec.matrix;
  const std::size_t n = a.size();

  if (n == 0) v.push_back("matrix must have at least one row");
  for (std::size_t i = 0; i < n; ++i) {
    if (a.rows()[i].size() != n) {
      v.push_back("bad dimensions: row " + std::to_string(i + 1) + " has " +
                  std::to_string(a.rows()[i].size()) + " entries, expected " + std::to_string(n));
    }
  }
  if (!v.empty()) return report;

  const bool urn = spec.mode == Mode::UrnRemovals;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& x = a(i, j);
      const std::string at = "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
      if (x < 0) v.push_back("negative entry at " + at);
      if (i == j && x != 0) v.push_back("nonzero diagonal at " + at);
      if (urn && !is_integer(x)) v.push_back("urn mode requires integer entry at " + at);
    }
  }

  if (spec.alpha < 0) {
    v.push_back("alpha must be nonnegative");
  } else if (!urn && spec.alpha == 0) {
    v.push_back("alpha must be positive");
  }
  if (urn && !is_integer(spec.alpha)) v.push_back("urn mode requires integer alpha");

  if (spec.immigration) {
    if (spec.immigration->size() != n) {
      v.push_back("immigration has length " + std::to_string(spec.immigration->size()) +
                  ", expected " + std::to_string(n));
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        if ((*spec.immigration)[i] < 0) {
          v.push_back("negative immigration rate at " + std::to_string(i + 1));
        }
      }
    }
  }

  if (spec.initial) {
    auto sr = validate_state(spec, *spec.initial);
    v.insert(v.end(), sr.violations.begin(), sr.violations.end());
  }
  return report;
}

ValidationReport validate_state(const ModelSpec& spec, const PopulationState& state) {
  ValidationReport report;
  if (state.size() != spec.size()) {
    report.violations.push_back("state has length " + std::to_string(state.size()) +
                                ", expected " + std::to_string(spec.size()));
    return report;
  }
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] < 0) report.violations.push_back("negative count at " + std::to_string(i + 1));
  }
  return report;
}

// ---------------------------------------------------------------------------
// JSON format

namespace {

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

Rational rational_field(const json& node, const std::string& field) {
  if (node.is_string()) {
    try {
      return parse_rational(node.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ParseError("field '" + field + "': " + e.what(), field);
    }
  }
  if (node.is_number_integer()) {
    return node.is_number_unsigned() ? Rational(mpz_class(std::to_string(node.get<std::uint64_t>())))
                                     : Rational(mpz_class(std::to_string(node.get<std::int64_t>())));
  }
  throw ParseError("field '" + field + "' must be a rational string such as \"3/10\"", field);
}

std::vector<Rational> rational_array(const json& node, const std::string& field) {
  if (!node.is_array()) throw ParseError("field '" + field + "' must be an array", field);
  std::vector<Rational> out;
  for (std::size_t k = 0; k < node.size(); ++k) {
    out.push_back(rational_field(node[k], field + "[" + std::to_string(k) + "]"));
  }
  return out;
}

}  // namespace

ModelSpec parse_model(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON at line ") +
                         std::to_string(line_of(json_text, e.byte)) + ": " + e.what(),
                     "", line_of(json_text, e.byte));
  }
  if (!doc.is_object()) throw ParseError("model file must contain a JSON object", "");

  static const std::vector<std::string> known = {"alpha", "matrix", "immigration", "mode", "initial"};
  for (const auto& [key, _] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ParseError("unknown field '" + key + "'", key);
    }
  }

  ModelSpec spec;
  if (!doc.contains("alpha")) throw ParseError("missing required field 'alpha'", "alpha");
  if (!doc.contains("matrix")) throw ParseError("missing required field 'matrix'", "matrix");
  spec.alpha = rational_field(doc["alpha"], "alpha");

  const json& m = doc["matrix"];
  if (!m.is_array()) throw ParseError("field 'matrix' must be an array of rows", "matrix");
  std::vector<std::vector<Rational>> rows;
  for (std::size_t i = 0; i < m.size(); ++i) {
    rows.push_back(rational_array(m[i], "matrix[" + std::to_string(i) + "]"));
  }
  spec.matrix = InteractionMatrix(std::move(rows));

  if (doc.contains("immigration")) spec.immigration = rational_array(doc["immigration"], "immigration");
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) throw ParseError("field 'mode' must be a string", "mode");
    try {
      spec.mode = parse_mode(doc["mode"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string("field 'mode': ") + e.what(), "mode");
    }
  }
  if (doc.contains("initial")) {
    const json& init = doc["initial"];
    if (!init.is_array()) throw ParseError("field 'initial' must be an array of integers", "initial");
    PopulationState state;
    for (std::size_t k = 0; k < init.size(); ++k) {
      if (!init[k].is_number_integer()) {
        throw ParseError("field 'initial[" + std::to_string(k) + "]' must be an integer",
                         "initial[" + std::to_string(k) + "]");
      }
      state.counts.push_back(init[k].get<std::int64_t>());
    }
    spec.initial = std::move(state);
  }

  auto report = validate_model(spec);
  if (!report.ok()) throw ValidationError(report.violations);
  return spec;
}

ModelSpec load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open model file '" + path.string() + "'", "");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

std::string serialize_model(const ModelSpec& spec) {
  json doc;
  doc["alpha"] = to_string(spec.alpha);
  json rows = json::array();
  for (const auto& r : spec.matrix.rows()) {
    json row = json::array();
    for (const auto& x : r) row.push_back(to_string(x));
    rows.push_back(std::move(row));
  }
  doc["matrix"] = std::move(rows);
  doc["mode"] = std::string(mode_name(spec.mode));
  if (spec.immigration) {
    json imm = json::array();
    for (const auto& x : *spec.immigration) imm.push_back(to_string(x));
    doc["immigration"] = std::move(imm);
  }
  if (spec.initial) doc["initial"] = spec.initial->counts;
  return doc.dump(2) + "\n";
}

PopulationState parse_state(std::string_view text) {
  PopulationState state;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    auto token = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
      throw std::invalid_argument("not an integer list: '" + std::string(text) + "'");
    }
    if (value < 0) throw std::invalid_argument("counts must be nonnegative: '" + std::string(text) + "'");
    state.counts.push_back(value);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return state;
}

}  // namespace lcpsim
