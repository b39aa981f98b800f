#include "pwc/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pwc {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double x = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw std::invalid_argument("not a number: '" + text + "'");
  return x;
}

std::string format_leaf_set(const LeafSet& a) { return a.to_string(); }

LeafSet parse_leaf_set(int depth, const std::string& text) {
  const auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) throw std::invalid_argument("leaf set must be a list: " + text);
  std::vector<LeafIndex> m;
  for (const auto& x : doc) {
    if (!x.is_number_unsigned()) throw std::invalid_argument("leaf index must be a nonnegative integer: " + text);
    m.push_back(x.get<LeafIndex>());
  }
  return LeafSet(depth, std::move(m));
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw std::out_of_range("no column named " + name);
}

double Table::number(std::size_t row, const std::string& name) const {
  return parse_double(rows.at(row).at(column(name)));
}

namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quote in table row: " + line);
  return fields;
}

}  // namespace

void write_table(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << quote(t.columns[i]);
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << quote(row[i]);
    os << '\n';
  }
}

Table read_table(std::istream& is) {
  Table t;
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("table has no header row");
  t.columns = split_fields(line);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != t.columns.size())
      throw std::invalid_argument("table row " + std::to_string(lineno) + " has " +
                                  std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(t.columns.size()));
    t.rows.push_back(std::move(fields));
  }
  return t;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw std::invalid_argument("grid must be lo:hi:step, got " + text);
    const double lo = parse_double(parts[0]), hi = parse_double(parts[1]), step = parse_double(parts[2]);
    if (!(step > 0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi))
      throw std::invalid_argument("grid needs finite lo <= hi and step > 0: " + text);
    const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    if (count > 1'000'000) throw std::invalid_argument("grid too large: " + text);
    for (long i = 0; i < count; ++i) grid.push_back(lo + static_cast<double>(i) * step);
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) grid.push_back(parse_double(p));
    for (double x : grid)
      if (!std::isfinite(x)) throw std::invalid_argument("grid values must be finite: " + text);
  }
  if (grid.empty()) throw std::invalid_argument("empty grid");
  return grid;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) {
    std::size_t used = 0;
    const int v = std::stoi(p, &used);
    if (used != p.size()) throw std::invalid_argument("not an integer: '" + p + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty integer list");
  return out;
}

namespace {

// "3", "ln2", "3ln2", "0.5ln2".
double parse_coefficient(const std::string& text) {
  const auto pos = text.find("ln2");
  if (pos == std::string::npos) return parse_double(text);
  if (pos + 3 != text.size()) throw std::invalid_argument("bad coefficient: " + text);
  const double factor = pos == 0 ? 1.0 : parse_double(text.substr(0, pos));
  return factor * std::numbers::ln2;
}

std::string key_error(const std::string& key, const std::string& what) {
  return "spec key '" + key + "': " + what;
}

void check_keys(const nlohmann::json& doc, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : doc.items())
    if (!allowed.count(key)) throw std::invalid_argument(key_error(key, "unknown key"));
}

double number_at(const nlohmann::json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_number()) throw std::invalid_argument(key_error(key, "expected a number"));
  return v.get<double>();
}

std::optional<double> optional_number(const nlohmann::json& doc, const std::string& key) {
  if (!doc.contains(key)) return std::nullopt;
  return number_at(doc, key);
}

std::vector<double> number_list(const nlohmann::json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_array() || v.empty()) throw std::invalid_argument(key_error(key, "expected a nonempty list of numbers"));
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw std::invalid_argument(key_error(key, "expected a list of numbers"));
    out.push_back(x.get<double>());
  }
  return out;
}

std::string string_at(const nlohmann::json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_string()) throw std::invalid_argument(key_error(key, "expected a string"));
  return v.get<std::string>();
}

}  // namespace

ClusteringSpec preset(const std::string& name) {
  if (name == "zero") return ZeroSpec{};
  if (name == "first:linear3ln2") return FirstOrderSpec{linear_h(3.0 * std::numbers::ln2), std::nullopt};
  if (name.rfind("first:linear:", 0) == 0)
    return FirstOrderSpec{linear_h(parse_coefficient(name.substr(13))), std::nullopt};
  if (name == "first:logcorrected") return FirstOrderSpec{log_corrected_h(), std::nullopt};
  if (name == "dgff") return SecondOrderSpec{dgff_h(), std::nullopt};
  if (name == "capacity:uniform")
    return CapacitySpec{HSequence::closed_form("uniform", [](int) { return 1.0; }, true)};
  throw std::invalid_argument("unknown preset '" + name + "'");
}

ClusteringSpec spec_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("spec document must be an object");
  if (!doc.contains("variant")) throw std::invalid_argument(key_error("variant", "missing"));
  const std::string variant = string_at(doc, "variant");

  if (variant == "zero") {
    check_keys(doc, {"variant"});
    return ZeroSpec{};
  }
  if (variant == "first_order") {
    check_keys(doc, {"variant", "h", "preset", "c", "h_const"});
    FirstOrderSpec s;
    s.h_const = optional_number(doc, "h_const");
    if (doc.contains("h") == doc.contains("preset"))
      throw std::invalid_argument(key_error("h", "give exactly one of 'h' and 'preset'"));
    if (doc.contains("h")) {
      s.h = HSequence::from_values(number_list(doc, "h"));
    } else {
      const std::string p = string_at(doc, "preset");
      if (p == "linear") {
        if (!doc.contains("c")) throw std::invalid_argument(key_error("c", "missing for preset 'linear'"));
        s.h = linear_h(number_at(doc, "c"));
      } else if (p == "logcorrected") {
        s.h = log_corrected_h();
      } else {
        throw std::invalid_argument(key_error("preset", "unknown first-order preset '" + p + "'"));
      }
    }
    return s;
  }
  if (variant == "second_order") {
    check_keys(doc, {"variant", "h", "preset", "h_const"});
    SecondOrderSpec s;
    s.h_const = optional_number(doc, "h_const");
    if (doc.contains("h") == doc.contains("preset"))
      throw std::invalid_argument(key_error("h", "give exactly one of 'h' and 'preset'"));
    if (doc.contains("h")) {
      const auto& rows = doc.at("h");
      if (!rows.is_array() || rows.empty()) throw std::invalid_argument(key_error("h", "expected a list of rows"));
      std::vector<std::vector<double>> values;
      for (const auto& row : rows) {
        if (!row.is_array()) throw std::invalid_argument(key_error("h", "each row must be a list"));
        std::vector<double> r;
        for (const auto& x : row) {
          if (!x.is_number()) throw std::invalid_argument(key_error("h", "expected numbers"));
          r.push_back(x.get<double>());
        }
        values.push_back(std::move(r));
      }
      try {
        s.h = HArray::from_rows(std::move(values));
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(key_error("h", e.what()));
      }
    } else {
      const std::string p = string_at(doc, "preset");
      if (p != "dgff") throw std::invalid_argument(key_error("preset", "unknown second-order preset '" + p + "'"));
      s.h = dgff_h();
    }
    return s;
  }
  if (variant == "capacity") {
    check_keys(doc, {"variant", "conductances", "preset", "c"});
    if (doc.contains("conductances") == doc.contains("preset"))
      throw std::invalid_argument(key_error("conductances", "give exactly one of 'conductances' and 'preset'"));
    if (doc.contains("conductances")) {
      auto c = number_list(doc, "conductances");
      for (double x : c)
        if (!(x > 0)) throw std::invalid_argument(key_error("conductances", "values must be positive"));
      return CapacitySpec{HSequence::from_values(std::move(c))};
    }
    const std::string p = string_at(doc, "preset");
    if (p != "uniform") throw std::invalid_argument(key_error("preset", "unknown capacity preset '" + p + "'"));
    const double c = doc.contains("c") ? number_at(doc, "c") : 1.0;
    if (!(c > 0)) throw std::invalid_argument(key_error("c", "conductance must be positive"));
    return CapacitySpec{HSequence::closed_form("uniform", [c](int) { return c; }, true)};
  }
  throw std::invalid_argument(key_error("variant", "unknown variant '" + variant + "'"));
}

ClusteringSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open spec file " + path);
  const auto doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw std::invalid_argument("spec file " + path + " is not valid JSON");
  return spec_from_json(doc);
}

}  // namespace pwc
