#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "pwc/clustering.hpp"
#include "pwc/tree.hpp"

namespace pwc {

/// 17 significant digits; inf, -inf and nan spelled out.
std::string format_double(double x);
double parse_double(const std::string& text);

/// "[0,3,5]"; "[]" for the empty set.
std::string format_leaf_set(const LeafSet& a);
LeafSet parse_leaf_set(int depth, const std::string& text);

/// A comma-separated table with a header row. Fields containing commas are double-quoted.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

void write_table(std::ostream& os, const Table& t);
/// Parses a table, checking that every row has one field per column.
Table read_table(std::istream& is);

/// "lo:hi:step" (inclusive) or a comma list.
std::vector<double> parse_grid(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

/// Presets: zero, first:linear:<c> (c a number, "ln2" or "<x>ln2"), first:linear3ln2,
/// first:logcorrected, dgff, capacity:uniform.
ClusteringSpec preset(const std::string& name);

/// {"variant": "zero" | "first_order" | "second_order" | "capacity", ...}. Errors cite the key.
ClusteringSpec spec_from_json(const nlohmann::json& doc);
ClusteringSpec load_spec_file(const std::string& path);

}  // namespace pwc
