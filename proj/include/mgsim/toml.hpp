#pragma once

#include <map>
#include <string>
#include <vector>

#include "mgsim/common.hpp"

namespace mgsim::toml {

// Minimal TOML reader covering what scenario files use: tables, arrays of
// tables, bare keys, strings, integers, floats, booleans, and (possibly
// multiline, possibly nested) arrays. Dotted keys are accepted in table
// headers only. Unknown constructs fail with the offending line.
struct Value {
  enum class Kind { integer, real, boolean, string, array, table };
  Kind kind = Kind::table;
  long long int_value = 0;
  double real_value = 0.0;
  bool bool_value = false;
  std::string str_value;
  std::vector<Value> array;
  std::map<std::string, Value> table;
  int line = 0;            // 1-based line of the defining key
  mutable bool visited = false;  // set by the schema layer

  bool is_number() const { return kind == Kind::integer || kind == Kind::real; }
  double as_number() const {
    return kind == Kind::integer ? static_cast<double>(int_value) : real_value;
  }
};

// Parses a whole document into its root table.
Value parse(const std::string& text);
Value parse_file(const std::string& path);

// Schema helper: resolves `dotted.path` inside a root table, marking every
// node on the way as visited. Returns nullptr when absent.
const Value* find(const Value& root, const std::string& dotted_path);

// After schema reading, returns the dotted paths of all unvisited keys.
std::vector<std::string> unvisited_keys(const Value& root);

}  // namespace mgsim::toml
