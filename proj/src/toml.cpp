#include "mgsim/toml.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mgsim::toml {

namespace {

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

class Reader {
 public:
  explicit Reader(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines_.push_back(line);
    }
  }

  Value run() {
    Value root;
    root.kind = Value::Kind::table;
    Value* current = &root;
    while (row_ < lines_.size()) {
      skip_blank();
      if (row_ >= lines_.size()) break;
      const std::string& line = lines_[row_];
      size_t pos = first_nonspace(line);
      if (pos == std::string::npos) {
        ++row_;
        continue;
      }
      if (line[pos] == '[') {
        current = parse_header(root, line, pos);
        ++row_;
      } else {
        parse_key_value(*current, line, pos);
      }
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError(why + " (line " + std::to_string(row_ + 1) + ")",
                     static_cast<int>(row_ + 1));
  }

  static size_t first_nonspace(const std::string& s) {
    for (size_t i = 0; i < s.size(); ++i) {
      if (!std::isspace(static_cast<unsigned char>(s[i]))) {
        return s[i] == '#' ? std::string::npos : i;
      }
    }
    return std::string::npos;
  }

  void skip_blank() {
    while (row_ < lines_.size() && first_nonspace(lines_[row_]) == std::string::npos) ++row_;
  }

  std::vector<std::string> parse_dotted(const std::string& text) {
    std::vector<std::string> parts;
    std::string part;
    for (char c : text) {
      if (c == '.') {
        if (part.empty()) fail("empty name component in '" + text + "'");
        parts.push_back(part);
        part.clear();
      } else if (is_bare_key_char(c)) {
        part += c;
      } else if (!std::isspace(static_cast<unsigned char>(c))) {
        fail(std::string("unexpected character '") + c + "' in table name");
      }
    }
    if (part.empty()) fail("empty name component in '" + text + "'");
    parts.push_back(part);
    return parts;
  }

  Value* parse_header(Value& root, const std::string& line, size_t pos) {
    const bool array_of_tables = line.compare(pos, 2, "[[") == 0;
    const std::string closer = array_of_tables ? "]]" : "]";
    const size_t name_begin = pos + (array_of_tables ? 2 : 1);
    const size_t name_end = line.find(closer, name_begin);
    if (name_end == std::string::npos) fail("unterminated table header");
    const size_t after = name_end + closer.size();
    for (size_t i = after; i < line.size(); ++i) {
      if (line[i] == '#') break;
      if (!std::isspace(static_cast<unsigned char>(line[i]))) {
        fail("unexpected text after table header");
      }
    }
    const std::vector<std::string> parts =
        parse_dotted(line.substr(name_begin, name_end - name_begin));

    Value* node = &root;
    for (size_t i = 0; i < parts.size(); ++i) {
      const bool leaf = i + 1 == parts.size();
      Value& slot = node->table[parts[i]];
      if (slot.line == 0) {
        slot.line = static_cast<int>(row_ + 1);
        slot.kind = leaf && array_of_tables ? Value::Kind::array : Value::Kind::table;
      }
      if (leaf && array_of_tables) {
        if (slot.kind != Value::Kind::array) fail("'" + parts[i] + "' is not an array of tables");
        Value element;
        element.kind = Value::Kind::table;
        element.line = static_cast<int>(row_ + 1);
        slot.array.push_back(std::move(element));
        node = &slot.array.back();
      } else {
        if (slot.kind == Value::Kind::array) {
          if (slot.array.empty()) fail("'" + parts[i] + "' has no elements");
          node = &slot.array.back();  // continue inside the latest element
        } else if (slot.kind == Value::Kind::table) {
          node = &slot;
        } else {
          fail("'" + parts[i] + "' is not a table");
        }
      }
    }
    return node;
  }

  void parse_key_value(Value& table, const std::string& line, size_t pos) {
    size_t i = pos;
    std::string key;
    while (i < line.size() && is_bare_key_char(line[i])) key += line[i++];
    if (key.empty()) fail("expected a key");
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size() || line[i] != '=') {
      fail("expected '=' after key '" + key + "' (dotted keys are not supported)");
    }
    ++i;
    if (table.table.count(key)) fail("duplicate key '" + key + "'");
    const int key_line = static_cast<int>(row_ + 1);
    Value v = parse_value(line, i);
    v.line = key_line;
    // Anything left on the final line must be a comment.
    for (; i < lines_[row_].size(); ++i) {
      const char c = lines_[row_][i];
      if (c == '#') break;
      if (!std::isspace(static_cast<unsigned char>(c))) fail("unexpected trailing text");
    }
    ++row_;
    table.table.emplace(key, std::move(v));
  }

  // Parses one value starting at lines_[row_][i]; may consume further lines
  // for multiline arrays. Leaves row_/i at the position right after it.
  Value parse_value(const std::string& /*first_line*/, size_t& i) {
    skip_value_ws(i);
    const std::string& line = lines_[row_];
    if (i >= line.size()) fail("missing value");
    const char c = line[i];
    Value v;
    if (c == '"') {
      v.kind = Value::Kind::string;
      v.str_value = parse_string(i);
      return v;
    }
    if (c == '[') {
      ++i;
      v.kind = Value::Kind::array;
      while (true) {
        skip_value_ws(i);
        if (i < lines_[row_].size() && lines_[row_][i] == ']') {
          ++i;
          return v;
        }
        v.array.push_back(parse_value(lines_[row_], i));
        skip_value_ws(i);
        if (i < lines_[row_].size() && lines_[row_][i] == ',') {
          ++i;
          continue;
        }
        if (i < lines_[row_].size() && lines_[row_][i] == ']') {
          ++i;
          return v;
        }
        fail("expected ',' or ']' in array");
      }
    }
    if (c == '{') fail("inline tables are not supported");
    return parse_scalar(i);
  }

  // Whitespace and comments inside a value context, continuing across lines
  // (only legal inside arrays; scalar contexts never call this mid-line).
  void skip_value_ws(size_t& i) {
    while (true) {
      const std::string& line = lines_[row_];
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i < line.size() && line[i] == '#') i = line.size();
      if (i < line.size()) return;
      if (row_ + 1 >= lines_.size()) fail("unexpected end of file inside value");
      ++row_;
      i = 0;
    }
  }

  std::string parse_string(size_t& i) {
    const std::string& line = lines_[row_];
    std::string out;
    ++i;  // opening quote
    while (i < line.size()) {
      const char c = line[i];
      if (c == '"') {
        ++i;
        return out;
      }
      if (c == '\\') {
        ++i;
        if (i >= line.size()) break;
        switch (line[i]) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unsupported escape '\\") + line[i] + "'");
        }
        ++i;
      } else {
        out += c;
        ++i;
      }
    }
    fail("unterminated string");
  }

  Value parse_scalar(size_t& i) {
    const std::string& line = lines_[row_];
    const size_t start = i;
    while (i < line.size() && line[i] != ',' && line[i] != ']' && line[i] != '#' &&
           !std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
    }
    const std::string token = line.substr(start, i - start);
    if (token.empty()) fail("missing value");
    Value v;
    if (token == "true" || token == "false") {
      v.kind = Value::Kind::boolean;
      v.bool_value = token == "true";
      return v;
    }
    // Integer first, then float.
    {
      char* end = nullptr;
      const long long iv = std::strtoll(token.c_str(), &end, 10);
      if (end && *end == '\0' && token.find_first_of(".eExX") == std::string::npos) {
        v.kind = Value::Kind::integer;
        v.int_value = iv;
        return v;
      }
    }
    {
      char* end = nullptr;
      const double dv = std::strtod(token.c_str(), &end);
      if (end && *end == '\0') {
        v.kind = Value::Kind::real;
        v.real_value = dv;
        return v;
      }
    }
    fail("cannot parse value '" + token + "'");
  }

  std::vector<std::string> lines_;
  size_t row_ = 0;
};

void collect_unvisited(const Value& v, const std::string& path, std::vector<std::string>& out) {
  if (v.kind == Value::Kind::table) {
    for (const auto& [key, child] : v.table) {
      const std::string child_path = path.empty() ? key : path + "." + key;
      if (!child.visited) {
        out.push_back(child_path + " (line " + std::to_string(child.line) + ")");
      } else {
        collect_unvisited(child, child_path, out);
      }
    }
  } else if (v.kind == Value::Kind::array) {
    for (size_t i = 0; i < v.array.size(); ++i) {
      collect_unvisited(v.array[i], path + "[" + std::to_string(i) + "]", out);
    }
  }
}

}  // namespace

Value parse(const std::string& text) { return Reader(text).run(); }

Value parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("file not found: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const Value* find(const Value& root, const std::string& dotted_path) {
  const Value* node = &root;
  std::string part;
  std::stringstream ss(dotted_path);
  while (std::getline(ss, part, '.')) {
    if (node->kind != Value::Kind::table) return nullptr;
    const auto it = node->table.find(part);
    if (it == node->table.end()) return nullptr;
    it->second.visited = true;
    node = &it->second;
  }
  return node;
}

std::vector<std::string> unvisited_keys(const Value& root) {
  std::vector<std::string> out;
  collect_unvisited(root, "", out);
  return out;
}

}  // namespace mgsim::toml
