#include "tablegan/schema.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace tablegan {

std::string to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::continuous: return "continuous";
    case ColumnKind::discrete: return "discrete";
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::label: return "label";
  }
  return "?";
}

ColumnKind column_kind_from_string(const std::string& text) {
  if (text == "continuous") return ColumnKind::continuous;
  if (text == "discrete") return ColumnKind::discrete;
  if (text == "categorical") return ColumnKind::categorical;
  if (text == "label") return ColumnKind::label;
  throw InputError("unknown column kind '" + text + "'");
}

int TableSchema::index_of(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name == name) return static_cast<int>(i);
  return -1;
}

int TableSchema::label_index() const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i].kind == ColumnKind::label) return static_cast<int>(i);
  return -1;
}

namespace {

void fnv_mix(uint64_t& h, const void* data, size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
}

void fnv_mix_string(uint64_t& h, const std::string& s) {
  fnv_mix(h, s.data(), s.size());
  char sep = '\x1f';
  fnv_mix(h, &sep, 1);
}

void fnv_mix_double(uint64_t& h, double v) {
  uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, sizeof(bits));
  fnv_mix(h, &bits, sizeof(bits));
}

double parse_numeric_cell(const std::string& cell, const std::string& column,
                          size_t row_number) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || cell.empty()) {
    std::ostringstream msg;
    msg << "column '" << column << "': cannot parse numeric value '" << cell << "'";
    if (row_number > 0) msg << " (row " << row_number << ")";
    throw InputError(msg.str());
  }
  if (!std::isfinite(value))
    throw InputError("column '" + column + "': non-finite value");
  return value;
}

}  // namespace

uint64_t TableSchema::hash() const {
  uint64_t h = 1469598103934665603ULL;
  for (const auto& col : columns) {
    fnv_mix_string(h, col.name);
    fnv_mix_string(h, to_string(col.kind));
    char qid = col.is_qid ? '1' : '0';
    fnv_mix(h, &qid, 1);
    char bin = col.label_is_binary ? '1' : '0';
    fnv_mix(h, &bin, 1);
    if (col.numeric()) {
      fnv_mix_double(h, col.min);
      fnv_mix_double(h, col.max);
    }
    for (const auto& cat : col.categories) fnv_mix_string(h, cat);
  }
  return h;
}

TableSchema build_schema(const std::vector<std::string>& header,
                         const std::vector<ColumnDecl>& declarations,
                         const std::vector<std::vector<std::string>>& rows) {
  if (header.empty()) throw InputError("empty header");
  std::unordered_set<std::string> seen;
  for (const auto& name : header)
    if (!seen.insert(name).second)
      throw InputError("duplicate column name '" + name + "'");

  if (declarations.size() != header.size())
    throw InputError("schema declares " + std::to_string(declarations.size()) +
                     " columns but header has " + std::to_string(header.size()));

  std::unordered_map<std::string, const ColumnDecl*> by_name;
  for (const auto& decl : declarations) {
    if (!by_name.emplace(decl.name, &decl).second)
      throw InputError("duplicate declaration for column '" + decl.name + "'");
  }

  int label_count = 0;
  for (const auto& decl : declarations)
    if (decl.kind == ColumnKind::label) ++label_count;
  if (label_count != 1)
    throw InputError("schema must declare exactly one label column, found " +
                     std::to_string(label_count));

  for (const auto& row : rows)
    if (row.size() != header.size())
      throw InputError("data row has " + std::to_string(row.size()) +
                       " values, expected " + std::to_string(header.size()));

  TableSchema schema;
  schema.columns.reserve(header.size());
  for (size_t c = 0; c < header.size(); ++c) {
    auto it = by_name.find(header[c]);
    if (it == by_name.end())
      throw InputError("no declaration for column '" + header[c] + "'");
    const ColumnDecl& decl = *it->second;

    ColumnSpec col;
    col.name = decl.name;
    col.kind = decl.kind;
    col.is_qid = decl.is_qid;

    if (col.kind == ColumnKind::categorical) {
      std::set<std::string> cats;
      if (decl.categories) {
        if (decl.categories->empty())
          throw InputError("column '" + col.name + "': empty category set");
        for (const auto& cat : *decl.categories)
          if (!cats.insert(cat).second)
            throw InputError("column '" + col.name + "': duplicate category '" + cat + "'");
      } else {
        if (rows.empty())
          throw InputError("column '" + col.name +
                           "': categories not declared and no data to infer from");
        for (size_t r = 0; r < rows.size(); ++r) cats.insert(rows[r][c]);
      }
      col.categories.assign(cats.begin(), cats.end());
    } else {
      bool have_min = decl.min.has_value();
      bool have_max = decl.max.has_value();
      if (have_min) col.min = *decl.min;
      if (have_max) col.max = *decl.max;
      if (!have_min || !have_max) {
        if (rows.empty())
          throw InputError("column '" + col.name +
                           "': min/max not declared and no data to infer from");
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (size_t r = 0; r < rows.size(); ++r) {
          double v = parse_numeric_cell(rows[r][c], col.name, r + 1);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        if (!have_min) col.min = lo;
        if (!have_max) col.max = hi;
      }
      if (col.kind == ColumnKind::label) {
        col.label_is_binary = true;
        if (!rows.empty()) {
          for (size_t r = 0; r < rows.size(); ++r) {
            double v = parse_numeric_cell(rows[r][c], col.name, r + 1);
            if (v != 0.0 && v != 1.0) {
              col.label_is_binary = false;
              break;
            }
          }
        } else {
          col.label_is_binary = (col.min == 0.0 && col.max == 1.0);
        }
        if (col.label_is_binary) {
          col.min = 0.0;
          col.max = 1.0;
        }
      }
      if (!(col.min < col.max)) {
        if (col.kind == ColumnKind::label && col.label_is_binary) {
          // binary labels always span [0,1]
        } else {
          throw InputError("column '" + col.name + "': degenerate column range [" +
                           std::to_string(col.min) + ", " + std::to_string(col.max) + "]");
        }
      }
      if (col.kind == ColumnKind::discrete &&
          std::floor(col.max) < std::ceil(col.min))
        throw InputError("column '" + col.name + "': discrete range holds no integer");
    }
    schema.columns.push_back(std::move(col));
  }
  return schema;
}

namespace {

std::vector<std::string> split_on(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char ch : text) {
    if (ch == sep) {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  parts.push_back(current);
  return parts;
}

}  // namespace

std::vector<ColumnDecl> parse_declarations(const std::string& text) {
  std::vector<ColumnDecl> decls;
  std::istringstream in(text);
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream tokens(line);
    std::string word;
    if (!(tokens >> word) || word[0] == '#') continue;
    if (word != "column")
      throw InputError("schema config line " + std::to_string(line_number) +
                       ": expected 'column', got '" + word + "'");
    ColumnDecl decl;
    std::string kind;
    if (!(tokens >> decl.name >> kind))
      throw InputError("schema config line " + std::to_string(line_number) +
                       ": expected 'column <name> <kind> ...'");
    decl.kind = column_kind_from_string(kind);
    while (tokens >> word) {
      if (word == "qid") {
        decl.is_qid = true;
      } else if (word.rfind("min=", 0) == 0) {
        decl.min = parse_numeric_cell(word.substr(4), decl.name, line_number);
      } else if (word.rfind("max=", 0) == 0) {
        decl.max = parse_numeric_cell(word.substr(4), decl.name, line_number);
      } else if (word.rfind("categories=", 0) == 0) {
        decl.categories = split_on(word.substr(11), ',');
      } else {
        throw InputError("schema config line " + std::to_string(line_number) +
                         ": unknown attribute '" + word + "'");
      }
    }
    decls.push_back(std::move(decl));
  }
  return decls;
}

std::vector<ColumnDecl> read_declarations(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open schema config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_declarations(buf.str());
}

void validate_record(const std::vector<double>& record, const TableSchema& schema,
                     size_t row_number) {
  auto fail = [&](const std::string& msg) {
    std::ostringstream out;
    out << msg;
    if (row_number > 0) out << " (row " << row_number << ")";
    throw InputError(out.str());
  };
  if (record.size() != schema.columns.size())
    fail("record has " + std::to_string(record.size()) + " values, expected " +
         std::to_string(schema.columns.size()));
  for (size_t c = 0; c < record.size(); ++c) {
    const ColumnSpec& col = schema.columns[c];
    double v = record[c];
    if (!std::isfinite(v)) fail("column '" + col.name + "': non-finite value");
    if (col.kind == ColumnKind::categorical) {
      double idx = std::round(v);
      if (idx != v || idx < 0 || idx >= static_cast<double>(col.categories.size()))
        fail("column '" + col.name + "': category index " + std::to_string(v) +
             " out of range");
    } else {
      if (v < col.min || v > col.max)
        fail("column '" + col.name + "': value " + std::to_string(v) +
             " outside [" + std::to_string(col.min) + ", " + std::to_string(col.max) + "]");
    }
  }
}

}  // namespace tablegan
