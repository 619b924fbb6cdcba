#include "tablegan/table_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace tablegan {

namespace {

// RFC-4180 field rules: quote when the value contains separator, quote or
// newline; embedded quotes doubled.
void append_csv_field(std::string& out, const std::string& field) {
  bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) {
    out += field;
    return;
  }
  out += '"';
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

double parse_cell(const std::string& cell, const ColumnSpec& col, size_t row_number) {
  if (cell.empty())
    throw InputError("column '" + col.name + "': missing value (row " +
                     std::to_string(row_number) + ")");
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw InputError("column '" + col.name + "': cannot parse numeric value '" +
                     cell + "' (row " + std::to_string(row_number) + ")");
  return value;
}

std::vector<double> convert_row(const std::vector<std::string>& cells,
                                const TableSchema& schema, size_t row_number) {
  std::vector<double> record(cells.size());
  for (size_t c = 0; c < cells.size(); ++c) {
    const ColumnSpec& col = schema.columns[c];
    if (col.kind == ColumnKind::categorical) {
      auto it = std::lower_bound(col.categories.begin(), col.categories.end(), cells[c]);
      if (it == col.categories.end() || *it != cells[c])
        throw InputError("column '" + col.name + "': unknown category '" + cells[c] +
                         "' (row " + std::to_string(row_number) + ")");
      record[c] = static_cast<double>(it - col.categories.begin());
    } else {
      record[c] = parse_cell(cells[c], col, row_number);
    }
  }
  validate_record(record, schema, row_number);
  return record;
}

}  // namespace

CsvDocument parse_csv(const std::string& text) {
  CsvDocument doc;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool row_started = false;

  auto end_field = [&]() {
    fields.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&](size_t pos) {
    end_field();
    if (doc.header.empty()) {
      doc.header = std::move(fields);
      if (doc.header.empty() || (doc.header.size() == 1 && doc.header[0].empty()))
        throw InputError("CSV has an empty header row");
    } else {
      if (fields.size() != doc.header.size())
        throw InputError("row " + std::to_string(doc.rows.size() + 1) + " has " +
                         std::to_string(fields.size()) + " values under a " +
                         std::to_string(doc.header.size()) + "-column header");
      doc.rows.push_back(std::move(fields));
    }
    fields.clear();
    row_started = false;
    (void)pos;
  };

  for (size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field.empty())
          throw InputError("malformed CSV: quote inside unquoted field near offset " +
                           std::to_string(i));
        in_quotes = true;
        row_started = true;
        break;
      case ',':
        end_field();
        row_started = true;
        break;
      case '\r':
        break;
      case '\n':
        if (row_started || !fields.empty() || !field.empty()) end_row(i);
        break;
      default:
        field += ch;
        row_started = true;
        break;
    }
  }
  if (in_quotes) throw InputError("malformed CSV: unterminated quoted field");
  if (row_started || !fields.empty() || !field.empty()) end_row(text.size());
  if (doc.header.empty()) throw InputError("CSV has no header row");
  return doc;
}

CsvDocument read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open CSV '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

RawTable read_table(const std::string& path, const std::vector<ColumnDecl>& declarations) {
  CsvDocument doc = read_csv(path);
  RawTable table;
  table.schema = build_schema(doc.header, declarations, doc.rows);
  table.rows.reserve(doc.rows.size());
  for (size_t r = 0; r < doc.rows.size(); ++r)
    table.rows.push_back(convert_row(doc.rows[r], table.schema, r + 1));
  return table;
}

RawTable read_table(const std::string& path, const TableSchema& schema) {
  CsvDocument doc = read_csv(path);
  if (doc.header.size() != schema.columns.size())
    throw InputError("CSV '" + path + "' has " + std::to_string(doc.header.size()) +
                     " columns, schema expects " + std::to_string(schema.columns.size()));
  for (size_t c = 0; c < doc.header.size(); ++c)
    if (doc.header[c] != schema.columns[c].name)
      throw InputError("CSV '" + path + "' column " + std::to_string(c + 1) + " is '" +
                       doc.header[c] + "', schema expects '" + schema.columns[c].name + "'");
  RawTable table;
  table.schema = schema;
  table.rows.reserve(doc.rows.size());
  for (size_t r = 0; r < doc.rows.size(); ++r)
    table.rows.push_back(convert_row(doc.rows[r], schema, r + 1));
  return table;
}

std::string row_to_csv(const RawTable& table, size_t row) {
  const auto& record = table.rows.at(row);
  std::string out;
  for (size_t c = 0; c < record.size(); ++c) {
    if (c > 0) out += ',';
    const ColumnSpec& col = table.schema.columns[c];
    if (col.kind == ColumnKind::categorical) {
      append_csv_field(out, col.categories.at(static_cast<size_t>(record[c])));
    } else {
      out += format_double(record[c]);
    }
  }
  return out;
}

std::string table_to_csv(const RawTable& table) {
  std::string out;
  for (size_t c = 0; c < table.schema.columns.size(); ++c) {
    if (c > 0) out += ',';
    append_csv_field(out, table.schema.columns[c].name);
  }
  out += '\n';
  for (size_t r = 0; r < table.rows.size(); ++r) {
    out += row_to_csv(table, r);
    out += '\n';
  }
  return out;
}

void write_table(const RawTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write CSV '" + path + "'");
  out << table_to_csv(table);
  if (!out) throw std::runtime_error("I/O failure writing '" + path + "'");
}

std::pair<RawTable, RawTable> split_train_test(const RawTable& table,
                                               double test_fraction, uint64_t seed) {
  if (table.rows.empty()) throw InputError("cannot split an empty table");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw InputError("test fraction must be in (0,1)");

  size_t n = table.rows.size();
  auto test_size = static_cast<size_t>(
      std::llround(static_cast<double>(n) * test_fraction));
  test_size = std::min(test_size, n);

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  RawTable train{table.schema, {}};
  RawTable test{table.schema, {}};
  test.rows.reserve(test_size);
  train.rows.reserve(n - test_size);
  for (size_t i = 0; i < n; ++i) {
    if (i < test_size)
      test.rows.push_back(table.rows[order[i]]);
    else
      train.rows.push_back(table.rows[order[i]]);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace tablegan
