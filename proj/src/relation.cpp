#include "sigjoin/relation.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <type_traits>
#include <unordered_set>

namespace sigjoin {

namespace {

bool is_leap(int year) { return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0; }

int days_in_month(int year, int month) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return month == 2 && is_leap(year) ? 29 : kDays[month - 1];
}

template <typename Int>
bool parse_digits(std::string_view text, Int& out) {
  if (text.empty()) return false;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
  }
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

/// Reads one CSV record; returns false at end of input. `line` advances by the
/// number of physical lines consumed.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string field;
  bool quoted = false;
  bool field_was_quoted = false;
  char c;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && field.empty() && !field_was_quoted) {
      quoted = true;
      field_was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_was_quoted = false;
    } else if (c == '\r' && in.peek() == '\n') {
      // CRLF: the LF ends the record
    } else if (c == '\n') {
      ++line;
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw DataError("unterminated quoted field near line " + std::to_string(line + 1));
  ++line;
  fields.push_back(std::move(field));
  return true;
}

bool needs_quotes(std::string_view s) { return s.find_first_of(",\"\r\n") != std::string_view::npos; }

void write_field(std::ostream& out, std::string_view s) {
  if (!needs_quotes(s)) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

Value parse_value(std::string_view text, ColumnType type, std::size_t row, const std::string& column) {
  switch (type) {
    case ColumnType::Integer: {
      std::int64_t v = 0;
      const bool negative = !text.empty() && text.front() == '-';
      std::uint64_t magnitude = 0;
      if (!parse_digits(negative ? text.substr(1) : text, magnitude) ||
          magnitude > static_cast<std::uint64_t>(INT64_MAX) + (negative ? 1 : 0)) {
        throw TypeParseError(row, column, "expected integer, got '" + std::string(text) + "'");
      }
      v = negative ? static_cast<std::int64_t>(0 - magnitude) : static_cast<std::int64_t>(magnitude);
      return v;
    }
    case ColumnType::Character:
      if (text.size() != 1) {
        throw TypeParseError(row, column, "expected a single character, got '" + std::string(text) + "'");
      }
      return text.front();
    case ColumnType::String:
      return std::string(text);
    case ColumnType::Date:
      if (auto d = Date::parse(text)) return *d;
      throw TypeParseError(row, column, "expected date YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  throw TypeParseError(row, column, "unknown column type");
}

bool conforms(const Value& v, ColumnType type) {
  switch (type) {
    case ColumnType::Integer: return std::holds_alternative<std::int64_t>(v);
    case ColumnType::Character: return std::holds_alternative<char>(v);
    case ColumnType::String: return std::holds_alternative<std::string>(v);
    case ColumnType::Date: return std::holds_alternative<Date>(v);
  }
  return false;
}

}  // namespace

TypeParseError::TypeParseError(std::size_t row, std::string column, const std::string& detail)
    : DataError("row " + std::to_string(row) + ", column '" + column + "': " + detail),
      row_(row),
      column_(std::move(column)) {}

std::string_view to_string(ColumnType type) {
  switch (type) {
    case ColumnType::Integer: return "integer";
    case ColumnType::Character: return "character";
    case ColumnType::String: return "string";
    case ColumnType::Date: return "date";
  }
  return "?";
}

std::optional<ColumnType> parse_column_type(std::string_view text) {
  if (text == "integer") return ColumnType::Integer;
  if (text == "character") return ColumnType::Character;
  if (text == "string") return ColumnType::String;
  if (text == "date") return ColumnType::Date;
  return std::nullopt;
}

std::optional<Date> Date::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_digits(text.substr(0, 4), y) || !parse_digits(text.substr(5, 2), m) ||
      !parse_digits(text.substr(8, 2), d)) {
    return std::nullopt;
  }
  if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) return std::nullopt;
  return Date{static_cast<std::int16_t>(y), static_cast<std::uint8_t>(m), static_cast<std::uint8_t>(d)};
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::string format_value(const Value& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, char>) {
          return std::string(1, v);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else {
          return v.to_string();
        }
      },
      value);
}

Schema::Schema(std::vector<Column> columns, std::string key_column)
    : columns_(std::move(columns)), key_column_(std::move(key_column)) {
  std::unordered_set<std::string> names;
  for (const auto& c : columns_) {
    if (!names.insert(c.name).second) throw DuplicateHeader("duplicate column '" + c.name + "'");
  }
  if (!names.contains(key_column_)) throw MissingColumn("key column '" + key_column_ + "' is not in the schema");
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Schema::require(std::string_view name) const {
  if (auto i = index_of(name)) return *i;
  throw MissingColumn("no column named '" + std::string(name) + "'");
}

Relation::Relation(Schema schema) : schema_(std::move(schema)) {
  for (const auto& c : schema_.columns()) {
    switch (c.type) {
      case ColumnType::Integer: data_.emplace_back(std::vector<std::int64_t>{}); break;
      case ColumnType::Character: data_.emplace_back(std::vector<char>{}); break;
      case ColumnType::String: data_.emplace_back(Strings{}); break;
      case ColumnType::Date: data_.emplace_back(std::vector<Date>{}); break;
    }
  }
}

void Relation::append(Tuple row) {
  if (row.size() != schema_.size()) {
    throw DataError("row has " + std::to_string(row.size()) + " values, schema has " +
                    std::to_string(schema_.size()) + " columns");
  }
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (!conforms(row[i], schema_.columns()[i].type)) {
      throw TypeParseError(rows_ + 2, schema_.columns()[i].name,
                           "value is not of type " + std::string(to_string(schema_.columns()[i].type)));
    }
  }
  for (std::size_t i = 0; i < row.size(); ++i) {
    std::visit(
        [&](auto& column) {
          using C = std::decay_t<decltype(column)>;
          if constexpr (std::is_same_v<C, Strings>) {
            column.bytes += std::get<std::string>(row[i]);
            column.ends.push_back(column.bytes.size());
          } else {
            column.push_back(std::get<typename C::value_type>(row[i]));
          }
        },
        data_[i]);
  }
  ++rows_;
}

Value Relation::at(std::size_t row, std::size_t column) const {
  if (row >= rows_ || column >= data_.size()) throw std::out_of_range("relation cell out of range");
  return std::visit(
      [&](const auto& c) -> Value {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, Strings>) {
          const std::size_t begin = row ? c.ends[row - 1] : 0;
          return c.bytes.substr(begin, c.ends[row] - begin);
        } else {
          return c[row];
        }
      },
      data_[column]);
}

Tuple Relation::row(std::size_t i) const {
  Tuple out;
  out.reserve(data_.size());
  for (std::size_t c = 0; c < data_.size(); ++c) out.push_back(at(i, c));
  return out;
}

std::vector<std::string_view> Relation::string_column(std::string_view name) const {
  const std::size_t col = schema_.require(name);
  if (schema_.columns()[col].type != ColumnType::String) {
    throw std::invalid_argument("column '" + std::string(name) + "' is not string-typed");
  }
  const auto& c = std::get<Strings>(data_[col]);
  const std::string_view bytes(c.bytes);
  std::vector<std::string_view> out;
  out.reserve(rows_);
  std::size_t begin = 0;
  for (auto end : c.ends) {
    out.push_back(bytes.substr(begin, end - begin));
    begin = end;
  }
  return out;
}

Relation parse_csv(std::istream& in, const Schema& schema) {
  std::vector<std::string> fields;
  std::size_t line = 0;
  if (!read_record(in, fields, line)) throw DataError("CSV input is empty (no header row)");

  std::unordered_set<std::string> seen;
  for (const auto& name : fields) {
    if (!seen.insert(name).second) throw DuplicateHeader("duplicate header column '" + name + "'");
  }
  // field position -> schema column index
  std::vector<std::size_t> mapping(fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto idx = schema.index_of(fields[i]);
    if (!idx) throw DataError("header column '" + fields[i] + "' is not in the schema");
    mapping[i] = *idx;
  }
  for (const auto& column : schema.columns()) {
    if (!seen.contains(column.name)) throw MissingColumn("header lacks column '" + column.name + "'");
  }

  Relation rel(schema);
  while (true) {
    const std::size_t row = line + 1;
    if (!read_record(in, fields, line)) break;
    if (fields.size() == 1 && fields[0].empty() && in.peek() == std::char_traits<char>::eof()) break;
    if (fields.size() != mapping.size()) {
      throw DataError("row " + std::to_string(row) + " has " + std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(mapping.size()));
    }
    Tuple tuple(schema.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto& column = schema.columns()[mapping[i]];
      tuple[mapping[i]] = parse_value(fields[i], column.type, row, column.name);
    }
    rel.append(std::move(tuple));
  }
  return rel;
}

Relation load_csv(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_csv(in, schema);
}

void emit_csv(std::ostream& out, const Relation& relation) {
  const auto& columns = relation.schema().columns();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out << ',';
    write_field(out, columns[i].name);
  }
  out << '\n';
  for (std::size_t r = 0; r < relation.size(); ++r) {
    const auto row = relation.row(r);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      write_field(out, format_value(row[i]));
    }
    out << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Relation& relation) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  emit_csv(out, relation);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Schema parse_schema(std::istream& in) {
  std::vector<Column> columns;
  std::optional<std::string> key;
  bool have_columns = false;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw DataError("schema line " + std::to_string(line) + ": expected key=value");
    }
    const auto name = trim(text.substr(0, eq));
    const auto value = trim(text.substr(eq + 1));
    if (name == "key") {
      key = std::string(value);
    } else if (name == "columns") {
      have_columns = true;
      std::size_t start = 0;
      while (start <= value.size()) {
        auto end = value.find(',', start);
        if (end == std::string_view::npos) end = value.size();
        const auto item = trim(value.substr(start, end - start));
        const auto colon = item.rfind(':');
        if (colon == std::string_view::npos) {
          throw DataError("schema line " + std::to_string(line) + ": column '" + std::string(item) +
                          "' needs name:type");
        }
        const auto type = parse_column_type(trim(item.substr(colon + 1)));
        if (!type) {
          throw DataError("schema line " + std::to_string(line) + ": unknown type '" +
                          std::string(item.substr(colon + 1)) + "'");
        }
        columns.push_back({std::string(trim(item.substr(0, colon))), *type});
        start = end + 1;
      }
    } else {
      throw DataError("schema line " + std::to_string(line) + ": unknown setting '" + std::string(name) + "'");
    }
  }
  if (!have_columns) throw DataError("schema has no columns= line");
  if (!key) throw DataError("schema has no key= line");
  return Schema(std::move(columns), std::move(*key));
}

Schema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_schema(in);
}

void emit_schema(std::ostream& out, const Schema& schema) {
  out << "columns=";
  for (std::size_t i = 0; i < schema.columns().size(); ++i) {
    if (i) out << ',';
    out << schema.columns()[i].name << ':' << to_string(schema.columns()[i].type);
  }
  out << "\nkey=" << schema.key_column() << '\n';
}

void save_schema(const std::filesystem::path& path, const Schema& schema) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  emit_schema(out, schema);
}

}  // namespace sigjoin
