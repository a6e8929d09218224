#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sigjoin {

/// Base for malformed input data (CSV bodies, schemas, configs).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingColumn : public DataError {
 public:
  using DataError::DataError;
};

class DuplicateHeader : public DataError {
 public:
  using DataError::DataError;
};

class TypeParseError : public DataError {
 public:
  /// `row` is the 1-based line number in the file (the header is row 1).
  TypeParseError(std::size_t row, std::string column, const std::string& detail);

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

enum class ColumnType { Integer, Character, String, Date };

std::string_view to_string(ColumnType type);
std::optional<ColumnType> parse_column_type(std::string_view text);

/// Calendar date, rendered and parsed as YYYY-MM-DD.
struct Date {
  std::int16_t year = 1970;
  std::uint8_t month = 1;
  std::uint8_t day = 1;

  static std::optional<Date> parse(std::string_view text);
  std::string to_string() const;

  friend auto operator<=>(const Date&, const Date&) = default;
};

using Value = std::variant<std::int64_t, char, std::string, Date>;

std::string format_value(const Value& value);

struct Column {
  std::string name;
  ColumnType type;

  friend bool operator==(const Column&, const Column&) = default;
};

class Schema {
 public:
  Schema() = default;
  /// Throws DuplicateHeader on repeated names and MissingColumn if the key
  /// column is not among `columns`.
  Schema(std::vector<Column> columns, std::string key_column);

  const std::vector<Column>& columns() const noexcept { return columns_; }
  const std::string& key_column() const noexcept { return key_column_; }
  std::size_t size() const noexcept { return columns_.size(); }

  std::optional<std::size_t> index_of(std::string_view name) const;
  /// Index of `name`; MissingColumn if absent.
  std::size_t require(std::string_view name) const;
  std::size_t key_index() const { return require(key_column_); }

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<Column> columns_;
  std::string key_column_;
};

using Tuple = std::vector<Value>;

/// Typed values under a schema, stored column by column. String columns keep
/// their bytes in one contiguous arena so key scans and key lookups by row
/// touch compact memory.
class Relation {
 public:
  Relation() = default;
  explicit Relation(Schema schema);

  const Schema& schema() const noexcept { return schema_; }
  std::size_t size() const noexcept { return rows_; }
  bool empty() const noexcept { return rows_ == 0; }

  /// Validates arity and column types before appending.
  void append(Tuple row);

  Value at(std::size_t row, std::size_t column) const;
  Tuple row(std::size_t i) const;

  /// Views of a string column, one per row. MissingColumn if absent,
  /// std::invalid_argument if the column is not string-typed. The views stay
  /// valid until the relation is next modified.
  std::vector<std::string_view> string_column(std::string_view name) const;

  friend bool operator==(const Relation&, const Relation&) = default;

 private:
  struct Strings {
    std::string bytes;
    std::vector<std::size_t> ends;
    friend bool operator==(const Strings&, const Strings&) = default;
  };
  using ColumnData = std::variant<std::vector<std::int64_t>, std::vector<char>, Strings, std::vector<Date>>;

  Schema schema_;
  std::vector<ColumnData> data_;
  std::size_t rows_ = 0;
};

/// Parses an RFC-4180 style CSV whose header names exactly the schema columns
/// (in any order). Fields are taken verbatim; CRLF and LF line endings are both
/// accepted.
Relation parse_csv(std::istream& in, const Schema& schema);
Relation load_csv(const std::filesystem::path& path, const Schema& schema);

/// Writes header and rows with LF line endings, quoting fields that contain a
/// comma, quote, CR or LF.
void emit_csv(std::ostream& out, const Relation& relation);
void save_csv(const std::filesystem::path& path, const Relation& relation);

/// Schema sidecar: key=value lines
///   columns=id:integer,name:string,...
///   key=name
/// Blank lines and lines starting with '#' are ignored.
Schema parse_schema(std::istream& in);
Schema load_schema(const std::filesystem::path& path);
void emit_schema(std::ostream& out, const Schema& schema);
void save_schema(const std::filesystem::path& path, const Schema& schema);

}  // namespace sigjoin
