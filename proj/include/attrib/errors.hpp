#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace attrib {

// Root of every error raised by the library. Callers that only need to
// report can catch this; tests catch the concrete kinds below.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ATTRIB_DEFINE_ERROR(Name)          \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

// corpus_model
ATTRIB_DEFINE_ERROR(IoError);
ATTRIB_DEFINE_ERROR(EncodingError);
ATTRIB_DEFINE_ERROR(SchemaError);
ATTRIB_DEFINE_ERROR(OffsetMismatch);
ATTRIB_DEFINE_ERROR(ChainError);
ATTRIB_DEFINE_ERROR(DuplicateAttrId);
ATTRIB_DEFINE_ERROR(MissingField);
ATTRIB_DEFINE_ERROR(BoundsError);
ATTRIB_DEFINE_ERROR(ValidationError);

// label_store
ATTRIB_DEFINE_ERROR(HeaderMismatch);
ATTRIB_DEFINE_ERROR(DuplicateKey);
ATTRIB_DEFINE_ERROR(KeyMismatch);

// source_classifier
ATTRIB_DEFINE_ERROR(RuleError);
ATTRIB_DEFINE_ERROR(UnresolvedKey);

// stats_engine
ATTRIB_DEFINE_ERROR(EmptyPopulation);
ATTRIB_DEFINE_ERROR(DegenerateTable);
ATTRIB_DEFINE_ERROR(ZeroExpected);
ATTRIB_DEFINE_ERROR(RankDeficientDesign);
ATTRIB_DEFINE_ERROR(NonFiniteIterate);
ATTRIB_DEFINE_ERROR(NotNested);

// mosaic_render
ATTRIB_DEFINE_ERROR(EmptyTable);
ATTRIB_DEFINE_ERROR(DimensionMismatch);

#undef ATTRIB_DEFINE_ERROR

// Parse failure tied to a 1-based input line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Closed-set violation in a CSV cell.
class EnumParseError : public Error {
 public:
  EnumParseError(std::size_t row, std::string column, std::string value)
      : Error("row " + std::to_string(row) + ", column '" + column +
              "': unknown value '" + value + "'"),
        row_(row),
        column_(std::move(column)),
        value_(std::move(value)) {}
  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }
  const std::string& value() const { return value_; }

 private:
  std::size_t row_;
  std::string column_;
  std::string value_;
};

}  // namespace attrib
