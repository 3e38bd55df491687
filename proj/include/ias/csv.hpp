#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ias {

/// Minimal RFC-4180-style reader: comma separated, double-quoted fields may
/// contain commas and doubled quotes. Records end at newlines outside quotes.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(&in) {}
  /// Reads the next record into `fields`; false at end of input.
  bool next(std::vector<std::string>& fields);

 private:
  std::istream* in_;
};

/// Quotes a field if it contains a comma, quote or newline.
std::string csv_escape(const std::string& field);

/// Shortest decimal form that round-trips a double ("%.17g", trimmed).
std::string format_double(double value);

}  // namespace ias
