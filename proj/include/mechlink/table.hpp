#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mechlink {

inline constexpr const char* kLibraryVersion = "0.1.0";

// Rectangular numeric result set with string metadata. Serialization is
// lossless: doubles are written with shortest round-trip formatting.
struct ResultTable {
  std::map<std::string, std::string> meta;  // sorted keys keep output stable
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void validate() const;  // rectangularity
};

// CSV with '#'-prefixed key=value metadata lines, then a header row, then
// data. LF line endings.
std::string to_csv(const ResultTable& table);
ResultTable from_csv(const std::string& text);

// {"meta": {...}, "columns": [...], "rows": [[...]]}; NaN serialized as null.
std::string to_json(const ResultTable& table);
ResultTable from_json(const std::string& text);

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

// FNV-1a over a canonical byte string.
std::uint64_t fnv1a_hash(const std::string& bytes);

}  // namespace mechlink
