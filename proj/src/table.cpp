#include "mechlink/table.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mechlink {

void ResultTable::validate() const {
  for (const auto& row : rows)
    if (row.size() != columns.size())
      throw std::invalid_argument("ResultTable: ragged row");
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin) throw std::invalid_argument("ResultTable: bad numeric field '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string to_csv(const ResultTable& table) {
  table.validate();
  std::ostringstream out;
  for (const auto& [key, value] : table.meta) out << "# " << key << "=" << value << "\n";
  for (size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << ",";
    out << table.columns[i];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      out << format_double(row[i]);
    }
    out << "\n";
  }
  return out.str();
}

ResultTable from_csv(const std::string& text) {
  ResultTable table;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      if (!body.empty() && body[0] == ' ') body.erase(0, 1);
      auto eq = body.find('=');
      if (eq != std::string::npos)
        table.meta[body.substr(0, eq)] = body.substr(eq + 1);
      continue;
    }
    if (!have_header) {
      table.columns = split(line, ',');
      have_header = true;
      continue;
    }
    auto fields = split(line, ',');
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_double(f));
    table.rows.push_back(std::move(row));
  }
  table.validate();
  return table;
}

std::string to_json(const ResultTable& table) {
  table.validate();
  nlohmann::json j;
  j["meta"] = table.meta;
  j["columns"] = table.columns;
  auto rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    auto jr = nlohmann::json::array();
    for (double v : row) {
      if (std::isnan(v))
        jr.push_back(nullptr);
      else
        jr.push_back(v);
    }
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

ResultTable from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ResultTable table;
  for (auto& [key, value] : j.at("meta").items())
    table.meta[key] = value.get<std::string>();
  table.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& jr : j.at("rows")) {
    std::vector<double> row;
    row.reserve(jr.size());
    for (const auto& v : jr) {
      if (v.is_null())
        row.push_back(std::nan(""));
      else
        row.push_back(v.get<double>());
    }
    table.rows.push_back(std::move(row));
  }
  table.validate();
  return table;
}

std::uint64_t fnv1a_hash(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace mechlink
