#pragma once
// Minimal CSV I/O: comma-separated, one header row, '#' metadata lines,
// unquoted numeric cells. Numbers are written with 17 significant digits
// so that values round-trip exactly.

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

namespace fcp::csv {

class parse_error : public std::runtime_error {
public:
  parse_error(const std::string &source, std::size_t line, const std::string &msg)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

inline std::string format_double(double x) {
  if (std::isnan(x))
    return "nan";
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::vector<std::string> split(const std::string &line, char sep = ',') {
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

inline std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Strict full-token parse; throws std::invalid_argument otherwise.
inline double parse_double(const std::string &tok) {
  const std::string t = trim(tok);
  if (t.empty())
    throw std::invalid_argument("empty numeric field");
  errno = 0;
  char *end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE)
    throw std::invalid_argument("not a number: '" + t + "'");
  return v;
}

struct Table {
  std::vector<std::string> metadata; ///< '#' lines without the marker
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string &name) const {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (header[j] == name)
        return j;
    throw std::invalid_argument("missing column '" + name + "'");
  }
};

/// Every non-comment row must have the header's width and numeric cells.
inline Table read_numeric(std::istream &in, const std::string &source = "<input>") {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (!line.empty() && line[0] == '#') {
      t.metadata.push_back(trim(line.substr(1)));
      continue;
    }
    if (trim(line).empty())
      continue;
    if (line.find('"') != std::string::npos)
      throw parse_error(source, lineno, "quoted fields are not supported");
    auto cells = split(line);
    if (!have_header) {
      for (auto &c : cells) {
        c = trim(c);
        if (c.empty())
          throw parse_error(source, lineno, "empty column name in header");
      }
      t.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size())
      throw parse_error(source, lineno,
                        "expected " + std::to_string(t.header.size()) + " fields, found " +
                            std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      try {
        row.push_back(parse_double(cells[j]));
      } catch (const std::invalid_argument &e) {
        throw parse_error(source, lineno, "column '" + t.header[j] + "': " + e.what());
      }
    }
    t.rows.push_back(std::move(row));
  }
  if (!have_header)
    throw parse_error(source, lineno, "no header row");
  return t;
}

inline Table read_numeric_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open '" + path + "'");
  return read_numeric(in, path);
}

class Writer {
public:
  explicit Writer(std::ostream &out) : out_(out) {}

  Writer &meta(const std::string &line) {
    out_ << "# " << line << '\n';
    return *this;
  }

  Writer &header(const std::vector<std::string> &cols) {
    for (std::size_t j = 0; j < cols.size(); ++j)
      out_ << (j ? "," : "") << cols[j];
    out_ << '\n';
    return *this;
  }

  /// Starts a row; cells are appended with cell() and closed by end().
  Writer &cell(const std::string &s) {
    out_ << (first_ ? "" : ",") << s;
    first_ = false;
    return *this;
  }
  Writer &cell(double x) { return cell(format_double(x)); }
  template <class Int>
    requires std::is_integral_v<Int>
  Writer &cell(Int x) { return cell(std::to_string(x)); }
  Writer &end() {
    out_ << '\n';
    first_ = true;
    return *this;
  }

private:
  std::ostream &out_;
  bool first_ = true;
};

} // namespace fcp::csv
