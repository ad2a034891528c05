#include "subtrop/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "subtrop/error.hpp"

namespace subtrop {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool is_nan_token(std::string_view s) {
  if (s.size() != 3) return false;
  auto lower = [](char c) { return static_cast<char>(c | 0x20); };
  return lower(s[0]) == 'n' && lower(s[1]) == 'a' && lower(s[2]) == 'n';
}

}  // namespace

NonNegMatrix parse_csv(std::istream& in, bool skip_header) {
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<bool>> missing;
  std::string line;
  std::size_t line_no = 0;
  bool any_missing = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_header && line_no == 1) continue;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::vector<bool> miss;
    std::string_view rest(line);
    std::size_t col = 0;
    while (true) {
      ++col;
      const auto comma = rest.find(',');
      const auto cell = trim(rest.substr(0, comma));
      if (is_nan_token(cell)) {
        row.push_back(0.0);
        miss.push_back(true);
        any_missing = true;
      } else {
        double v = 0.0;
        const auto* first = cell.data();
        const auto* last = cell.data() + cell.size();
        if (!cell.empty() && *first == '+') ++first;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (cell.empty() || ec != std::errc() || ptr != last) {
          throw DataError("CSV parse error at line " + std::to_string(line_no) +
                          ", column " + std::to_string(col) + ": '" +
                          std::string(cell) + "' is not a number");
        }
        if (!std::isfinite(v) || v < 0.0) {
          throw DataError("CSV value at line " + std::to_string(line_no) +
                          ", column " + std::to_string(col) +
                          " must be finite and nonnegative");
        }
        row.push_back(v);
        miss.push_back(false);
      }
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DataError("CSV line " + std::to_string(line_no) + " has " +
                      std::to_string(row.size()) + " columns, expected " +
                      std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
    missing.push_back(std::move(miss));
  }
  if (rows.empty()) throw DataError("CSV input contains no rows");
  NonNegMatrix A = NonNegMatrix::from_rows(rows);
  if (any_missing) {
    for (std::size_t i = 0; i < missing.size(); ++i) {
      for (std::size_t j = 0; j < missing[i].size(); ++j) {
        if (missing[i][j]) A.set_missing(i, j);
      }
    }
  }
  return A;
}

NonNegMatrix read_csv(const std::filesystem::path& path, bool skip_header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return parse_csv(in, skip_header);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const NonNegMatrix& A) {
  std::string line;
  for (std::size_t i = 0; i < A.rows(); ++i) {
    line.clear();
    for (std::size_t j = 0; j < A.cols(); ++j) {
      if (j) line += ',';
      line += A.is_observed(i, j) ? format_double(A(i, j)) : "NaN";
    }
    line += '\n';
    out << line;
  }
}

void write_csv(const std::filesystem::path& path, const NonNegMatrix& A) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_csv(out, A);
}

}  // namespace subtrop
