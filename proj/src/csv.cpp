#include "obl/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string_view>
#include <vector>

#include "obl/error.hpp"

namespace obl {
namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view cell = line.substr(start, comma - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) {
      cell.remove_suffix(1);
    }
    cells.push_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_number(std::string_view cell, std::size_t line_no, std::string_view column) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw FormatError("line " + std::to_string(line_no) + ": column '" + std::string(column) +
                      "' is not a finite number: '" + std::string(cell) + "'");
  }
  return v;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> line_numbers;
};

// Reads a header plus numeric rows. Blank lines and '#' comments are skipped.
Table read_table(std::istream& in) {
  Table t;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (view.find_first_not_of(" \t\r") == std::string_view::npos || view.front() == '#') continue;
    const auto cells = split(view);
    if (!have_header) {
      for (auto c : cells) t.header.emplace_back(c);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(t.header.size()) + " columns, found " +
                        std::to_string(cells.size()));
    }
    std::vector<double> row;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      row.push_back(parse_number(cells[c], line_no, t.header[c]));
    }
    t.rows.push_back(std::move(row));
    t.line_numbers.push_back(line_no);
  }
  if (!have_header) throw UsageError("input is empty: no header and no rows");
  return t;
}

std::size_t leading_columns(const std::vector<std::string>& header, std::string_view prefix) {
  std::size_t n = 0;
  while (n < header.size() && header[n] == std::string(prefix) + std::to_string(n + 1)) ++n;
  return n;
}

void expect_column(const Table& t, std::size_t index, std::string_view name) {
  if (index >= t.header.size() || t.header[index] != name) {
    throw FormatError("line 1: expected column '" + std::string(name) + "' at position " +
                      std::to_string(index + 1));
  }
}

void check_in_box(const std::vector<Point>& xs, const Table& t, const DomainBox& box,
                  std::string_view what) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!box.contains(xs[i])) {
      throw DomainError("line " + std::to_string(t.line_numbers[i]) + ": " + std::string(what) +
                        " lies outside the domain box");
    }
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

DomainBox bounding_box(std::span<const Point> xs) {
  if (xs.empty()) throw UsageError("bounding box of no points");
  const std::size_t dim = xs.front().size();
  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  for (const Point& p : xs) {
    for (std::size_t d = 0; d < dim; ++d) {
      lo[d] = std::min(lo[d], p[d]);
      hi[d] = std::max(hi[d], p[d]);
    }
  }
  return DomainBox(std::move(lo), std::move(hi));
}

void write_dataset_csv(std::ostream& out, const Dataset& d) {
  const std::size_t dim = d.arity();
  for (std::size_t a = 0; a < dim; ++a) out << 'x' << a + 1 << ',';
  out << "y\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (const double v : d.xs[i]) out << format_double(v) << ',';
    out << format_double(d.ys[i]) << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in, const std::optional<DomainBox>& box) {
  const Table t = read_table(in);
  const std::size_t dim = leading_columns(t.header, "x");
  if (dim == 0) throw FormatError("line 1: expected columns x1[,x2],y");
  expect_column(t, dim, "y");
  if (t.header.size() != dim + 1) throw FormatError("line 1: unexpected columns after 'y'");
  if (t.rows.empty()) throw UsageError("dataset has a header but no rows");
  std::vector<Point> xs;
  std::vector<double> ys;
  for (const auto& row : t.rows) {
    xs.emplace_back(row.begin(), row.begin() + static_cast<long>(dim));
    ys.push_back(row[dim]);
  }
  if (xs.size() < 2) throw UsageError("dataset needs at least 2 rows");
  DomainBox b = box ? *box : bounding_box(xs);
  if (b.arity() != dim) throw UsageError("domain box arity does not match dataset columns");
  check_in_box(xs, t, b, "input");
  return Dataset{std::move(xs), std::move(ys), std::move(b)};
}

void write_mined_csv(std::ostream& out, const MinedSet& m) {
  const std::size_t dim = m.arity();
  for (std::size_t a = 0; a < dim; ++a) out << 'x' << a + 1 << ',';
  for (std::size_t a = 0; a < dim; ++a) out << "ox" << a + 1 << ',';
  out << "y,target_y,achieved_y,fallback\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (const double v : m.inputs[i]) out << format_double(v) << ',';
    for (const double v : m.opposites[i]) out << format_double(v) << ',';
    out << format_double(m.outputs[i]) << ',' << format_double(m.targets[i]) << ','
        << format_double(m.achieved[i]) << ',' << (m.fallback[i] ? 1 : 0) << '\n';
  }
}

MinedSet read_mined_csv(std::istream& in, const std::optional<DomainBox>& box,
                        OppositionScheme scheme) {
  const Table t = read_table(in);
  const std::size_t dim = leading_columns(t.header, "x");
  if (dim == 0) throw FormatError("line 1: expected columns x1[,x2],ox1[,ox2],...");
  for (std::size_t a = 0; a < dim; ++a) expect_column(t, dim + a, "ox" + std::to_string(a + 1));
  expect_column(t, 2 * dim, "y");
  expect_column(t, 2 * dim + 1, "target_y");
  expect_column(t, 2 * dim + 2, "achieved_y");
  const bool has_fallback = t.header.size() == 2 * dim + 4;
  if (has_fallback) expect_column(t, 2 * dim + 3, "fallback");
  if (!has_fallback && t.header.size() != 2 * dim + 3) {
    throw FormatError("line 1: unexpected columns after 'achieved_y'");
  }
  if (t.rows.empty()) throw UsageError("mined set has a header but no rows");

  std::vector<Point> inputs, opposites;
  std::vector<double> outputs, targets, achieved;
  std::vector<bool> fallback;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const auto first = row.begin();
    inputs.emplace_back(first, first + static_cast<long>(dim));
    opposites.emplace_back(first + static_cast<long>(dim), first + static_cast<long>(2 * dim));
    outputs.push_back(row[2 * dim]);
    targets.push_back(row[2 * dim + 1]);
    achieved.push_back(row[2 * dim + 2]);
    bool flag = false;
    if (has_fallback) {
      const double f = row[2 * dim + 3];
      if (f != 0.0 && f != 1.0) {
        throw FormatError("line " + std::to_string(t.line_numbers[r]) +
                          ": column 'fallback' must be 0 or 1");
      }
      flag = f == 1.0;
    }
    fallback.push_back(flag);
  }
  if (inputs.size() < 2) throw UsageError("mined set needs at least 2 rows");
  DomainBox b = box ? *box : bounding_box(inputs);
  if (b.arity() != dim) throw UsageError("domain box arity does not match mined set columns");
  check_in_box(inputs, t, b, "input");
  check_in_box(opposites, t, b, "opposite");
  const OutputStats stats = output_stats(outputs);
  return MinedSet{std::move(inputs), std::move(opposites), std::move(outputs),
                  std::move(targets), std::move(achieved),  std::move(fallback),
                  scheme,             stats,                std::move(b)};
}

}  // namespace obl
