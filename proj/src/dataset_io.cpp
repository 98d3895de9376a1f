#include "wshift/dataset_io.hpp"

#include <charconv>
#include <fstream>

namespace wshift {

namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          cell += '"';
          ++k;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  if (quoted) throw IoError("line " + std::to_string(line_no) + ": unterminated quote");
  cells.push_back(std::move(cell));
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
  const std::string t = trim(cell);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw IoError("row " + std::to_string(row) + ", column '" + column +
                  "': cell '" + cell + "' is not numeric");
  return value;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == name) return c;
  throw IoError("column '" + name + "' not found in CSV header");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && line_no > 1) continue;
    auto cells = split_csv_line(line, line_no);
    for (auto& c : cells) c = trim(c);
    if (line_no == 1) {
      table.header = std::move(cells);
      if (table.header.empty() || (table.header.size() == 1 && table.header[0].empty()))
        throw IoError("CSV header row is empty");
      continue;
    }
    if (cells.size() != table.header.size())
      throw IoError("line " + std::to_string(line_no) + ": expected " +
                    std::to_string(table.header.size()) + " cells, got " +
                    std::to_string(cells.size()));
    table.rows.push_back(std::move(cells));
  }
  if (table.header.empty()) throw IoError("CSV '" + path + "' has no header row");
  return table;
}

std::vector<std::string> covariate_columns(const CsvTable& table,
                                           const std::string& response_column) {
  const std::size_t resp = table.column(response_column);
  std::vector<std::string> cols;
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (c != resp) cols.push_back(table.header[c]);
  return cols;
}

MissingDataset table_to_missing(const CsvTable& table, const std::string& response_column) {
  const std::size_t resp = table.column(response_column);
  MissingDataset md;
  md.d = table.header.size() - 1;
  md.rows.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    MissingRow row;
    row.x.reserve(md.d);
    const std::size_t data_row = r + 2;  // 1-based, after the header
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      const std::string& cell = table.rows[r][c];
      if (c == resp) {
        if (!trim(cell).empty()) row.y = parse_number(cell, data_row, table.header[c]);
      } else {
        row.x.push_back(parse_number(cell, data_row, table.header[c]));
      }
    }
    md.rows.push_back(std::move(row));
  }
  return md;
}

SourceDataset table_to_source(const CsvTable& table, const std::string& response_column) {
  const MissingDataset md = table_to_missing(table, response_column);
  SourceDataset src;
  src.d = md.d;
  src.samples.reserve(md.rows.size());
  for (std::size_t r = 0; r < md.rows.size(); ++r) {
    const MissingRow& row = md.rows[r];
    if (!row.observed())
      throw IoError("row " + std::to_string(r + 2) +
                    ": empty response cell in a fully-labeled (source) CSV");
    src.samples.push_back({row.x, *row.y});
  }
  return src;
}

TargetDataset table_to_target(const CsvTable& table,
                              const std::vector<std::string>& covariate_columns) {
  std::vector<std::size_t> cols;
  cols.reserve(covariate_columns.size());
  for (const auto& name : covariate_columns) cols.push_back(table.column(name));
  TargetDataset tgt;
  tgt.d = cols.size();
  tgt.points.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::vector<double> x;
    x.reserve(cols.size());
    for (std::size_t c : cols)
      x.push_back(parse_number(table.rows[r][c], r + 2, table.header[c]));
    tgt.points.push_back(std::move(x));
  }
  return tgt;
}

}  // namespace wshift
