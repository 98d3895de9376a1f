#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wshift/core.hpp"

namespace wshift {

/// Parsed CSV: header row plus raw string cells. Quoted fields and CRLF line
/// endings are handled; ragged rows are an error.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws IoError if absent
};

CsvTable read_csv(const std::string& path);

/// Ingestion contract: the named column is the response (empty cells mean
/// missing), every other column is a numeric covariate. Non-numeric covariate
/// cells raise IoError naming the row and column.
MissingDataset table_to_missing(const CsvTable& table, const std::string& response_column);

/// As above but every response must be present (covariate-shift source).
SourceDataset table_to_source(const CsvTable& table, const std::string& response_column);

/// Target CSV: the given covariate columns (source header order) must all be
/// present; other columns are ignored.
TargetDataset table_to_target(const CsvTable& table,
                              const std::vector<std::string>& covariate_columns);

/// Covariate column names of a source/missing table (header minus response).
std::vector<std::string> covariate_columns(const CsvTable& table,
                                           const std::string& response_column);

}  // namespace wshift
