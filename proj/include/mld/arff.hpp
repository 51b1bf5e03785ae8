#pragma once

#include <string>
#include <vector>

#include "mld/dataset.hpp"

namespace mld {

/// Extracts label names, in document order, from a MULAN XML label header:
/// a root element whose `label` descendants each carry a `name` attribute.
/// Throws ParseError (with line) on malformed XML and SchemaError on
/// duplicate names or fewer than two labels.
std::vector<std::string> parse_label_header(const std::string& xml_text);

/// Parses MULAN-style ARFF text. Attributes named in `label_names` become the
/// binary label matrix (column order follows `label_names`); the rest become
/// feature columns in declaration order. Dense and sparse (`{idx value, ...}`)
/// data rows, `%` comments and blank lines are supported. Missing values
/// (`?`) are rejected. Errors report the offending line.
MultilabelDataset parse_arff(const std::string& arff_text,
                             const std::vector<std::string>& label_names);

/// Serializes a dataset as ARFF: feature attributes in column order followed
/// by one `{0,1}` attribute per label, then dense data rows. Numeric values
/// are written with 17 significant digits so parse_arff(write_arff(ds))
/// reproduces ds exactly.
std::string write_arff(const MultilabelDataset& ds, const std::string& relation = "dataset");

/// Writes the MULAN XML label header matching `ds`.
std::string write_label_header(const MultilabelDataset& ds);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Loads an (ARFF, XML header) pair from disk.
MultilabelDataset load_mulan(const std::string& arff_path, const std::string& xml_path);

}  // namespace mld
