#pragma once

#include "io/descriptor_json.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace moran {

/// Versioned schema line at the top of every CSV file.
std::string csv_schema_line();

enum class OutputFormat { Csv, Json };

OutputFormat parse_output_format(const std::string& name);

using CellValue = std::variant<std::int64_t, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<CellValue>> rows;

    void add_row(std::vector<CellValue> row);
};

/// Everything a result file holds. `spec` is the fully resolved request (seed included),
/// `summary` optional scalar results, `extra` JSON-only payload (e.g. raw estimate lists).
struct Report {
    std::string kind;
    Json spec;
    Json summary;
    Table table;
    Json extra;
};

/// CSV layout:
///   # moran-infer v<version>
///   # kind: <kind>
///   # spec: <compact JSON>
///   # summary: <compact JSON>      (when present)
///   <header>
///   <rows>
std::string render_csv(const Report& report);

/// {"format":"moran-infer","version":..,"kind":..,"spec":..,"summary":..,"columns":[..],"rows":[{..}],..extra}
std::string render_json(const Report& report);

std::string render(const Report& report, OutputFormat format);

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double v);

} // namespace moran
