#include "harness/output.hpp"

#include "core/errors.hpp"

#include <cmath>
#include <fmt/format.h>

namespace moran {

std::string csv_schema_line() { return fmt::format("# moran-infer v{}", MORANINFER_VERSION); }

OutputFormat parse_output_format(const std::string& name)
{
    if (name == "csv")
        return OutputFormat::Csv;
    if (name == "json")
        return OutputFormat::Json;
    throw ParseError(fmt::format("unknown output format '{}' (expected csv or json)", name));
}

void Table::add_row(std::vector<CellValue> row)
{
    if (row.size() != columns.size())
        throw DomainError(fmt::format("table row has {} cells for {} columns", row.size(), columns.size()));
    rows.push_back(std::move(row));
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return fmt::format("{}", v);
}

namespace {

std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

std::string csv_cell(const CellValue& v)
{
    if (const auto* i = std::get_if<std::int64_t>(&v))
        return fmt::format("{}", *i);
    if (const auto* d = std::get_if<double>(&v))
        return format_number(*d);
    return csv_escape(std::get<std::string>(v));
}

Json json_cell(const CellValue& v)
{
    if (const auto* i = std::get_if<std::int64_t>(&v))
        return *i;
    if (const auto* d = std::get_if<double>(&v)) {
        if (std::isfinite(*d))
            return *d;
        if (std::isnan(*d))
            return nullptr;
        return format_number(*d);
    }
    return std::get<std::string>(v);
}

} // namespace

std::string render_csv(const Report& report)
{
    std::string out = csv_schema_line() + '\n';
    out += fmt::format("# kind: {}\n", report.kind);
    out += fmt::format("# spec: {}\n", report.spec.dump());
    if (!report.summary.is_null())
        out += fmt::format("# summary: {}\n", report.summary.dump());
    for (std::size_t c = 0; c < report.table.columns.size(); ++c)
        out += (c ? "," : "") + csv_escape(report.table.columns[c]);
    out += '\n';
    for (const auto& row : report.table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out += (c ? "," : "") + csv_cell(row[c]);
        out += '\n';
    }
    return out;
}

std::string render_json(const Report& report)
{
    Json j;
    j["format"] = "moran-infer";
    j["version"] = MORANINFER_VERSION;
    j["kind"] = report.kind;
    j["spec"] = report.spec;
    if (!report.summary.is_null())
        j["summary"] = report.summary;
    j["columns"] = report.table.columns;
    Json rows = Json::array();
    for (const auto& row : report.table.rows) {
        Json r;
        for (std::size_t c = 0; c < row.size(); ++c)
            r[report.table.columns[c]] = json_cell(row[c]);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    if (report.extra.is_object())
        for (const auto& [key, value] : report.extra.items())
            j[key] = value;
    return j.dump(2) + '\n';
}

std::string render(const Report& report, OutputFormat format)
{
    return format == OutputFormat::Csv ? render_csv(report) : render_json(report);
}

} // namespace moran
