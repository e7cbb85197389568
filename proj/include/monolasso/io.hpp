#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "monolasso/data.hpp"
#include "monolasso/experiments.hpp"

namespace monolasso {

/// Shortest text that reads back to the same double, capped at 17 significant digits.
std::string format_double(double value);
/// Locale-independent parse of the whole field; ParseError(line) on failure.
double parse_double(std::string_view field, long line);

struct CsvOptions {
    /// 0-based response column; negative counts from the end (-1 = last).
    long response_column = -1;
    /// Unset: detect a header from the first row (any non-numeric field).
    std::optional<bool> header;
};

Dataset read_dataset_csv(std::istream& in, const CsvOptions& options = {});
Dataset read_dataset_csv(const std::string& path, const CsvOptions& options = {});
void write_dataset_csv(std::ostream& out, const Dataset& data, const std::string& response_name = "y");

inline constexpr int kPathSchemaVersion = 1;

nlohmann::json path_to_json(const PiecewiseLinearPath& path, const nlohmann::json& metadata = nlohmann::json::object());
PiecewiseLinearPath path_from_json(const nlohmann::json& doc);

/// Long format: breakpoint,coordinate,value for every vertex and expanded coordinate.
void write_path_csv(std::ostream& out, const PiecewiseLinearPath& path);
PiecewiseLinearPath read_path_csv(std::istream& in, Parametrization parametrization = Parametrization::l1_norm);

/// Write as JSON or CSV depending on the file extension.
void save_path(const std::string& file, const PiecewiseLinearPath& path,
               const nlohmann::json& metadata = nlohmann::json::object());
PiecewiseLinearPath load_path(const std::string& file);

void write_curves_csv(std::ostream& out, const std::vector<Curve>& curves);

Parametrization parse_parametrization(const std::string& name);
EventKind parse_event_kind(const std::string& name);
Termination parse_termination(const std::string& name);

}  // namespace monolasso
