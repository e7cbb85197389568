#include "monolasso/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "monolasso/errors.hpp"

namespace monolasso {

using nlohmann::json;

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view field, long line) {
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw ParseError(line, "line " + std::to_string(line) + ": cannot parse '" + std::string(field) +
                                   "' as a number");
    }
    if (!std::isfinite(value))
        throw ParseError(line, "line " + std::to_string(line) + ": non-finite value '" + std::string(field) + "'");
    return value;
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') {
            quoted = !quoted;
        } else if (ch == ',' && !quoted) {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(ch);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

bool numeric(const std::string& field) {
    try {
        parse_double(field, 0);
        return true;
    } catch (const ParseError&) {
        return false;
    }
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace

Dataset read_dataset_csv(std::istream& in, const CsvOptions& options) {
    std::vector<std::vector<double>> rows;
    std::vector<std::string> names;
    std::string line;
    long line_no = 0;
    std::size_t width = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (blank(line)) continue;
        const auto fields = split(line);
        if (first) {
            first = false;
            width = fields.size();
            if (width < 2) throw ParseError(line_no, "line " + std::to_string(line_no) + ": need at least two columns");
            const bool header = options.header.value_or(
                std::any_of(fields.begin(), fields.end(), [](const std::string& f) { return !numeric(f); }));
            if (header) {
                names = fields;
                continue;
            }
        }
        if (fields.size() != width) {
            throw ParseError(line_no, "line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                                          " fields, found " + std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(width);
        for (const auto& f : fields) row.push_back(parse_double(f, line_no));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("CSV input has no data rows");

    const long w = static_cast<long>(width);
    const long response = options.response_column < 0 ? w + options.response_column : options.response_column;
    if (response < 0 || response >= w)
        throw RangeError("response column " + std::to_string(options.response_column) + " is outside the " +
                         std::to_string(w) + " CSV columns");

    Dataset data;
    data.x.resize(static_cast<Index>(rows.size()), w - 1);
    data.y.resize(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        Index c = 0;
        for (long j = 0; j < w; ++j) {
            if (j == response) data.y[static_cast<Index>(i)] = rows[i][static_cast<std::size_t>(j)];
            else data.x(static_cast<Index>(i), c++) = rows[i][static_cast<std::size_t>(j)];
        }
    }
    for (long j = 0; j < w; ++j) {
        if (j == response) continue;
        data.feature_names.push_back(names.empty() ? "x" + std::to_string(data.feature_names.size())
                                                   : names[static_cast<std::size_t>(j)]);
    }
    data.validate();
    return data;
}

Dataset read_dataset_csv(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return read_dataset_csv(in, options);
}

void write_dataset_csv(std::ostream& out, const Dataset& data, const std::string& response_name) {
    data.validate();
    for (Index j = 0; j < data.p(); ++j)
        out << (data.feature_names.empty() ? "x" + std::to_string(j) : data.feature_names[static_cast<std::size_t>(j)])
            << ',';
    out << response_name << '\n';
    for (Index i = 0; i < data.n(); ++i) {
        for (Index j = 0; j < data.p(); ++j) out << format_double(data.x(i, j)) << ',';
        out << format_double(data.y[i]) << '\n';
    }
}

template <typename E>
static E parse_enum(const std::string& name, std::initializer_list<E> values, const char* what) {
    for (E v : values)
        if (name == to_string(v)) return v;
    throw DataError(std::string("unknown ") + what + " '" + name + "'");
}

Parametrization parse_parametrization(const std::string& name) {
    return parse_enum(name, {Parametrization::l1_norm, Parametrization::l1_arc_length}, "parametrization");
}

EventKind parse_event_kind(const std::string& name) {
    return parse_enum(name,
                      {EventKind::join, EventKind::zero_crossing, EventKind::least_squares, EventKind::stop_bound,
                       EventKind::step},
                      "event kind");
}

Termination parse_termination(const std::string& name) {
    return parse_enum(name,
                      {Termination::complete, Termination::zero_residual, Termination::stop_bound,
                       Termination::step_budget, Termination::epsilon_resolution},
                      "termination");
}

json path_to_json(const PiecewiseLinearPath& path, const json& metadata) {
    json doc;
    doc["schema_version"] = kPathSchemaVersion;
    doc["parametrization"] = to_string(path.parametrization());
    doc["dimension"] = path.dimension();
    doc["termination"] = to_string(path.termination);
    doc["truncated"] = path.truncated;
    doc["breakpoints"] = path.breakpoints();
    json vertices = json::array();
    for (const Vector& v : path.vertices()) vertices.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    doc["vertices"] = std::move(vertices);
    doc["active_sets"] = path.segment_active_sets();
    json events = json::array();
    for (const PathEvent& e : path.events())
        events.push_back({{"kind", to_string(e.kind)}, {"index", e.index}, {"gamma", e.gamma}});
    doc["events"] = std::move(events);
    doc["lambdas"] = path.lambdas();
    doc["metadata"] = metadata;
    return doc;
}

PiecewiseLinearPath path_from_json(const json& doc) {
    try {
        const int version = doc.at("schema_version").get<int>();
        if (version > kPathSchemaVersion)
            throw DataError("path schema version " + std::to_string(version) + " is newer than supported (" +
                            std::to_string(kPathSchemaVersion) + ")");
        std::vector<Vector> vertices;
        for (const auto& row : doc.at("vertices")) {
            const auto values = row.get<std::vector<double>>();
            vertices.emplace_back(Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size())));
        }
        std::vector<PathEvent> events;
        for (const auto& e : doc.at("events"))
            events.push_back({parse_event_kind(e.at("kind").get<std::string>()), e.at("index").get<Index>(),
                              e.at("gamma").get<double>()});
        PiecewiseLinearPath path = PiecewiseLinearPath::from_parts(
            parse_parametrization(doc.at("parametrization").get<std::string>()),
            doc.at("breakpoints").get<std::vector<double>>(), std::move(vertices),
            doc.at("active_sets").get<std::vector<std::vector<Index>>>(), std::move(events),
            doc.at("lambdas").get<std::vector<double>>());
        path.termination = parse_termination(doc.at("termination").get<std::string>());
        path.truncated = doc.at("truncated").get<bool>();
        return path;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed path JSON: ") + e.what());
    }
}

void write_path_csv(std::ostream& out, const PiecewiseLinearPath& path) {
    out << "breakpoint,coordinate,value\n";
    for (std::size_t k = 0; k < path.breakpoints().size(); ++k) {
        const std::string ell = format_double(path.breakpoints()[k]);
        const Vector& v = path.vertices()[k];
        for (Index j = 0; j < v.size(); ++j) out << ell << ',' << j << ',' << format_double(v[j]) << '\n';
    }
}

PiecewiseLinearPath read_path_csv(std::istream& in, Parametrization parametrization) {
    std::string line;
    long line_no = 0;
    std::vector<double> breakpoints;
    std::vector<std::map<Index, double>> entries;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (blank(line)) continue;
        const auto fields = split(line);
        if (line_no == 1 && !fields.empty() && !numeric(fields[0])) continue;
        if (fields.size() != 3)
            throw ParseError(line_no, "line " + std::to_string(line_no) + ": expected breakpoint,coordinate,value");
        const double ell = parse_double(fields[0], line_no);
        const double coordinate = parse_double(fields[1], line_no);
        const double value = parse_double(fields[2], line_no);
        if (coordinate < 0 || coordinate != std::floor(coordinate))
            throw ParseError(line_no, "line " + std::to_string(line_no) + ": coordinate must be a non-negative integer");
        if (breakpoints.empty() || ell != breakpoints.back()) {
            breakpoints.push_back(ell);
            entries.emplace_back();
        }
        entries.back()[static_cast<Index>(coordinate)] = value;
    }
    if (entries.empty()) throw DataError("path CSV has no rows");
    const Index dimension = static_cast<Index>(entries.front().size());
    std::vector<Vector> vertices;
    for (const auto& e : entries) {
        if (static_cast<Index>(e.size()) != dimension || e.rbegin()->first != dimension - 1)
            throw DataError("path CSV: every breakpoint needs coordinates 0.." + std::to_string(dimension - 1));
        Vector v(dimension);
        for (const auto& [j, value] : e) v[j] = value;
        vertices.push_back(std::move(v));
    }
    return PiecewiseLinearPath::from_parts(parametrization, std::move(breakpoints), std::move(vertices), {}, {}, {});
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void save_path(const std::string& file, const PiecewiseLinearPath& path, const json& metadata) {
    std::ofstream out(file);
    if (!out) throw ConfigError("cannot write '" + file + "'");
    if (ends_with(file, ".csv")) write_path_csv(out, path);
    else out << path_to_json(path, metadata).dump(1) << '\n';
}

PiecewiseLinearPath load_path(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open '" + file + "'");
    if (ends_with(file, ".csv")) return read_path_csv(in);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw DataError("'" + file + "' is not valid JSON: " + e.what());
    }
    return path_from_json(doc);
}

void write_curves_csv(std::ostream& out, const std::vector<Curve>& curves) {
    out << "index,value,method\n";
    for (const Curve& c : curves)
        for (std::size_t k = 0; k < c.index.size(); ++k)
            out << format_double(c.index[k]) << ',' << format_double(c.value[k]) << ',' << c.method << '\n';
}

}  // namespace monolasso
