/*
 * Copyright 2026 The SSI Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#ifndef SSI_IO_HPP
#define SSI_IO_HPP

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gp_model.hpp"
#include "integrators.hpp"

namespace ssi {

using json = nlohmann::json;

/// Shortest-safe decimal for doubles: 17 significant digits, so that reading
/// the text back yields the identical binary value.
inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

/// Tabular numeric data with a named header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::ptrdiff_t find(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<std::ptrdiff_t>(i);
        return -1;
    }

    std::vector<double> column(std::string_view name) const {
        const auto i = find(name);
        if (i < 0) throw ParseError("missing column '" + std::string(name) + "'", 1, 0);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[static_cast<std::size_t>(i)]);
        return out;
    }
};

inline void write_csv(std::ostream& os, const CsvTable& table) {
    for (std::size_t i = 0; i < table.header.size(); ++i) os << (i ? "," : "") << table.header[i];
    os << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw ContractViolation("write_csv: row width differs from header");
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
        os << '\n';
    }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Splits on commas, returning each field with its 1-based starting column.
inline std::vector<std::pair<std::string_view, std::size_t>> split_fields(std::string_view line) {
    std::vector<std::pair<std::string_view, std::size_t>> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        const auto end = comma == std::string_view::npos ? line.size() : comma;
        out.emplace_back(trim(line.substr(start, end - start)), start + 1);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline bool parse_number(std::string_view s, double& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

} // namespace detail

inline CsvTable read_csv(std::istream& is) {
    CsvTable table;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(is, line)) {
        ++lineno;
        const auto body = detail::trim(line);
        if (body.empty()) continue;
        const auto fields = detail::split_fields(body);
        if (!have_header) {
            for (const auto& [f, col] : fields) {
                double dummy;
                if (f.empty()) throw ParseError("empty column name in header", lineno, col);
                if (detail::parse_number(f, dummy)) throw ParseError("missing header row", lineno, col);
                table.header.emplace_back(f);
            }
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size())
            throw ParseError("expected " + std::to_string(table.header.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             lineno, fields.back().second);
        std::vector<double> row(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i)
            if (!detail::parse_number(fields[i].first, row[i]))
                throw ParseError("malformed number '" + std::string(fields[i].first) + "'", lineno, fields[i].second);
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw ParseError("missing header row", lineno == 0 ? 1 : lineno, 1);
    return table;
}

inline std::vector<std::string> coordinate_names(Index n, const std::string& q = "q", const std::string& p = "p") {
    std::vector<std::string> names;
    for (Index i = 1; i <= n; ++i) names.push_back(q + std::to_string(i));
    for (Index i = 1; i <= n; ++i) names.push_back(p + std::to_string(i));
    return names;
}

namespace detail {

// Number of degrees of freedom implied by consecutive q1.., p1.. columns.
inline Index count_dof(const CsvTable& t, const std::string& q) {
    Index n = 0;
    while (t.find(q + std::to_string(n + 1)) >= 0) ++n;
    if (n == 0) throw ParseError("no '" + q + "1' column in header", 1, 0);
    return n;
}

inline PhaseState row_state(const CsvTable& t, const std::vector<double>& row, Index n, const std::string& q,
                            const std::string& p, std::size_t lineno) {
    Vector z(2 * n);
    for (Index i = 0; i < n; ++i) {
        const auto qi = t.find(q + std::to_string(i + 1));
        const auto pi = t.find(p + std::to_string(i + 1));
        if (qi < 0 || pi < 0) throw ParseError("incomplete coordinate columns", 1, 0);
        z(i) = row[static_cast<std::size_t>(qi)];
        z(n + i) = row[static_cast<std::size_t>(pi)];
    }
    if (!z.allFinite()) throw ParseError("non-finite coordinate", lineno, 0);
    return PhaseState(std::move(z));
}

} // namespace detail

// -- flow datasets ---------------------------------------------------------

inline CsvTable dataset_table(const FlowDataset& data) {
    data.validate();
    CsvTable t;
    const Index n = data.dim();
    t.header = {"h"};
    for (auto& s : coordinate_names(n)) t.header.push_back(s);
    for (auto& s : coordinate_names(n, "qbar", "pbar")) t.header.push_back(s);
    for (std::size_t j = 0; j < data.size(); ++j) {
        std::vector<double> row{data.h};
        for (Index i = 0; i < 2 * n; ++i) row.push_back(data.inputs[j].coords()(i));
        for (Index i = 0; i < 2 * n; ++i) row.push_back(data.outputs[j].coords()(i));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline void write_dataset(std::ostream& os, const FlowDataset& data) { write_csv(os, dataset_table(data)); }

inline FlowDataset read_dataset(std::istream& is) {
    const CsvTable t = read_csv(is);
    if (t.rows.empty()) throw ParseError("dataset has no rows", 2, 1);
    const auto hcol = t.find("h");
    if (hcol < 0) throw ParseError("dataset is missing the 'h' column", 1, 1);
    const Index n = detail::count_dof(t, "q");
    FlowDataset data;
    data.h = t.rows.front()[static_cast<std::size_t>(hcol)];
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (t.rows[r][static_cast<std::size_t>(hcol)] != data.h)
            throw ParseError("step size h differs between rows", r + 2, 1);
        data.inputs.push_back(detail::row_state(t, t.rows[r], n, "q", "p", r + 2));
        data.outputs.push_back(detail::row_state(t, t.rows[r], n, "qbar", "pbar", r + 2));
    }
    if (!(data.h > 0.0)) throw ParseError("step size h must be positive", 2, 1);
    return data;
}

// -- trajectories and energy series ---------------------------------------

/// Extra per-state column, e.g. an energy evaluated along the trajectory.
struct NamedColumn {
    std::string name;
    std::vector<double> values;
};

inline void write_trajectory(std::ostream& os, const TrajectoryRecord& rec, const std::vector<NamedColumn>& extra = {}) {
    if (rec.states.empty()) throw ContractViolation("write_trajectory: empty trajectory");
    CsvTable t;
    const Index n = rec.dim();
    t.header = {"t"};
    for (auto& s : coordinate_names(n)) t.header.push_back(s);
    for (const auto& c : extra) {
        if (c.values.size() != rec.size()) throw ContractViolation("write_trajectory: column '" + c.name + "' has wrong length");
        t.header.push_back(c.name);
    }
    t.rows.reserve(rec.size());
    for (std::size_t k = 0; k < rec.size(); ++k) {
        std::vector<double> row{rec.time(k)};
        for (Index i = 0; i < 2 * n; ++i) row.push_back(rec.states[k].coords()(i));
        for (const auto& c : extra) row.push_back(c.values[k]);
        t.rows.push_back(std::move(row));
    }
    write_csv(os, t);
}

/// Reads states and times; h and t0 are recovered from the time column.
inline TrajectoryRecord read_trajectory(std::istream& is) {
    const CsvTable t = read_csv(is);
    if (t.rows.empty()) throw ParseError("trajectory has no rows", 2, 1);
    const auto times = t.column("t");
    const Index n = detail::count_dof(t, "q");
    TrajectoryRecord rec;
    rec.t0 = times.front();
    rec.h = times.size() > 1 ? times[1] - times[0] : 0.0;
    for (std::size_t r = 0; r < t.rows.size(); ++r) rec.states.push_back(detail::row_state(t, t.rows[r], n, "q", "p", r + 2));
    return rec;
}

/// Scalar observable against time.
struct EnergySeries {
    std::string name = "H";
    std::vector<double> t;
    std::vector<double> values;
};

inline void write_energy_series(std::ostream& os, const EnergySeries& s) {
    if (s.t.size() != s.values.size()) throw ContractViolation("write_energy_series: length mismatch");
    CsvTable table;
    table.header = {"t", s.name};
    table.rows.reserve(s.t.size());
    for (std::size_t k = 0; k < s.t.size(); ++k) table.rows.push_back({s.t[k], s.values[k]});
    write_csv(os, table);
}

/// Reads column `column` (default: the last one) against the 't' column.
inline EnergySeries read_energy_series(std::istream& is, const std::string& column = {}) {
    const CsvTable t = read_csv(is);
    EnergySeries s;
    s.name = column.empty() ? t.header.back() : column;
    if (s.name == "t") throw ParseError("energy column cannot be 't'", 1, 1);
    s.t = t.column("t");
    s.values = t.column(s.name);
    return s;
}

// -- model serialization -----------------------------------------------------

inline json vector_to_json(const Eigen::Ref<const Vector>& v) {
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline Vector vector_from_json(const json& a) {
    if (!a.is_array()) throw ParseError("expected a numeric array", 0, 0);
    Vector v(static_cast<Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number()) throw ParseError("expected a number in array", 0, 0);
        v(static_cast<Index>(i)) = a[i].get<double>();
    }
    return v;
}

inline json model_to_json(const GpHamiltonianModel& model) {
    json j;
    j["format"] = "ssi-gp-model";
    j["version"] = 1;
    j["kernel"] = {{"k_c", model.params().k_c}, {"e", model.params().e}};
    j["sigma"] = model.sigma();
    j["sigma_requested"] = model.diagnostics().sigma_requested;
    j["integrator"] = to_string(model.integrator());
    j["h"] = model.h();
    j["normalization"] = {{"point", vector_to_json(model.normalization().point.coords())},
                          {"value", model.normalization().value}};
    json nodes = json::array();
    for (Index i = 0; i < model.nodes().cols(); ++i) nodes.push_back(vector_to_json(model.nodes().col(i)));
    j["nodes"] = std::move(nodes);
    j["node_values"] = vector_to_json(model.node_values());
    const auto& d = model.diagnostics();
    j["residual"] = d.residual;
    j["system_rows"] = d.rows;
    j["system_cols"] = d.cols;
    j["rank"] = d.rank;
    j["warnings"] = d.warnings;
    return j;
}

/// Rebuilds the model; the factorization is recomputed from the stored nodes
/// and the effective sigma, so evaluation reproduces the original bit for bit.
inline GpHamiltonianModel model_from_json(const json& j) {
    try {
        if (j.value("format", std::string()) != "ssi-gp-model") throw ParseError("not an ssi-gp-model document", 1, 1);
        const KernelParams params{j.at("kernel").at("k_c").get<double>(), j.at("kernel").at("e").get<double>()};
        params.validate();
        const json& jn = j.at("nodes");
        if (!jn.is_array() || jn.empty()) throw ParseError("model has no nodes", 0, 0);
        const Vector first = vector_from_json(jn.front());
        Matrix Z(first.size(), static_cast<Index>(jn.size()));
        for (std::size_t i = 0; i < jn.size(); ++i) {
            const Vector v = vector_from_json(jn[i]);
            if (v.size() != first.size()) throw ParseError("nodes have mixed dimensions", 0, 0);
            Z.col(static_cast<Index>(i)) = v;
        }
        FitDiagnostics d;
        d.residual = j.value("residual", 0.0);
        d.rows = j.value("system_rows", Index{0});
        d.cols = j.value("system_cols", Index{0});
        d.rank = j.value("rank", Index{0});
        d.sigma_requested = j.value("sigma_requested", j.at("sigma").get<double>());
        d.warnings = j.value("warnings", std::vector<std::string>{});
        Normalization norm{PhaseState(vector_from_json(j.at("normalization").at("point"))),
                           j.at("normalization").at("value").get<double>()};
        return GpHamiltonianModel(factorize_regularized(Z, params, j.at("sigma").get<double>()),
                                  vector_from_json(j.at("node_values")),
                                  integrator_tag_from_string(j.at("integrator").get<std::string>()),
                                  j.at("h").get<double>(), std::move(norm), std::move(d));
    } catch (const json::exception& e) {
        throw ParseError(std::string("model JSON: ") + e.what(), 0, 0);
    }
}

// -- files -------------------------------------------------------------------

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open '" + path.string() + "' for reading");
    return is;
}

/// Writes through a temporary file so readers never observe a partial file.
template <typename Writer>
void write_file(const std::filesystem::path& path, const Writer& writer) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os) throw IoError("cannot open '" + tmp.string() + "' for writing");
        writer(os);
        if (!os) throw IoError("write to '" + tmp.string() + "' failed");
    }
    std::filesystem::rename(tmp, path);
}

inline json read_json_file(const std::filesystem::path& path) {
    auto is = open_input(path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what(), 0, e.byte);
    }
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    write_file(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

} // namespace ssi

#endif // SSI_IO_HPP
