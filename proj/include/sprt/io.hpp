#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "sprt/ensemble.hpp"
#include "sprt/info.hpp"
#include "sprt/table.hpp"
#include "sprt/verify.hpp"

namespace sprt {

enum class FileFormat { csv, json };

FileFormat format_from_name(const std::string& name);  // "csv" | "json"
FileFormat format_from_path(const std::string& path);  // by extension

// table.csv -> table.meta.json; the sidecar carries the scalar fields,
// provenance, and anything time-dependent so the data file stays
// byte-identical across reruns.
std::string sidecar_path(const std::string& data_path);

// Shortest-round-trip formatting at 17 significant digits, locale-free;
// lower precision truncates accordingly.
std::string format_double(double v, int precision);

// Writes the data file plus the metadata sidecar. Low-confidence or
// undefined conditional cells are written empty (CSV) / null (JSON),
// never as 0. extra_meta entries (seed, timings, timestamps) are merged
// into the sidecar.
void write_table(
    const EnsembleTable& t, const std::string& path, FileFormat format,
    int precision = 17,
    const nlohmann::ordered_json& extra_meta = nlohmann::ordered_json::object());

// Reads a table written by write_table (both formats). Monte Carlo masses
// are rebuilt from the stored counts, which are authoritative. Throws
// io_error on unreadable files or schema mismatches.
EnsembleTable read_table(const std::string& path);

void write_curve(const InfoCurve& c, const EnsembleTable& t,
                 const std::string& path, FileFormat format,
                 int precision = 17);

nlohmann::ordered_json checks_json(const std::vector<CheckResult>& checks);
nlohmann::ordered_json sweep_json(const std::vector<SweepSeries>& series);
nlohmann::ordered_json stats_json(const DecisionTimeStats& s);
void write_json_file(const nlohmann::ordered_json& j, const std::string& path);

void print_checks(std::ostream& os, const std::vector<CheckResult>& checks);
void print_sweep(std::ostream& os, const std::vector<SweepSeries>& series);

}  // namespace sprt
