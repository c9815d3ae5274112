#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dwell/units.hpp"

namespace dwell::cli {

inline constexpr const char* version = "0.1.0";

struct RunConfig {
    std::string command;
    std::string target;  // command checked by `validate`
    std::map<std::string, std::string> params;
    std::string out_dir = ".";
    bool svg = false;
};

// One curve: named columns with units, stored row by row.
struct Curve {
    std::string name;  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    bool log_x = false, log_y = false;
};

struct Diagnostics {
    std::vector<std::string> errors, warnings;
    bool ok() const { return errors.empty(); }
};

struct RunOutput {
    std::vector<Curve> curves;
    nlohmann::json params, units, tolerances, results;
    std::vector<std::string> warnings;
};

// `dwelltime <command> [--key=value ...] [--config=FILE] [--out=DIR] [--svg]`.
// Keys accept '-' or '_'. Throws DomainError on malformed input.
RunConfig parse_arguments(const std::vector<std::string>& args);
// `key = value` lines, '#' comments; keys `command`, `out`, `svg` set the
// corresponding fields, the rest are parameters. Existing entries win.
void merge_config_file(const std::string& path, RunConfig& config);

const std::vector<std::string>& commands();

// Computes every curve of the command. Throws DomainError for bad
// parameters, NumericalError when a method fails.
RunOutput compute(const RunConfig& config);

// Parameter, packet, domain and potential checks for config.target (or
// config.command when no target is set).
Diagnostics validate(const RunConfig& config);

std::string format_csv(const Curve& c);
std::string render_svg(const std::vector<Curve>& curves, const std::string& title);

// Writes the CSV files, optional SVG and `<command>.manifest.json`; returns
// the manifest.
nlohmann::json run(const RunConfig& config);

// Exit status of the command-line tool: 0 success, 1 validation error,
// 2 numerical failure.
int main_entry(const std::vector<std::string>& args);

// Maximum of f on a uniform grid refined by a bracketing search around the
// best grid point. Returns (x, f(x)).
std::pair<double, double> grid_maximum(const std::function<double(double)>& f, double lo, double hi, int points);

}  // namespace dwell::cli
