#pragma once

// File formats: CSV with '#' comment lines stating units and conventions,
// JSON configs carrying "schema_version": 1, and atomic file writes.

#include "mkdv/inflation.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mkdv::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Bad or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Output could not be created (CLI exit code 2).
class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Round-trip decimal ("%.17g"); identical input gives identical text.
std::string format_double(double v);

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failure leaves no partial file. Throws OutputError when
/// the path is empty or its directory does not exist.
void write_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body);

/// Reads and parses a JSON file; throws ConfigError on I/O or syntax errors
/// and when "schema_version" is present and differs from kSchemaVersion.
Json load_config(const std::filesystem::path& path);

/// Throws ConfigError unless the object's keys are all in `allowed`.
void require_keys_within(const Json& obj, const std::vector<std::string>& allowed, const std::string& where);

// ---------------------------------------------------------------- snapshots

/// Header shared by every field CSV.
void write_field_header(std::ostream& out, const std::string& description);
void write_field_rows(std::ostream& out, double t, std::span<const double> xs, std::span<const double> u);

// ---------------------------------------------------------------- inflation

inflation::ExperimentSchedule schedule_from_json(const Json& j);
Json schedule_to_json(const inflation::ExperimentSchedule& s);
Json result_to_json(const inflation::ExperimentResult& r);

/// One row per N with every ExperimentRow field.
void write_result_csv(std::ostream& out, const inflation::ExperimentResult& r);
/// Plot-ready series: N, lambda, initial_norm, final_norm, scaled_final (= final lambda^{1/p}), ratio.
void write_series_csv(std::ostream& out, const inflation::ExperimentResult& r);

}  // namespace mkdv::io
