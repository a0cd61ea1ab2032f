#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinpair/records.hpp"

namespace spinpair {

using Json = nlohmann::json;

enum class DataFormat { Csv, Json };

DataFormat parse_format(const std::string& name);
std::string extension(DataFormat format);

// Two-column numeric table with named columns.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;  // one vector per column
};

// 17 significant digits, round-trip exact.
std::string format_double(double v);

std::string to_csv(const Table& table);
Table parse_csv(const std::string& text, const std::vector<std::string>& expected_columns);
Json to_json(const Table& table);
Table parse_json_table(const Json& doc, const std::vector<std::string>& expected_columns);

// Writes through a temporary file in the same directory and renames it.
void atomic_write(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// FNV-1a 64 of the compact dump (object keys sorted), as 16 hex digits.
std::string config_hash(const Json& config);

Json to_json(const TransientMeta& meta);
TransientMeta transient_meta_from_json(const Json& j);

struct Sidecar {
  std::string kind;  // transient | sweep | spectrum
  std::uint64_t seed = 0;
  std::string generator_version;
  std::string config_hash;
  Json meta = Json::object();
};

Json to_json(const Sidecar& s);
Sidecar sidecar_from_json(const Json& j);
std::filesystem::path sidecar_path(const std::filesystem::path& data_path);

const std::vector<std::string>& transient_columns();
const std::vector<std::string>& sweep_columns();
const std::vector<std::string>& spectrum_columns();

// Data file plus sidecar.
void write_transient(const std::filesystem::path& path, const TransientRecord& rec, DataFormat format,
                     const Sidecar& sidecar);
void write_sweep(const std::filesystem::path& path, const SweepRecord& rec, DataFormat format,
                 const Sidecar& sidecar);
void write_spectrum(const std::filesystem::path& path, const SpectrumRecord& rec, DataFormat format,
                    const Sidecar& sidecar);

// Format from the extension; metadata from the sidecar when present.
TransientRecord read_transient(const std::filesystem::path& path);
SweepRecord read_sweep(const std::filesystem::path& path);
SpectrumRecord read_spectrum(const std::filesystem::path& path);

const char* generator_version();

}  // namespace spinpair
