#include "spinpair/dataio.hpp"

#include <unistd.h>

#include <charconv>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spinpair/constants.hpp"
#include "spinpair/errors.hpp"

#ifndef SPINPAIR_VERSION
#define SPINPAIR_VERSION "0.0.0"
#endif

namespace spinpair {

namespace fs = std::filesystem;

const char* generator_version() { return "spinpair " SPINPAIR_VERSION; }

DataFormat parse_format(const std::string& name) {
  if (name == "csv") return DataFormat::Csv;
  if (name == "json") return DataFormat::Json;
  throw ConfigError("unknown format '" + name + "' (expected csv or json)");
}

std::string extension(DataFormat format) { return format == DataFormat::Csv ? ".csv" : ".json"; }

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  const std::size_t rows = table.values.empty() ? 0 : table.values.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < table.values.size(); ++c) {
      if (c) out += ',';
      out += format_double(table.values[c][r]);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& field, std::size_t line) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec == std::errc::result_out_of_range) {
    // Subnormals come back as out of range; strtod still rounds them correctly.
    const std::string copy(first, last);
    char* end = nullptr;
    v = std::strtod(copy.c_str(), &end);
    ec = end == copy.c_str() + copy.size() ? std::errc() : std::errc::invalid_argument;
    ptr = last;
  }
  if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
    throw ParseError("line " + std::to_string(line) + ": not a finite number: '" + field + "'");
  return v;
}

}  // namespace

Table parse_csv(const std::string& text, const std::vector<std::string>& expected_columns) {
  Table table;
  table.columns = expected_columns;
  table.values.assign(expected_columns.size(), {});
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (!header) {
      if (fields != expected_columns) {
        std::string want;
        for (const auto& c : expected_columns) want += (want.empty() ? "" : ",") + c;
        throw ParseError("line " + std::to_string(line_no) + ": expected header '" + want + "'");
      }
      header = true;
      continue;
    }
    if (fields.size() != expected_columns.size())
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(expected_columns.size()) + " fields, found " +
                       std::to_string(fields.size()));
    for (std::size_t c = 0; c < fields.size(); ++c)
      table.values[c].push_back(parse_number(fields[c], line_no));
  }
  if (!header) throw ParseError("empty file: missing header row");
  return table;
}

Json to_json(const Table& table) {
  Json j;
  j["columns"] = table.columns;
  for (std::size_t c = 0; c < table.columns.size(); ++c) j["data"][table.columns[c]] = table.values[c];
  return j;
}

Table parse_json_table(const Json& doc, const std::vector<std::string>& expected_columns) {
  try {
    if (doc.at("columns").get<std::vector<std::string>>() != expected_columns)
      throw ParseError("JSON table: unexpected column set");
    Table table;
    table.columns = expected_columns;
    for (const auto& c : expected_columns)
      table.values.push_back(doc.at("data").at(c).get<std::vector<double>>());
    for (const auto& v : table.values)
      if (v.size() != table.values.front().size())
        throw ParseError("JSON table: columns differ in length");
    return table;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("JSON table: ") + e.what());
  }
}

void atomic_write(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename onto " + path.string());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

std::string config_hash(const Json& config) {
  const std::string dump = config.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json to_json(const TransientMeta& meta) {
  Json j;
  j["b1_label"] = meta.b1_label;
  j["b1_mT"] = meta.b1_mT ? Json(*meta.b1_mT) : Json(nullptr);
  j["seed"] = meta.seed;
  j["n_shots"] = meta.n_shots;
  j["noise_sigma_au"] = meta.noise_sigma;
  j["components"] = Json::array();
  for (const auto& c : meta.components) {
    Json cj;
    cj["omega_MHz"] = rad_per_us_to_mhz(c.omega);
    cj["amplitude_au"] = c.amplitude;
    cj["decay_ns"] = std::isinf(c.decay_time_ns) ? Json(nullptr) : Json(c.decay_time_ns);
    cj["phase_rad"] = c.phase;
    j["components"].push_back(cj);
  }
  return j;
}

TransientMeta transient_meta_from_json(const Json& j) {
  TransientMeta meta;
  meta.b1_label = j.value("b1_label", "");
  if (j.contains("b1_mT") && !j["b1_mT"].is_null()) meta.b1_mT = j["b1_mT"].get<double>();
  meta.seed = j.value("seed", std::uint64_t{0});
  meta.n_shots = j.value("n_shots", 1);
  meta.noise_sigma = j.value("noise_sigma_au", 0.0);
  if (j.contains("components"))
    for (const auto& cj : j["components"]) {
      OscComponent c;
      c.omega = mhz_to_rad_per_us(cj.at("omega_MHz").get<double>());
      c.amplitude = cj.at("amplitude_au").get<double>();
      c.decay_time_ns = cj.at("decay_ns").is_null() ? INFINITY : cj.at("decay_ns").get<double>();
      c.phase = cj.value("phase_rad", 0.0);
      meta.components.push_back(c);
    }
  return meta;
}

Json to_json(const Sidecar& s) {
  Json j;
  j["kind"] = s.kind;
  j["seed"] = s.seed;
  j["generator_version"] = s.generator_version;
  j["config_hash"] = s.config_hash;
  j["meta"] = s.meta;
  return j;
}

Sidecar sidecar_from_json(const Json& j) {
  try {
    Sidecar s;
    s.kind = j.at("kind").get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.generator_version = j.at("generator_version").get<std::string>();
    s.config_hash = j.at("config_hash").get<std::string>();
    s.meta = j.value("meta", Json::object());
    return s;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("sidecar: ") + e.what());
  }
}

fs::path sidecar_path(const fs::path& data_path) {
  fs::path p = data_path;
  p.replace_extension(".meta.json");
  return p;
}

const std::vector<std::string>& transient_columns() {
  static const std::vector<std::string> c{"tau_ns", "q_au"};
  return c;
}
const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> c{"b0_mT", "q_au"};
  return c;
}
const std::vector<std::string>& spectrum_columns() {
  static const std::vector<std::string> c{"freq_MHz", "mag_au"};
  return c;
}

namespace {

void write_table(const fs::path& path, const Table& table, DataFormat format, const Sidecar& sidecar) {
  atomic_write(path, format == DataFormat::Csv ? to_csv(table) : to_json(table).dump(1) + "\n");
  atomic_write(sidecar_path(path), to_json(sidecar).dump(1) + "\n");
}

Table read_table(const fs::path& path, const std::vector<std::string>& columns) {
  const std::string text = read_file(path);
  if (path.extension() == ".json") {
    Json doc;
    try {
      doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
    return parse_json_table(doc, columns);
  }
  try {
    return parse_csv(text, columns);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::optional<Sidecar> read_sidecar(const fs::path& data_path) {
  const fs::path p = sidecar_path(data_path);
  if (!fs::exists(p)) return std::nullopt;
  try {
    return sidecar_from_json(Json::parse(read_file(p)));
  } catch (const Json::parse_error& e) {
    throw ParseError(p.string() + ": " + e.what());
  }
}

Json source_to_json(const SpectrumSource& s) {
  return Json{{"n_samples", s.n_samples},
              {"tau_start_ns", s.tau_start_ns},
              {"dt_ns", s.dt_ns},
              {"pad_factor", s.pad_factor},
              {"window", s.window == Window::Hann ? "hann" : "rectangular"}};
}

SpectrumSource source_from_json(const Json& j) {
  SpectrumSource s;
  s.n_samples = j.at("n_samples").get<std::size_t>();
  s.tau_start_ns = j.at("tau_start_ns").get<double>();
  s.dt_ns = j.at("dt_ns").get<double>();
  s.pad_factor = j.at("pad_factor").get<int>();
  s.window = j.at("window").get<std::string>() == "hann" ? Window::Hann : Window::Rectangular;
  return s;
}

}  // namespace

void write_transient(const fs::path& path, const TransientRecord& rec, DataFormat format,
                     const Sidecar& sidecar) {
  rec.validate();
  Sidecar s = sidecar;
  s.kind = "transient";
  s.meta = to_json(rec.meta);
  write_table(path, {transient_columns(), {rec.tau_ns, rec.q}}, format, s);
}

void write_sweep(const fs::path& path, const SweepRecord& rec, DataFormat format,
                 const Sidecar& sidecar) {
  rec.validate();
  Sidecar s = sidecar;
  s.kind = "sweep";
  s.meta = {{"angle_deg", rec.meta.angle_deg},
            {"carrier_MHz", rad_per_us_to_mhz(rec.meta.omega_carrier)},
            {"seed", rec.meta.seed},
            {"noise_sigma_au", rec.meta.noise_sigma}};
  write_table(path, {sweep_columns(), {rec.b0_mT, rec.q}}, format, s);
}

void write_spectrum(const fs::path& path, const SpectrumRecord& rec, DataFormat format,
                    const Sidecar& sidecar) {
  rec.validate();
  Sidecar s = sidecar;
  s.kind = "spectrum";
  s.meta = {{"label", rec.label},
            {"b1_mT", rec.b1_mT ? Json(*rec.b1_mT) : Json(nullptr)},
            {"source", rec.source ? source_to_json(*rec.source) : Json(nullptr)}};
  write_table(path, {spectrum_columns(), {rec.x, rec.y}}, format, s);
}

TransientRecord read_transient(const fs::path& path) {
  const Table t = read_table(path, transient_columns());
  TransientRecord rec;
  rec.tau_ns = t.values[0];
  rec.q = t.values[1];
  if (const auto side = read_sidecar(path)) {
    try {
      rec.meta = transient_meta_from_json(side->meta);
    } catch (const Json::exception& e) {
      throw ParseError(sidecar_path(path).string() + ": " + e.what());
    }
  }
  if (rec.meta.b1_label.empty()) rec.meta.b1_label = path.stem().string();
  rec.validate();
  return rec;
}

SweepRecord read_sweep(const fs::path& path) {
  const Table t = read_table(path, sweep_columns());
  SweepRecord rec;
  rec.b0_mT = t.values[0];
  rec.q = t.values[1];
  if (const auto side = read_sidecar(path)) {
    try {
      rec.meta.angle_deg = side->meta.value("angle_deg", 90.0);
      rec.meta.omega_carrier = mhz_to_rad_per_us(side->meta.value("carrier_MHz", 0.0));
      rec.meta.seed = side->meta.value("seed", std::uint64_t{0});
      rec.meta.noise_sigma = side->meta.value("noise_sigma_au", 0.0);
    } catch (const Json::exception& e) {
      throw ParseError(sidecar_path(path).string() + ": " + e.what());
    }
  }
  rec.validate();
  return rec;
}

SpectrumRecord read_spectrum(const fs::path& path) {
  const Table t = read_table(path, spectrum_columns());
  SpectrumRecord rec;
  rec.x = t.values[0];
  rec.y = t.values[1];
  rec.label = path.stem().string();
  if (const auto side = read_sidecar(path)) {
    try {
      rec.label = side->meta.value("label", rec.label);
      if (side->meta.contains("b1_mT") && !side->meta["b1_mT"].is_null())
        rec.b1_mT = side->meta["b1_mT"].get<double>();
      if (side->meta.contains("source") && !side->meta["source"].is_null())
        rec.source = source_from_json(side->meta["source"]);
    } catch (const Json::exception& e) {
      throw ParseError(sidecar_path(path).string() + ": " + e.what());
    }
  }
  rec.validate();
  return rec;
}

}  // namespace spinpair
