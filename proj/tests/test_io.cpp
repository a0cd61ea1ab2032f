#include <doctest.h>

#include <cstring>
#include <filesystem>

#include "spinpair/config.hpp"
#include "spinpair/dataio.hpp"
#include "spinpair/errors.hpp"
#include "spinpair/synth.hpp"
#include "support.hpp"

using namespace spinpair;
using namespace testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("spinpair_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_bits(a[i], b[i])) return false;
  return true;
}

std::string expect_config_error(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("format_double round trips every bit") {
  std::mt19937_64 rng(9);
  std::vector<double> values = {0.0,     -0.0,   0.1,    1.0 / 3.0, 2.0 / 3.0, 1e-300, 5e-324,
                                1.7e308, -2.5e-7, 357.3, 12345678901234567.0};
  std::uniform_int_distribution<std::uint64_t> bits;
  while (values.size() < 2000) {
    const std::uint64_t b = bits(rng);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (std::isfinite(v)) values.push_back(v);
  }
  for (double v : values) {
    const Table t = parse_csv("tau_ns,q_au\n0," + format_double(v) + "\n", transient_columns());
    CHECK(same_bits(t.values[1][0], v));
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("csv: transient round trip is bit-exact") {
  TempDir dir;
  TransientRecord t = synthesize_transient({{mhz_to_rad_per_us(10.0), 1.0, 500.0, 0.3}}, default_tau_grid(), 0.05, 3);
  t.meta.b1_label = "B1";
  t.meta.b1_mT = 0.8;
  Sidecar side{"transient", 3, generator_version(), "0123456789abcdef", to_json(t.meta)};
  for (DataFormat f : {DataFormat::Csv, DataFormat::Json}) {
    const fs::path p = dir.path / ("t" + extension(f));
    write_transient(p, t, f, side);
    const TransientRecord back = read_transient(p);
    CHECK(same_bits(back.tau_ns, t.tau_ns));
    CHECK(same_bits(back.q, t.q));
    CHECK(back.meta.seed == 3);
    CHECK(back.meta.b1_label == "B1");
    REQUIRE(back.meta.b1_mT.has_value());
    CHECK(*back.meta.b1_mT == 0.8);
    REQUIRE(back.meta.components.size() == 1);
    CHECK(same_bits(back.meta.components[0].phase, 0.3));
    const Sidecar s = sidecar_from_json(Json::parse(read_file(sidecar_path(p))));
    CHECK(s.config_hash == "0123456789abcdef");
    CHECK(s.kind == "transient");
  }
  const std::string csv = read_file(dir.path / "t.csv");
  CHECK(csv.rfind("tau_ns,q_au\n", 0) == 0);
}

TEST_CASE("csv: sweep and spectrum round trips") {
  TempDir dir;
  SweepRecord s = synthesize_sweep({{345.1, 0.1, 1.0}}, uniform_grid(344.0, 346.0, 0.01), 0.02, 4);
  s.meta.angle_deg = 60.0;
  const SpectrumRecord spec = fft_magnitude(synthesize_transient(
      {{mhz_to_rad_per_us(10.0), 1.0, 500.0, 0.0}}, default_tau_grid(), 0.0, 1));
  for (DataFormat f : {DataFormat::Csv, DataFormat::Json}) {
    const fs::path ps = dir.path / ("s" + extension(f));
    write_sweep(ps, s, f, Sidecar{"sweep", 4, generator_version(), "h", Json::object()});
    const SweepRecord sb = read_sweep(ps);
    CHECK(same_bits(sb.b0_mT, s.b0_mT));
    CHECK(same_bits(sb.q, s.q));
    const fs::path pf = dir.path / ("f" + extension(f));
    write_spectrum(pf, spec, f, Sidecar{"spectrum", 0, generator_version(), "h", Json::object()});
    const SpectrumRecord fb = read_spectrum(pf);
    CHECK(same_bits(fb.x, spec.x));
    CHECK(same_bits(fb.y, spec.y));
  }
  CHECK(read_file(dir.path / "f.csv").rfind("freq_MHz,mag_au\n", 0) == 0);
  CHECK(read_file(dir.path / "s.csv").rfind("b0_mT,q_au\n", 0) == 0);
}

TEST_CASE("csv: malformed input") {
  const std::vector<std::string> cols = transient_columns();
  CHECK_THROWS_AS(parse_csv("", cols), ParseError);
  CHECK_THROWS_AS(parse_csv("tau,q\n0,1\n", cols), ParseError);
  CHECK_THROWS_AS(parse_csv("tau_ns,q_au\n0,1\n2,abc\n", cols), ParseError);
  CHECK_THROWS_AS(parse_csv("tau_ns,q_au\n0,1\n2\n", cols), ParseError);
  CHECK_THROWS_AS(parse_csv("tau_ns,q_au\n0,1\n2,nan\n", cols), ParseError);
  const Table ok = parse_csv("tau_ns,q_au\n0,1\n2,0.5\n", cols);
  CHECK(ok.values[1][1] == 0.5);
  CHECK_THROWS_AS(read_transient("/nonexistent/dir/t.csv"), IoError);
}

TEST_CASE("config hash ignores key order and whitespace") {
  const Json a = Json::parse(R"({"seed": 1, "grid": {"tau_step_ns": 2, "tau_stop_ns": 800}})");
  const Json b = Json::parse(R"({"grid":{"tau_stop_ns":800,"tau_step_ns":2},"seed":1})");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  const Json c = Json::parse(R"({"seed": 2, "grid": {"tau_step_ns": 2, "tau_stop_ns": 800}})");
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("config: example files load") {
  for (const char* name : {"two_level.json", "weak_oracle.json", "sweep_axial.json", "single_tone.json"}) {
    CAPTURE(name);
    const RunConfig c = load_config(fs::path(SPINPAIR_TEST_DATA) / name);
    CHECK(c.hash().size() == 16);
  }
  const RunConfig c = load_config(fs::path(SPINPAIR_TEST_DATA) / "two_level.json");
  REQUIRE(c.transient.has_value());
  CHECK(c.seed == 7);
  CHECK(c.transient->levels.size() == 2);
  CHECK(c.grid.grid().size() == 401);
}

TEST_CASE("config: seed override updates the hashed document") {
  RunConfig c = load_config(fs::path(SPINPAIR_TEST_DATA) / "two_level.json");
  const std::string before = c.hash();
  c.set_seed(99);
  CHECK(c.seed == 99);
  CHECK(c.document["seed"] == 99);
  CHECK(c.hash() != before);
}

TEST_CASE("config: strict keys and types") {
  CHECK(expect_config_error(R"({"sed": 1})").find("sed") != std::string::npos);
  CHECK(expect_config_error(R"({"grid": {"tau_step": 2}})").find("grid.tau_step") != std::string::npos);
  CHECK(expect_config_error(R"({"grid": {"tau_step_ns": "2"}})").find("expected a number") != std::string::npos);
  CHECK(expect_config_error(R"({"grid": {"tau_step_ns": -2}})").find("positive") != std::string::npos);
  CHECK(expect_config_error(R"({"analysis": {"window": "kaiser"}})") != "");
  CHECK(expect_config_error(R"({"transient": {"levels": [{"label": "B1", "b1_mT": 1}], "components": [{"omega_MHz": 5, "kappa": 1}]}})")
            .find("exactly one") != std::string::npos);
  CHECK(expect_config_error(R"({"transient": {"levels": [{"label": "B1", "b1_mT": 1}], "components": [{"omega_MHz": 5}], "colour": 1}})")
            .find("transient.colour") != std::string::npos);
  CHECK(expect_config_error("[1, 2]") != "");
}

TEST_CASE("config: malformed JSON reports line and column") {
  try {
    parse_config_text("{\n  \"seed\": 1,\n  \"grid\": {\n}}}\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    const std::string what = e.what();
    CHECK(what.find("line 4") != std::string::npos);
    CHECK(what.find("column") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);
}
