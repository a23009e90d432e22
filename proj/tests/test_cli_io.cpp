#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "doctest.h"
#include "cnslab/config.hpp"
#include "cnslab/experiments.hpp"
#include "cnslab/fft.hpp"
#include "cnslab/io.hpp"
#include "cnslab/suite.hpp"

using namespace cnslab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cnslab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<unsigned char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ConfigError config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("config accepted: " << text);
  return ConfigError(0, "");
}

void push_u32(std::vector<unsigned char>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

}  // namespace

TEST_CASE("config defaults and echo") {
  const RunConfig def = parse_config("");
  CHECK(def.grid.n == 64);
  CHECK(def.pair.q == 2);
  CHECK(def.material.mu == 1.0);
  const std::string echo = def.echo();
  CHECK(echo.find("[material]") != std::string::npos);
  CHECK(parse_config(echo).echo() == echo);

  const RunConfig c = parse_config(
      "# run\nseed = 7\n[grid]\nn = 128  # larger\nL = 12.5\n[indices]\nq = 3\np = 5\nk0 = 2\n"
      "[probe]\nname = \"decay\"\nk_list = [-4, -3]\n[stepper]\nformulation = momentum\n");
  CHECK(c.grid.n == 128);
  CHECK(c.grid.L == 12.5);
  CHECK(c.pair.p == 5);
  REQUIRE(c.k0.has_value());
  CHECK(*c.k0 == 2);
  CHECK(c.probe.name == "decay");
  CHECK(c.probe.k_list == std::vector<double>{-4, -3});
  CHECK(c.seed == 7);
  CHECK(c.data.seed == 7);
  CHECK(c.form() == Formulation::Momentum);
  CHECK(parse_config(c.echo()).echo() == c.echo());
}

TEST_CASE("config rejections") {
  const ConfigError mu = config_error("[material]\nmu = 0\n");
  CHECK(mu.line == 2);
  CHECK(std::string(mu.what()).find("μ > 0") != std::string::npos);

  const ConfigError nu = config_error("[material]\nmu = 1\nlambda2 = -3\n");
  CHECK(nu.line == 3);

  const ConfigError idx = config_error("[indices]\nq = 3\np = 6\n");
  CHECK(std::string(idx.what()).find("validate_index_pair") != std::string::npos);
  CHECK(std::string(idx.what()).find("p < 6") != std::string::npos);

  const ConfigError unk = config_error("[grid]\nn = 64\nbogus = 1\n");
  CHECK(unk.line == 3);
  CHECK(std::string(unk.what()).find("bogus") != std::string::npos);

  CHECK(config_error("[grid]\nn = 48\n").line == 2);
  CHECK(config_error("[nowhere]\n").line == 1);
  CHECK(config_error("[grid]\nn = 32\nn = 64\n").line == 3);
  CHECK(config_error("[grid]\nn = \n").line == 2);
  CHECK(config_error("[probe]\nk_list = [1, x]\n").line == 2);

  RunConfig cfg;
  apply_override(cfg, "material.mu=2.5");
  CHECK(cfg.material.mu == 2.5);
  CHECK_THROWS_AS(apply_override(cfg, "material.nope=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "no_equals_sign"), ConfigError);
  CHECK(!config_keys().empty());
}

TEST_CASE("snapshot roundtrip is bit-exact") {
  const GridSpec g{3, 32, 2 * kPi};
  SpectralState s = zero_state(g);
  s.a = random_band(g, 1, 8, 0.3, 5);
  s.u = random_band(g, 3, 8, 0.3, 6);
  const Snapshot snap = snapshot_of(s);
  CHECK(snap.names == std::vector<std::string>{"a", "u1", "u2", "u3"});
  const fs::path dir = scratch("snap");
  write_snapshot((dir / "x.cnsb").string(), snap);
  const Snapshot back = read_snapshot((dir / "x.cnsb").string());
  REQUIRE(back.fields.size() == snap.fields.size());
  for (std::size_t f = 0; f < snap.fields.size(); ++f)
    CHECK(std::memcmp(back.fields[f].data(), snap.fields[f].data(), snap.fields[f].size() * sizeof(double)) == 0);
  CHECK(back.grid.L == g.L);
  const SpectralState again = state_of(back);
  CHECK(again.u.components == 3);
}

TEST_CASE("snapshot byte layout") {
  // Hand-assembled little-endian image of a one-field d = 1 snapshot.
  const GridSpec g{1, 64, 4.0};
  std::vector<unsigned char> img{'C', 'N', 'S', 'B'};
  push_u32(img, 1);
  push_u32(img, 1);
  push_u32(img, 64);
  for (unsigned char b : {0, 0, 0, 0, 0, 0, 0x10, 0x40}) img.push_back(b);  // 4.0
  push_u32(img, 1);
  img.push_back('a');
  img.push_back(0);
  // 1.0, 0.5, -1.5, 0.0 repeated.
  const unsigned char pat[4][8] = {{0, 0, 0, 0, 0, 0, 0xF0, 0x3F},
                                   {0, 0, 0, 0, 0, 0, 0xE0, 0x3F},
                                   {0, 0, 0, 0, 0, 0, 0xF8, 0xBF},
                                   {0, 0, 0, 0, 0, 0, 0, 0}};
  const double val[4] = {1.0, 0.5, -1.5, 0.0};
  Snapshot s;
  s.grid = g;
  s.names = {"a"};
  s.fields.emplace_back();
  for (int i = 0; i < 64; ++i) {
    img.insert(img.end(), pat[i % 4], pat[i % 4] + 8);
    s.fields[0].push_back(val[i % 4]);
  }
  CHECK(encode_snapshot(s) == img);
  const Snapshot d = decode_snapshot(img);
  CHECK(d.grid.n == 64);
  CHECK(d.grid.L == 4.0);
  CHECK(d.fields[0] == s.fields[0]);

  std::vector<unsigned char> bad = img;
  bad[0] = 'X';
  CHECK_THROWS_WITH_AS(decode_snapshot(bad), doctest::Contains("bad magic"), Error);
  bad = img;
  bad[4] = 2;
  CHECK_THROWS_WITH_AS(decode_snapshot(bad), doctest::Contains("version"), Error);
  bad.assign(img.begin(), img.end() - 3);
  CHECK_THROWS_WITH_AS(decode_snapshot(bad), doctest::Contains("truncated"), Error);
  bad = img;
  bad[24] = 2;  // two fields declared, one name present
  CHECK_THROWS_AS(decode_snapshot(bad), Error);
}

TEST_CASE("CSV formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  const fs::path dir = scratch("csv");
  {
    CsvWriter w((dir / "t.csv").string(), {"x", "y"}, "[grid]\nn = 32");
    w.row(std::vector<double>{0.1, -2.5e-300});
    w.row(std::vector<std::string>{"a", "b"});
    CHECK_THROWS_AS(w.row(std::vector<double>{1.0}), Error);
    w.close();
  }
  const CsvTable t = read_csv((dir / "t.csv").string());
  CHECK(t.header == std::vector<std::string>{"x", "y"});
  CHECK(t.comments.size() == 2);
  REQUIRE(t.rows.size() == 2);
  CHECK(std::stod(t.rows[0][0]) == 0.1);
  CHECK(std::stod(t.rows[0][1]) == -2.5e-300);

  const std::string svg = render_svg({"t", "x", "y", true, true}, {{"s", {1, 2, 4}, {1, 0.5, 0.25}}});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("simulate output is deterministic") {
  RunConfig cfg = parse_config("[grid]\nn = 32\n[stepper]\nT = 0.02\nsnapshot_stride = 10\n");
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  write_simulation(cfg, a.string());
  write_simulation(cfg, b.string());
  for (const char* f : {"diagnostics.csv", "snapshots.csv", "snap_000010.cnsb"}) {
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const CsvTable d = read_csv((a / "diagnostics.csv").string());
  CHECK(d.header == std::vector<std::string>{"t", "X_low_inf", "X_low_2", "X_low_1", "a_high_inf", "a_high_1",
                                             "u_high_inf", "u_high_1", "mass", "min_density"});
  CHECK(!d.comments.empty());
  CHECK(describe_snapshot_norms(cfg, (a / "snap_000010.cnsb").string()).find("X0") != std::string::npos);
}

TEST_CASE("zero data simulates to zero rows") {
  RunConfig cfg = parse_config("[grid]\nn = 32\n[stepper]\nT = 0.01\n[data]\namplitude = 0\n");
  const fs::path dir = scratch("zero");
  write_simulation(cfg, dir.string());
  const CsvTable d = read_csv((dir / "diagnostics.csv").string());
  REQUIRE(!d.rows.empty());
  for (const auto& r : d.rows) {
    for (std::size_t c = 1; c + 1 < r.size(); ++c) CHECK(std::stod(r[c]) == 0.0);
    CHECK(std::stod(r.back()) == 1.0);  // density 1 + a
  }
}

TEST_CASE("summary exit codes") {
  const fs::path dir = scratch("summary");
  for (int id : criterion_ids()) {
    ExperimentReport r;
    r.name = "c" + std::to_string(id);
    r.check(id, "ok, with a comma", true);
    write_report(dir.string(), r, "seed = 1");
  }
  Summary s = summarize(dir.string());
  CHECK(s.pass);
  CHECK(s.exit_code == 0);
  CHECK(s.checks.size() == 11);
  const std::string text = render_summary(s);
  for (int id : criterion_ids()) CHECK(text.find(std::to_string(id)) != std::string::npos);

  ExperimentReport bad;
  bad.name = "c04";
  bad.check(4, "fails", false);
  write_report(dir.string(), bad, "");
  s = summarize(dir.string());
  CHECK_FALSE(s.pass);
  CHECK(s.exit_code == 4);

  fs::remove(dir / "c4_checks.csv");
  fs::remove(dir / "c04_checks.csv");
  s = summarize(dir.string());
  CHECK(s.missing == std::vector<int>{4});
  CHECK(s.exit_code == 4);
  CHECK(criteria_for_probe("all") == criterion_ids());
  CHECK_THROWS_AS(criteria_for_probe("nope"), Error);
}
