// Command-line front end: norms, decay-fit, wave-fit, simulate, probe, report.
//
// Exit codes: 0 success; 1..11 the first failing acceptance criterion;
// 64 usage or configuration error; 65 runtime failure (vacuum, I/O, blow-up).

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "cnslab/config.hpp"
#include "cnslab/io.hpp"
#include "cnslab/suite.hpp"

namespace fs = std::filesystem;
using namespace cnslab;

namespace {

constexpr int kUsageError = 64;
constexpr int kRuntimeError = 65;

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool config_required = true) {
  auto* opt = cmd->add_option("--config", c.config, "configuration document");
  if (config_required) opt->required();
  cmd->add_option("--set", c.sets, "override, section.key=value (repeatable)");
  cmd->add_option("--out", c.out, "output directory (overrides output.dir)");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
  for (const auto& s : c.sets) apply_override(cfg, s);
  if (!c.out.empty()) cfg.out_dir = c.out;
  cfg.validate();
  return cfg;
}

std::string ensure_out(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec || !fs::is_directory(cfg.out_dir)) throw Error("output directory '" + cfg.out_dir + "' is not writable");
  return cfg.out_dir;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid Besov diagnostics and checks for the compressible Navier-Stokes system on the torus"};
  app.require_subcommand(1);

  Common norms_c, decay_c, wave_c, sim_c, probe_c, report_c;
  std::string snapshot_path;

  auto* norms = app.add_subcommand("norms", "print Besov, X and Y values of a snapshot");
  add_common(norms, norms_c, false);
  norms->add_option("snapshot", snapshot_path, "snapshot file")->required();

  auto* decay = app.add_subcommand("decay-fit", "block-decay amplification probe, CSV + SVG");
  add_common(decay, decay_c);
  auto* wave = app.add_subcommand("wave-fit", "wave L1 growth probe, CSV + SVG");
  add_common(wave, wave_c);
  auto* sim = app.add_subcommand("simulate", "run a trajectory; diagnostics CSV and snapshots");
  add_common(sim, sim_c);
  auto* probe = app.add_subcommand("probe", "run the experiment suite selected by probe.name");
  add_common(probe, probe_c);
  auto* report = app.add_subcommand("report", "merge *_checks.csv files into a pass/fail summary");
  add_common(report, report_c, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (norms->parsed()) {
      const RunConfig cfg = resolve(norms_c);
      std::cout << describe_snapshot_norms(cfg, snapshot_path);
      return 0;
    }
    if (decay->parsed()) {
      const RunConfig cfg = resolve(decay_c);
      write_decay_fit(cfg, ensure_out(cfg));
      std::cout << "wrote " << (fs::path(cfg.out_dir) / "decay_fit.csv").string() << "\n";
      return 0;
    }
    if (wave->parsed()) {
      const RunConfig cfg = resolve(wave_c);
      write_wave_fit(cfg, ensure_out(cfg));
      std::cout << "wrote " << (fs::path(cfg.out_dir) / "wave_fit.csv").string() << "\n";
      return 0;
    }
    if (sim->parsed()) {
      const RunConfig cfg = resolve(sim_c);
      const Trajectory tr = write_simulation(cfg, ensure_out(cfg));
      std::cout << "steps " << tr.steps << ", samples " << tr.diagnostics.size() << ", snapshots " << tr.snapshots.size() << "\n";
      if (tr.failed) {
        std::cerr << "simulation failed: " << tr.failure << "\n";
        return kRuntimeError;
      }
      return 0;
    }
    if (probe->parsed()) {
      const RunConfig cfg = resolve(probe_c);
      const std::string dir = ensure_out(cfg);
      const auto reps = run_criteria(criteria_for_probe(cfg.probe.name), cfg);
      int code = 0;
      for (const auto& r : reps) {
        write_report(dir, r, cfg.echo());
        for (const auto& c : r.checks) {
          std::cout << "[" << (c.pass ? "PASS" : "FAIL") << "] criterion " << c.id << ": " << c.description << "\n";
          if (!c.pass && code == 0) code = c.id;
        }
      }
      return code;
    }
    if (report->parsed()) {
      const RunConfig cfg = resolve(report_c);
      const Summary s = summarize(cfg.out_dir);
      const std::string text = render_summary(s);
      write_text((fs::path(cfg.out_dir) / "summary.txt").string(), text);
      CsvWriter c((fs::path(cfg.out_dir) / "summary.csv").string(), {"criterion", "status"}, cfg.echo());
      for (int id : criterion_ids()) {
        bool any = false, ok = true;
        for (const auto& chk : s.checks)
          if (chk.id == id) any = true, ok = ok && chk.pass;
        c.row(std::vector<std::string>{std::to_string(id), any ? (ok ? "pass" : "fail") : "missing"});
      }
      c.close();
      std::cout << text;
      return s.exit_code;
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}
