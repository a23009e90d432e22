// Runs the acceptance criteria and prints one pass/fail line per criterion.
// Usage: acceptance [--out DIR] [id ...]   (default: every criterion)

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>

#include "cnslab/suite.hpp"

using namespace cnslab;

int main(int argc, char** argv) {
  std::vector<int> ids;
  std::string out = "acceptance_out";
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--out" && i + 1 < argc)
      out = argv[++i];
    else
      ids.push_back(std::stoi(a));
  }
  if (ids.empty()) ids = criterion_ids();

  RunConfig cfg;
  cfg.out_dir = out;
  std::filesystem::create_directories(out);

  int failed = 0;
  for (int id : ids) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<ExperimentReport> reps;
    try {
      reps = run_criteria({id}, cfg);
    } catch (const std::exception& e) {
      std::printf("[FAIL] criterion %2d: %s (error: %s)\n", id, criterion_title(id).c_str(), e.what());
      ++failed;
      continue;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = true;
    for (const auto& r : reps) {
      write_report(out, r, cfg.echo());
      for (const auto& c : r.checks)
        if (c.id == id) ok = ok && c.pass;
    }
    std::printf("[%s] criterion %2d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", id, criterion_title(id).c_str(), secs);
    for (const auto& r : reps)
      for (const auto& c : r.checks)
        if (!c.pass) std::printf("       failed check: %s\n", c.description.c_str());
    std::fflush(stdout);
    if (!ok) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(ids.size()) - failed, ids.size());
  return failed == 0 ? 0 : 1;
}
