// fpki scenario run FILE...
// fpki bench --leaves 1024,65536 --depths 1,2,3 --seed 7
#include <iostream>

#include "CLI11.hpp"
#include "fpki/harness/bench.h"
#include "fpki/harness/scenario.h"

int main(int argc, char** argv) {
  CLI::App app{"F-PKI scenario runner and benchmark"};
  app.require_subcommand(1);

  auto* scenario = app.add_subcommand("scenario", "attack and use-case scenarios");
  scenario->require_subcommand(1);
  auto* run = scenario->add_subcommand("run", "run scenario files");
  std::vector<std::string> files;
  bool quiet = false;
  run->add_option("files", files, "scenario files")->required()->check(CLI::ExistingFile);
  run->add_flag("-q,--quiet", quiet, "print only the summaries and failures");

  auto* bench = app.add_subcommand("bench", "proof sizes and generation times as CSV");
  fpki::harness::BenchParams p;
  bench->add_option("--leaves", p.leaves, "e2LD counts")->delimiter(',');
  bench->add_option("--depths", p.depths, "levels per queried name")->delimiter(',');
  bench->add_option("--samples", p.samples, "queried names per row");
  bench->add_option("--fanout", p.fanout, "siblings per lower level");
  bench->add_option("--seed", p.seed);

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    int failed = 0;
    for (const auto& f : files) {
      try {
        auto report = fpki::harness::run_scenario(fpki::harness::load_scenario(f));
        if (quiet) {
          for (const auto& c : report.checks)
            if (!c.pass()) std::cout << "FAIL  line " << c.line << ": " << c.what << "\n";
          std::cout << report.name << ": " << (report.passed() ? "ok" : "FAILED") << "\n";
        } else {
          std::cout << report.str();
        }
        failed += !report.passed();
      } catch (const std::exception& e) {
        std::cerr << f << ": " << e.what() << "\n";
        ++failed;
      }
    }
    return failed ? 1 : 0;
  }
  if (*bench) {
    std::cout << fpki::harness::bench_csv_header() << "\n";
    for (const auto& row : fpki::harness::bench(p)) std::cout << fpki::harness::to_csv(row) << "\n";
  }
  return 0;
}
