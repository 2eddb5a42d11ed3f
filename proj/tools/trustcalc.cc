// trustcalc derive VIEW        statements derived beyond the view
// trustcalc derive --all VIEW  the whole closure
// trustcalc check VIEW --key X --name N --at T
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fpki/trustcalc/trustcalc.h"

namespace {

fpki::trust::View load(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return fpki::trust::parse_view(ss.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trust calculus"};
  app.require_subcommand(1);
  std::string path;
  bool all = false;
  auto* derive = app.add_subcommand("derive", "print derived statements");
  derive->add_option("view", path)->required()->check(CLI::ExistingFile);
  derive->add_flag("--all", all, "include the axioms");

  auto* check = app.add_subcommand("check", "is key X authentic for name N at time T");
  std::string key, name;
  int64_t at = 0;
  check->add_option("view", path)->required()->check(CLI::ExistingFile);
  check->add_option("--key", key)->required();
  check->add_option("--name", name)->required();
  check->add_option("--at", at)->required();

  CLI11_PARSE(app, argc, argv);
  try {
    fpki::trust::View view = load(path);
    if (*derive) {
      for (const auto& s : all ? fpki::trust::derive_closure(view) : fpki::trust::derived_only(view))
        std::cout << fpki::trust::to_string(s) << "\n";
      return 0;
    }
    bool ok = fpki::trust::is_authentic(view, key, fpki::naming::DomainName::parse(name), at);
    std::cout << (ok ? "authentic" : "not authentic") << "\n";
    return ok ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return 1;
  }
}
