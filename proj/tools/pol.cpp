#include <iostream>

#include <CLI11.hpp>

#include "pol/driver.hpp"

int main(int argc, char** argv) {
  CLI::App app{"pol: a dependently typed language with data and codata"};
  app.require_subcommand(1);

  pol::DriverConfig cfg;
  std::string run_target;

  auto add_common = [&](CLI::App* sub, bool run) {
    sub->add_option("files", cfg.files, "source files (.pol)")->required()->expected(-1);
    if (run) {
      // the last positional is the binding to evaluate; peeled off below
    }
    sub->add_option("--fuel", cfg.fuel, "evaluation step budget")->check(CLI::PositiveNumber);
    sub->add_flag("--json", cfg.json, "render diagnostics as JSON");
    sub->add_flag("--explain-conv", cfg.explain_conv, "print the conversion trace");
    sub->add_flag("--explain-unify", cfg.explain_unify, "print the solver trace");
    sub->add_flag("--trace-json", cfg.trace_json, "render traces as JSON");
    sub->add_flag("--no-prelude", cfg.no_prelude, "do not implicitly load std/prelude.pol");
    sub->add_option("--prelude", cfg.prelude_path, "explicit prelude path");
  };

  CLI::App* check = app.add_subcommand("check", "typecheck the given files");
  add_common(check, false);
  CLI::App* run = app.add_subcommand("run", "typecheck, then normalize a top-level let");
  add_common(run, true);
  CLI::App* elab = app.add_subcommand("elaborate",
                                      "typecheck and print the program with implicits filled");
  add_common(elab, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (run->parsed()) {
    // `run FILES.. NAME`: the final positional names the binding.
    if (cfg.files.size() < 2) {
      std::cerr << "error: usage: pol run <files...> <name>\n";
      return 2;
    }
    cfg.run_target = cfg.files.back();
    cfg.files.pop_back();
    return pol::cmd_run(cfg, std::cout, std::cerr);
  }
  if (check->parsed()) return pol::cmd_check(cfg, std::cout, std::cerr);
  return pol::cmd_elaborate(cfg, std::cout, std::cerr);
}
