#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "pegtrace/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Inscribed-rectangle manifolds of simple polygons: diameters, "
               "continuation tracing, swept-area verification, coincidence "
               "counting"};
  app.require_subcommand(1);

  pegtrace::RunConfig cfg;

  auto add_common = [&](CLI::App* sub, bool needs_input) {
    if (needs_input) {
      sub->add_option("--input", cfg.input, "polygon JSON file")->required();
    }
    sub->add_option("--out", cfg.outdir, "output directory");
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--grid", cfg.grid, "oracle grid density per edge");
    sub->add_flag("--svg", cfg.svg, "emit an SVG figure");
    sub->add_option("--h-max", cfg.trace.h_max_rel,
                    "max continuation step relative to the perimeter");
    sub->add_option("--max-steps", cfg.trace.max_steps,
                    "step budget per component");
    sub->add_option("--loop-grid", cfg.trace.loop_grid,
                    "oracle grid for loop discovery (0 disables)");
  };

  CLI::App* diameters =
      app.add_subcommand("diameters", "enumerate and classify diameters");
  add_common(diameters, true);

  CLI::App* trace =
      app.add_subcommand("trace", "trace the inscribed-rectangle components");
  add_common(trace, true);
  trace->add_flag("--dump", cfg.dump, "include full sample chains");
  trace->add_flag("--check", cfg.check, "cross-check against the oracle");

  CLI::App* verify =
      app.add_subcommand("verify", "swept-area and differential checks");
  add_common(verify, true);

  CLI::App* coincidences = app.add_subcommand(
      "coincidences", "count isometric rectangle coincidences");
  add_common(coincidences, true);

  CLI::App* generate =
      app.add_subcommand("generate", "generate random generic polygons");
  add_common(generate, false);
  generate->add_option("--ngon", cfg.ngon, "vertex count")->required();
  generate->add_option("--count", cfg.count, "number of polygons");

  CLI11_PARSE(app, argc, argv);
  cfg.command = app.get_subcommands().front()->get_name();

  std::string summary;
  const int code = pegtrace::execute_and_write(cfg, &summary);
  std::printf("%s: %s\n", cfg.command.c_str(), summary.c_str());
  return code;
}
