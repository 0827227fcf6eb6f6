#include <cstdio>
#include <exception>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"wfprov: workflow provenance service, simulator and benchmarks"};
  app.require_subcommand(1);
  wfprov::cli::add_serve(app);
  wfprov::cli::add_backend(app);
  wfprov::cli::add_sim(app);
  wfprov::cli::add_bench(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "wfprov: %s\n", e.what());
    return 2;
  }
  return 0;
}
