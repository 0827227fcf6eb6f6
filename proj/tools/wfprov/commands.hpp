#pragma once

#include <CLI11.hpp>

namespace wfprov::cli {

void add_serve(CLI::App& app);
void add_backend(CLI::App& app);
void add_sim(CLI::App& app);
void add_bench(CLI::App& app);

/// Blocks until SIGINT or SIGTERM. Call block_signals() before spawning
/// threads so that none of them receives the signal instead.
void block_signals();
int wait_for_signal();

}  // namespace wfprov::cli
