#pragma once

#include <filesystem>

#include "hmc/config.hpp"

namespace hmc {

// One function per CLI subcommand.  Each reads its keys (recording defaults),
// rejects unknown keys, writes resolved_config.txt into out_dir, and then
// writes its CSV artifacts there.  All output is a pure function of the
// resolved configuration.

void run_delta_scan(RunConfig& cfg, const std::filesystem::path& out_dir);
void run_constraint_check(RunConfig& cfg, const std::filesystem::path& out_dir);
void run_bounds(RunConfig& cfg, const std::filesystem::path& out_dir);
void run_gauss_experiment(RunConfig& cfg, const std::filesystem::path& out_dir);
void run_funnel_scan(RunConfig& cfg, const std::filesystem::path& out_dir);
void run_sample(RunConfig& cfg, const std::filesystem::path& out_dir);
void run_scaling(RunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace hmc
