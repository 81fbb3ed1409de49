#pragma once

#include <cstdint>
#include <vector>

#include "safebai/bai.hpp"
#include "safebai/config.hpp"

namespace safebai {

/// Replication `index` of `config`: its own Environment on the
/// (master_seed, index) substreams.
RunRecord run_replication(const ExperimentConfig& config, std::uint64_t index);

/// Reference implementation: replications one after another.
std::vector<RunRecord> run_replications_serial(const ExperimentConfig& config);

/// Same records, computed by an OpenMP worker pool of `workers` threads
/// (0 = OpenMP default). Output order is the replication index.
std::vector<RunRecord> run_replications_parallel(const ExperimentConfig& config, int workers);

}  // namespace safebai
