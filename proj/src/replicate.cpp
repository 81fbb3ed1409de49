#include "safebai/replicate.hpp"

#include <exception>

#include <omp.h>

namespace safebai {

RunRecord run_replication(const ExperimentConfig& config, std::uint64_t index) {
    const Instance inst = build_instance(config.instance);
    const AlgoConfig algo = resolved_algo(config);
    Environment env(inst, config.instance.sigma_r, config.instance.sigma_s, config.master_seed, index);
    return run(env, algo);
}

std::vector<RunRecord> run_replications_serial(const ExperimentConfig& config) {
    std::vector<RunRecord> out;
    out.reserve(static_cast<std::size_t>(config.replications));
    for (int r = 0; r < config.replications; ++r) {
        out.push_back(run_replication(config, static_cast<std::uint64_t>(r)));
    }
    return out;
}

std::vector<RunRecord> run_replications_parallel(const ExperimentConfig& config, int workers) {
    const int n = config.replications;
    std::vector<RunRecord> out(static_cast<std::size_t>(n));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    const int threads = workers > 0 ? workers : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (int r = 0; r < n; ++r) {
        try {
            out[static_cast<std::size_t>(r)] = run_replication(config, static_cast<std::uint64_t>(r));
        } catch (...) {
            errors[static_cast<std::size_t>(r)] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace safebai
