#pragma once

#include <cstdint>
#include <vector>

namespace gibbslab {

class ModelSpec;

// The Gaussian disorder: one i.i.d. N(0,1) entry per feature. Entry i is
// generated at counter i of a Philox stream keyed by (seed, replica_id), so a
// given (seed, replica) pair always yields the same field, bit for bit,
// regardless of how work was scheduled.
struct Environment {
    std::vector<double> g;
    std::uint64_t seed = 0;
    std::uint32_t replica_id = 0;
};

Environment sample_environment(const ModelSpec& model, std::uint64_t seed,
                               std::uint32_t replica_id = 0);

}  // namespace gibbslab
