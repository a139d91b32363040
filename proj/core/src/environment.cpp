#include "gibbslab/environment.hpp"

#include "gibbslab/model.hpp"
#include "gibbslab/rng.hpp"

namespace gibbslab {

Environment sample_environment(const ModelSpec& model, std::uint64_t seed,
                               std::uint32_t replica_id) {
    Environment env;
    env.seed = seed;
    env.replica_id = replica_id;
    const CounterRng rng(seed, replica_id, rng_purpose::environment);
    const auto count = static_cast<std::size_t>(model.feature_count());
    env.g.resize(count);
    for (std::size_t i = 0; i < count; ++i) env.g[i] = rng.normal_at(i);
    return env;
}

}  // namespace gibbslab
