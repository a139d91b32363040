#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gibbslab/atomicity.hpp"
#include "gibbslab/environment.hpp"
#include "gibbslab/errors.hpp"
#include "gibbslab/exact.hpp"
#include "gibbslab/experiment.hpp"
#include "gibbslab/flows.hpp"
#include "gibbslab/logsumexp.hpp"
#include "gibbslab/sampling.hpp"

namespace {

using namespace gibbslab;

int report(const char* name, bool ok) {
    std::printf("%s %s\n", ok ? "ok  " : "FAIL", name);
    return ok ? 0 : 1;
}

bool check_rem_logz() {
    const auto model = ModelSpec::rem(2);
    const auto env = sample_environment(model, 7);
    const double beta = 1.1;
    LogSumExpAccumulator acc;
    for (int s = 0; s < 4; ++s)
        acc.add(beta * std::sqrt(2.0) * env.g[static_cast<std::size_t>(s)] + std::log(0.25));
    const double direct = acc.value();
    const double engine = ExactGibbs(model, env, beta).log_partition();
    return std::abs(direct - engine) < 1e-12;
}

bool check_feature_norms() {
    const auto norm_ok = [](const ModelSpec& model, const StateId& s) {
        double sq = 0.0;
        for (const double v : model.feature_vector(s)) sq += v * v;
        return std::abs(sq - model.n()) <= 1e-9 * model.n();
    };
    const auto rem = ModelSpec::rem(3);
    const auto pspin = ModelSpec::p_spin(4, MixedXi({{2, 1.0}, {3, 0.7}}));
    const auto poly = ModelSpec::polymer(4, WalkKernel::simple_random_walk(1));
    return norm_ok(rem, StateId::spins(2, 3)) && norm_ok(pspin, StateId::spins(0b1010, 4)) &&
           norm_ok(poly, zigzag_path(1, 4));
}

bool check_tower_identity() {
    const auto model = ModelSpec::rem(6);
    const auto env = sample_environment(model, 11);
    const ExactGibbs gibbs(model, env, 1.3);
    const auto& probs = gibbs.state_probs();
    const auto& cond = gibbs.conditional_overlaps();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) acc += probs[i] * cond[i];
    return std::abs(acc - gibbs.mean_overlap()) < 1e-12;
}

bool check_polymer_dp() {
    const auto model = ModelSpec::polymer(4, WalkKernel::simple_random_walk(1));
    const auto env = sample_environment(model, 23);
    const double beta = 0.8;
    const ExactGibbs gibbs(model, env, beta);
    LogSumExpAccumulator acc;
    double best = -1.0;
    for (int code = 0; code < 16; ++code) {
        std::vector<std::uint8_t> steps(4);
        for (int i = 0; i < 4; ++i) steps[static_cast<std::size_t>(i)] = (code >> i) & 1;
        const StateId s = StateId::path(1, steps);
        acc.add(beta * model.hamiltonian(env, s) + 4.0 * std::log(0.5));
    }
    const bool logz_ok = std::abs(acc.value() - gibbs.log_partition()) < 1e-9;

    const auto rep = max_atom(1, 4, env.g, beta);
    for (int code = 0; code < 16; ++code) {
        std::vector<std::uint8_t> steps(4);
        for (int i = 0; i < 4; ++i) steps[static_cast<std::size_t>(i)] = (code >> i) & 1;
        best = std::max(best, std::exp(gibbs.log_prob(StateId::path(1, steps))));
    }
    return logz_ok && std::abs(best - rep.max_atom) < 1e-12;
}

bool check_turn_census() {
    const auto counts = count_paths_by_turns(6, 2);
    boost::multiprecision::cpp_int total = 0;
    for (const auto& c : counts) total += c;
    return total == 4096;
}

bool check_sampler_determinism() {
    const auto model = ModelSpec::rem(5);
    const auto env = sample_environment(model, 3);
    const ExactGibbs gibbs(model, env, 1.0);
    SamplerConfig cfg;
    cfg.seed = 19;
    cfg.num_samples = 20;
    const auto a = sample_states(gibbs, cfg);
    const auto b = sample_states(gibbs, cfg);
    return a.states == b.states && a.exact_law;
}

bool check_ou_identity() {
    const auto model = ModelSpec::rem(4);
    const auto env = sample_environment(model, 5);
    const auto same = ou_evolve(env, 0.0, 99);
    return same.g == env.g;
}

int selftest() {
    int failures = 0;
    failures += report("rem partition function vs direct sum", check_rem_logz());
    failures += report("feature norms pinned to n", check_feature_norms());
    failures += report("conditional overlaps average to the mean overlap", check_tower_identity());
    failures += report("polymer DP vs path enumeration", check_polymer_dp());
    failures += report("turn census totals (2d)^n", check_turn_census());
    failures += report("sampler determinism", check_sampler_determinism());
    failures += report("zero-time environment flow is the identity", check_ou_identity());
    if (failures > 0) std::printf("%d check(s) failed\n", failures);
    return failures > 0 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"disordered-system verification experiments"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "run an experiment from a JSON config");
    std::string config_path;
    run_cmd->add_option("config", config_path, "experiment config file")->required();
    std::uint64_t seed_flag = 0;
    int replicas_flag = 0;
    std::string out_flag;
    auto* seed_opt = run_cmd->add_option("--seed", seed_flag, "override the config seed");
    auto* replicas_opt =
        run_cmd->add_option("--replicas", replicas_flag, "override the replica count");
    auto* out_opt = run_cmd->add_option("--out", out_flag, "override the output directory");

    auto* summarize_cmd =
        app.add_subcommand("summarize", "concatenate result rows into one plot-ready CSV");
    std::string results_dir;
    summarize_cmd->add_option("dir", results_dir, "results directory")->required();

    auto* selftest_cmd = app.add_subcommand("selftest", "run the built-in invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) {
            auto cfg = gibbslab::load_experiment_config(config_path);
            gibbslab::FlagOverrides flags;
            if (seed_opt->count() > 0) flags.seed = seed_flag;
            if (replicas_opt->count() > 0) flags.replicas = replicas_flag;
            if (out_opt->count() > 0) flags.output_dir = out_flag;
            cfg = gibbslab::apply_overrides(cfg, flags);
            const auto outcome = gibbslab::run_experiment(cfg);
            for (const auto& a : outcome.assertions)
                std::printf("%s %s (observed %.6g, bound %.6g)\n", a.pass ? "pass" : "FAIL",
                            a.name.c_str(), a.observed, a.bound);
            std::printf("wrote %s\n", outcome.csv_path.c_str());
            std::printf("wrote %s\n", outcome.summary_path.c_str());
            return outcome.pass ? 0 : 1;
        }
        if (summarize_cmd->parsed()) {
            std::printf("wrote %s\n", gibbslab::emit_summary(results_dir).c_str());
            return 0;
        }
        if (selftest_cmd->parsed()) return selftest();
    } catch (const gibbslab::ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const gibbslab::BudgetError& e) {
        std::fprintf(stderr, "budget error: %s\n", e.what());
        return 3;
    } catch (const gibbslab::CheckFailure& e) {
        std::fprintf(stderr, "check failure: %s\n", e.what());
        return 1;
    }
    return 0;
}
