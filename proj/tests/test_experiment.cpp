#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "gibbslab/atomicity.hpp"
#include "gibbslab/environment.hpp"
#include "gibbslab/errors.hpp"
#include "gibbslab/exact.hpp"
#include "gibbslab/experiment.hpp"
#include "gibbslab/model.hpp"
#include "gibbslab/stats.hpp"

using namespace gibbslab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "gibbslab_test_experiment" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    return lines;
}

void expect_error(const json& cfg, const std::string& what) {
    try {
        parse_experiment_config(cfg.dump());
        FAIL("expected a ValidationError mentioning '" << what << "'");
    } catch (const ValidationError& e) {
        INFO("message: " << e.what());
        CHECK(std::string(e.what()).find(what) != std::string::npos);
    }
}

json identity_json() {
    return json{{"experiment", "identity_check"},
                {"model", {{"kind", "rem"}, {"n", 6}}},
                {"beta_grid", {0.5, 1.5}},
                {"replicas", 16},
                {"seed", 11}};
}

}  // namespace

TEST_CASE("config fields round trip") {
    const json j{{"experiment", "ball_cover"},
                 {"model",
                  {{"kind", "polymer"},
                   {"n", 5},
                   {"dim", 2},
                   {"endpoint", {3, 1}}}},
                 {"beta_grid", {0.2, 1.0}},
                 {"delta_grid", {0.1, 0.4}},
                 {"replicas", 3},
                 {"seed", 99},
                 {"output", "somewhere/else"},
                 {"budget", {{"polymer_max_n", 48}, {"rem_max_n", 18}}},
                 {"cover_k", 5},
                 {"cover_eval_samples", 600},
                 {"env", "bounded_uniform"},
                 {"k", 2}};
    const auto cfg = parse_experiment_config(j.dump());
    CHECK(cfg.experiment == ExperimentKind::BallCover);
    CHECK(cfg.model.kind == "polymer");
    CHECK(cfg.model.n == 5);
    CHECK(cfg.model.dim == 2);
    REQUIRE(cfg.model.endpoint.has_value());
    CHECK((*cfg.model.endpoint)[0] == 3);
    CHECK((*cfg.model.endpoint)[1] == 1);
    CHECK(cfg.beta_grid == std::vector<double>{0.2, 1.0});
    CHECK(cfg.delta_grid == std::vector<double>{0.1, 0.4});
    CHECK(cfg.replicas == 3);
    CHECK(cfg.seed == 99);
    CHECK(cfg.output_dir == "somewhere/else");
    REQUIRE(cfg.budget.has_value());
    CHECK(cfg.budget->polymer_max_n == 48);
    CHECK(cfg.budget->rem_max_n == 18);
    CHECK(cfg.budget->pspin_max_n == ExactBudget{}.pspin_max_n);
    CHECK(cfg.cover_k == 5);
    CHECK(cfg.cover_eval_samples == 600);
    CHECK(cfg.env_dist == EnvKind::BoundedUniform);
    CHECK(cfg.perturbation_k == 2);
    CHECK(!cfg.mcmc.has_value());

    const json spin{{"experiment", "temperature_equivalence"},
                    {"model", {{"kind", "p_spin"}, {"n", 4}, {"couplings", {{"2", 1.0}, {"3", 0.5}}}}},
                    {"beta_grid", {0.7}},
                    {"replicas", 120},
                    {"seed", 5},
                    {"mcmc", {{"burn_in_sweeps", 200}, {"sweeps_per_sample", 3}}},
                    {"k", 4}};
    const auto sp = parse_experiment_config(spin.dump());
    CHECK(sp.model.couplings == std::vector<std::pair<int, double>>{{2, 1.0}, {3, 0.5}});
    REQUIRE(sp.mcmc.has_value());
    CHECK(sp.mcmc->burn_in_sweeps == 200);
    CHECK(sp.mcmc->sweeps_per_sample == 3);
    CHECK(sp.perturbation_k == 4);
}

TEST_CASE("config errors name the offending field") {
    expect_error(json{{"model", {{"kind", "rem"}, {"n", 4}}}, {"beta_grid", {1.0}}, {"seed", 1}},
                 "config.experiment: required field is missing");

    auto base = identity_json();
    base["typo_field"] = 1;
    expect_error(base, "config.typo_field: unknown field");

    base = identity_json();
    base["model"]["flavor"] = "x";
    expect_error(base, "model.flavor: unknown field");

    base = identity_json();
    base.erase("seed");
    expect_error(base, "config.seed: required field is missing");
    base["seed"] = 1.5;
    expect_error(base, "wall-clock seeding is not supported");

    base = identity_json();
    base["experiment"] = "identity";
    expect_error(base, "unknown kind 'identity'");

    base = identity_json();
    base["beta_grid"] = json::array();
    expect_error(base, "beta_grid: must be non-empty");
    base["beta_grid"] = {0.5, "hot"};
    expect_error(base, "beta_grid[1]: expected a number");
    base["beta_grid"] = {0.5, -0.1};
    expect_error(base, "beta_grid[1]: must be nonnegative");

    base = identity_json();
    base["replicas"] = 0;
    expect_error(base, "replicas: must be at least 1");

    base = identity_json();
    base["model"]["n"] = 0;
    expect_error(base, "model.n: must be at least 1");
    base["model"] = {{"kind", "soft_spheres"}, {"n", 4}};
    expect_error(base, "model.kind: must be rem, p_spin, or polymer");
    base["model"] = {{"kind", "p_spin"}, {"n", 4}};
    expect_error(base, "model.couplings: required for p_spin");

    json scan{{"experiment", "localization_scan"},
              {"model", {{"kind", "rem"}, {"n", 6}}},
              {"beta_grid", {0.5, 1.5}},
              {"delta_grid", {0.4, 0.1}},
              {"replicas", 4},
              {"seed", 1}};
    expect_error(scan, "delta_grid: must be strictly increasing");
    scan["delta_grid"] = {0.1, 1.2};
    expect_error(scan, "delta_grid[1]: must lie in [0, 1]");
    scan["delta_grid"] = {0.1, 0.4};
    scan["beta_grid"] = {1.5, 0.5};
    expect_error(scan, "beta_grid: must be strictly increasing");

    json ou{{"experiment", "ou_variance"},
            {"model", {{"kind", "rem"}, {"n", 5}}},
            {"beta_grid", {1.0}},
            {"replicas", 40},
            {"seed", 3}};
    expect_error(ou, "time_grid: must be non-empty");
    ou["time_grid"] = {0.0, 2.0};
    expect_error(ou, "time_grid[0]: must be positive");

    json atoms{{"experiment", "atom_decay"},
               {"model", {{"kind", "rem"}, {"n", 4}}},
               {"beta_grid", {1.0}},
               {"n_grid", {4, 8}},
               {"replicas", 4},
               {"seed", 2}};
    expect_error(atoms, "model.kind: must be polymer for this experiment");
    atoms["model"] = {{"kind", "polymer"}, {"dim", 1}};
    atoms["n_grid"] = json::array();
    expect_error(atoms, "n_grid: must be non-empty");
    atoms["n_grid"] = {8, 4};
    expect_error(atoms, "n_grid: must be strictly increasing");

    json cover{{"experiment", "ball_cover"},
               {"model", {{"kind", "p_spin"}, {"n", 5}, {"couplings", {{"2", 1.0}}}}},
               {"beta_grid", {1.0}},
               {"delta_grid", {0.3}},
               {"replicas", 2},
               {"seed", 4}};
    expect_error(cover, "mcmc: required to sample the spin mixture model");

    CHECK_THROWS_WITH_AS(parse_experiment_config("{not json"),
                         doctest::Contains("config parse:"), ValidationError);
    CHECK_THROWS_WITH_AS(load_experiment_config("/nonexistent/config.json"),
                         doctest::Contains("cannot open"), ValidationError);
}

TEST_CASE("the hash covers everything except the output location") {
    auto a = parse_experiment_config(identity_json().dump());
    auto b = a;
    b.output_dir = "elsewhere";
    CHECK(a.canonical_text() == b.canonical_text());
    CHECK(a.hash() == b.hash());

    const std::string text = a.canonical_text();
    CHECK(a.hash() == fnv1a_hash(std::span<const char>(text.data(), text.size())));
    CHECK(json::parse(text)["experiment"] == "identity_check");

    auto c = a;
    c.seed = 12;
    CHECK(a.hash() != c.hash());
    auto d = a;
    d.beta_grid.push_back(2.0);
    CHECK(a.hash() != d.hash());
    auto e = a;
    e.mcmc = McmcParams{};
    CHECK(a.hash() != e.hash());
}

TEST_CASE("command line flags win over the config file") {
    const auto cfg = parse_experiment_config(identity_json().dump());

    const auto same = apply_overrides(cfg, FlagOverrides{});
    CHECK(same.seed == cfg.seed);
    CHECK(same.replicas == cfg.replicas);
    CHECK(same.output_dir == cfg.output_dir);

    FlagOverrides flags;
    flags.seed = 77;
    flags.replicas = 3;
    flags.output_dir = "override_out";
    const auto swapped = apply_overrides(cfg, flags);
    CHECK(swapped.seed == 77);
    CHECK(swapped.replicas == 3);
    CHECK(swapped.output_dir == "override_out");
    CHECK(swapped.hash() != cfg.hash());

    FlagOverrides bad;
    bad.replicas = 0;
    CHECK_THROWS_AS(apply_overrides(cfg, bad), ValidationError);
}

TEST_CASE("identity check replays byte for byte") {
    auto cfg = parse_experiment_config(identity_json().dump());
    const auto dir_a = fresh_dir("identity_a");
    cfg.output_dir = dir_a.string();
    const auto out = run_experiment(cfg);
    CHECK(out.pass);
    CHECK(out.config_hash == cfg.hash());
    REQUIRE(out.assertions.size() == 2);
    for (const auto& a : out.assertions) {
        CHECK(a.name.rfind("overlap_identity", 0) == 0);
        CHECK(a.pass);
        CHECK(a.observed <= a.bound);
    }

    const auto rows = lines_of(slurp(out.csv_path));
    REQUIRE(rows.size() == 1 + 2 * 16);
    CHECK(rows[0] == "config_hash,beta,replica,free_energy_derivative,mean_overlap,residual");
    char hex[24];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(out.config_hash));
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(split_csv(rows[i])[0] == hex);

    const auto model = ModelSpec::rem(6);
    const auto first = split_csv(rows[1]);
    const auto s = ExactGibbs(model, sample_environment(model, 11, 0), 0.5).summary();
    CHECK(std::stod(first[1]) == 0.5);
    CHECK(std::stod(first[2]) == 0.0);
    CHECK(std::stod(first[3]) == s.free_energy_derivative);
    CHECK(std::stod(first[4]) == s.mean_overlap);
    CHECK(std::stod(first[5]) ==
          doctest::Approx(s.free_energy_derivative - 0.5 * (1.0 - s.mean_overlap)).epsilon(1e-15));

    // replaying into another directory and with a single worker changes nothing
    cfg.output_dir = fresh_dir("identity_b").string();
    const auto again = run_experiment(cfg);
    CHECK(slurp(again.csv_path) == slurp(out.csv_path));

    setenv("GIBBSLAB_WORKERS", "1", 1);
    cfg.output_dir = fresh_dir("identity_c").string();
    const auto serial = run_experiment(cfg);
    unsetenv("GIBBSLAB_WORKERS");
    CHECK(slurp(serial.csv_path) == slurp(out.csv_path));
}

TEST_CASE("moments summary carries provenance") {
    json j{{"experiment", "moments"},
           {"model", {{"kind", "rem"}, {"n", 6}}},
           {"beta_grid", {1.0}},
           {"replicas", 200},
           {"seed", 31}};
    auto cfg = parse_experiment_config(j.dump());
    cfg.output_dir = fresh_dir("moments").string();
    const auto out = run_experiment(cfg);
    CHECK(out.pass);

    const auto rows = lines_of(slurp(out.csv_path));
    REQUIRE(rows.size() == 1 + 200);
    CHECK(rows[0] == "config_hash,beta,replica,z_ratio,inv_z_ratio");
    const auto model = ModelSpec::rem(6);
    for (const std::size_t r : {std::size_t{0}, std::size_t{137}}) {
        const auto cells = split_csv(rows[1 + r]);
        const double lz =
            log_partition(model, sample_environment(model, 31, static_cast<std::uint32_t>(r)), 1.0);
        CHECK(std::stod(cells[3]) == doctest::Approx(std::exp(lz - 3.0)).epsilon(1e-15));
        CHECK(std::stod(cells[4]) == doctest::Approx(std::exp(-lz - 3.0)).epsilon(1e-15));
    }

    const auto summary = json::parse(slurp(out.summary_path));
    CHECK(summary["experiment"] == "moments");
    CHECK(summary["artifact_version"] == "gibbslab-0.1.0");
    CHECK(summary["pass"] == out.pass);
    CHECK(summary["config"] == json::parse(cfg.canonical_text()));
    const std::string hex = summary["config_hash"];
    CHECK(hex.size() == 16);
    CHECK(hex.find_first_not_of("0123456789abcdef") == std::string::npos);
    const std::string stamp = summary["generated_at"];
    CHECK(stamp.size() == 20);
    CHECK(stamp[4] == '-');
    CHECK(stamp[10] == 'T');
    CHECK(stamp.back() == 'Z');
    REQUIRE(summary["assertions"].size() == 2);
    CHECK(summary["assertions"][0]["name"] == "z_mean[beta=1]");
    CHECK(summary["assertions"][0]["pass"] == true);
    CHECK(summary["assertions"][1]["name"] == "inv_z_bound[beta=1]");
    CHECK(!summary["estimates"].empty());
    CHECK(summary["estimates"][0]["beta"] == 1.0);

    // rows.csv must stay timestamp-free or replays would never match
    const auto csv = slurp(out.csv_path);
    CHECK(csv.find(stamp) == std::string::npos);
    CHECK(csv.find('T') == std::string::npos);
    CHECK(csv.find(':') == std::string::npos);
}

TEST_CASE("turn census rows match the closed form") {
    json j{{"experiment", "turn_census"},
           {"model", {{"kind", "polymer"}, {"dim", 2}}},
           {"n_grid", {2, 5}},
           {"replicas", 1},
           {"seed", 1}};
    auto cfg = parse_experiment_config(j.dump());
    cfg.output_dir = fresh_dir("census").string();
    const auto out = run_experiment(cfg);
    CHECK(out.pass);

    const auto rows = lines_of(slurp(out.csv_path));
    REQUIRE(rows.size() == 1 + 2 + 5);
    CHECK(rows[0] == "config_hash,n,j,count");
    std::size_t at = 1;
    for (const int n : {2, 5}) {
        const auto counts = count_paths_by_turns(n, 2);
        for (int turn = 0; turn < n; ++turn, ++at) {
            const auto cells = split_csv(rows[at]);
            CHECK(cells[1] == std::to_string(n));
            CHECK(cells[2] == std::to_string(turn));
            CHECK(cells[3] == counts[static_cast<std::size_t>(turn)].str());
        }
    }
}

TEST_CASE("summary concatenation checks schemas") {
    const auto base = fresh_dir("concat");
    auto cfg = parse_experiment_config(identity_json().dump());
    cfg.output_dir = (base / "a").string();
    const auto run_a = run_experiment(cfg);
    cfg.seed = 12;
    cfg.output_dir = (base / "b").string();
    const auto run_b = run_experiment(cfg);

    const auto long_path = emit_summary(base.string());
    CHECK(long_path == (base / "summary_long.csv").string());
    const auto merged = lines_of(slurp(long_path));
    const auto rows_a = lines_of(slurp(run_a.csv_path));
    const auto rows_b = lines_of(slurp(run_b.csv_path));
    REQUIRE(merged.size() == rows_a.size() + rows_b.size() - 1);
    CHECK(merged[0] == rows_a[0]);
    for (std::size_t i = 1; i < rows_a.size(); ++i) CHECK(merged[i] == rows_a[i]);
    for (std::size_t i = 1; i < rows_b.size(); ++i)
        CHECK(merged[rows_a.size() - 1 + i] == rows_b[i]);

    json census{{"experiment", "turn_census"},
                {"model", {{"kind", "polymer"}, {"dim", 1}}},
                {"n_grid", {3}},
                {"replicas", 1},
                {"seed", 1}};
    auto other = parse_experiment_config(census.dump());
    other.output_dir = (base / "c").string();
    run_experiment(other);
    CHECK_THROWS_WITH_AS(emit_summary(base.string()),
                         doctest::Contains("mixed experiment schemas"), ValidationError);

    CHECK_THROWS_WITH_AS(emit_summary((base / "missing").string()),
                         doctest::Contains("is not a directory"), ValidationError);
    const auto empty = fresh_dir("concat_empty");
    CHECK_THROWS_WITH_AS(emit_summary(empty.string()), doctest::Contains("no rows.csv found"),
                         ValidationError);
}
