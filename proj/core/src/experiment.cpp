#include "gibbslab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <sstream>

#include <json.hpp>

#include "gibbslab/diagnostics.hpp"
#include "gibbslab/environment.hpp"
#include "gibbslab/errors.hpp"
#include "gibbslab/flows.hpp"
#include "gibbslab/stats.hpp"
#include "parallel.hpp"

namespace gibbslab {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kArtifactVersion = "gibbslab-0.1.0";

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ValidationError(path + ": " + msg);
}

void expect_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                known = true;
                break;
            }
        if (!known) fail(path + "." + item.key(), "unknown field");
    }
}

const json& require_field(const json& j, const std::string& path, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "required field is missing");
    return *it;
}

double as_double(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

std::int64_t as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) fail(path, "expected an integer");
    return v.get<std::int64_t>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

std::vector<double> as_double_grid(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(as_double(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<int> as_int_grid(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of integers");
    std::vector<int> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(static_cast<int>(as_int(v[i], path + "[" + std::to_string(i) + "]")));
    return out;
}

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string short_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

std::string hash_hex(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string iso_timestamp() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct KindResult {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<Assertion> assertions;
    json estimates = json::array();
};

Assertion make_assertion(std::string name, bool pass, double observed, double bound) {
    Assertion a;
    a.name = std::move(name);
    a.pass = pass;
    a.observed = observed;
    a.bound = bound;
    return a;
}

ModelConfig parse_model_block(const json& j) {
    const std::string path = "model";
    if (!j.is_object()) fail(path, "expected an object");
    expect_keys(j, path, {"kind", "n", "dim", "couplings", "endpoint"});
    ModelConfig m;
    m.kind = as_string(require_field(j, path, "kind"), path + ".kind");
    if (m.kind != "rem" && m.kind != "p_spin" && m.kind != "polymer")
        fail(path + ".kind", "must be rem, p_spin, or polymer");
    if (const auto it = j.find("n"); it != j.end())
        m.n = static_cast<int>(as_int(*it, path + ".n"));
    if (const auto it = j.find("dim"); it != j.end())
        m.dim = static_cast<int>(as_int(*it, path + ".dim"));
    if (const auto it = j.find("couplings"); it != j.end()) {
        if (!it->is_object()) fail(path + ".couplings", "expected an object mapping p to beta_p");
        for (const auto& item : it->items()) {
            int p = 0;
            try {
                p = std::stoi(item.key());
            } catch (const std::exception&) {
                fail(path + ".couplings." + item.key(), "key must be an integer p");
            }
            m.couplings.emplace_back(p, as_double(item.value(), path + ".couplings." + item.key()));
        }
        std::sort(m.couplings.begin(), m.couplings.end());
    }
    if (const auto it = j.find("endpoint"); it != j.end()) {
        if (!it->is_array() || it->size() != static_cast<std::size_t>(m.dim))
            fail(path + ".endpoint", "expected an array of dim coordinates");
        std::array<int, 3> e{0, 0, 0};
        for (std::size_t a = 0; a < it->size(); ++a)
            e[a] = static_cast<int>(as_int((*it)[a], path + ".endpoint[" + std::to_string(a) + "]"));
        m.endpoint = e;
    }
    return m;
}

void require_increasing(std::span<const double> grid, const std::string& path) {
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1]) fail(path, "must be strictly increasing");
}

double estimate_table_mib(const ExperimentConfig& cfg) {
    constexpr double mib = 1024.0 * 1024.0;
    if (cfg.experiment == ExperimentKind::AtomDecay || cfg.experiment == ExperimentKind::TurnCensus) {
        const int n = cfg.n_grid.empty() ? 1 : *std::max_element(cfg.n_grid.begin(), cfg.n_grid.end());
        return static_cast<double>(n + 1) * std::pow(2.0 * n + 1.0, cfg.model.dim) * 8.0 * 2.0 / mib;
    }
    if (cfg.model.kind == "polymer")
        return static_cast<double>(cfg.model.n + 1) * std::pow(2.0 * cfg.model.n + 1.0, cfg.model.dim) *
               8.0 * 4.0 / mib;
    return std::ldexp(1.0, cfg.model.n) * 8.0 * 3.0 / mib;
}

// ---- per-kind runners ----------------------------------------------------

KindResult run_identity(const ExperimentConfig& cfg, const ExactBudget& budget) {
    const auto model = cfg.model.build();
    const std::size_t nb = cfg.beta_grid.size();
    const auto nr = static_cast<std::size_t>(cfg.replicas);
    struct Cell {
        double fprime = 0.0, overlap = 0.0, resid = 0.0;
    };
    std::vector<Cell> cells(nb * nr);
    detail::parallel_for(cells.size(), [&](std::size_t j) {
        const double beta = cfg.beta_grid[j / nr];
        const auto env = sample_environment(model, cfg.seed, static_cast<std::uint32_t>(j % nr));
        const auto s = ExactGibbs(model, env, beta, budget).summary();
        cells[j] = {s.free_energy_derivative, s.mean_overlap,
                    s.free_energy_derivative - beta * (1.0 - s.mean_overlap)};
    });

    KindResult out;
    out.header = {"beta", "replica", "free_energy_derivative", "mean_overlap", "residual"};
    for (std::size_t bi = 0; bi < nb; ++bi) {
        std::vector<double> resid(nr);
        for (std::size_t r = 0; r < nr; ++r) {
            const auto& c = cells[bi * nr + r];
            resid[r] = c.resid;
            out.rows.push_back({num(cfg.beta_grid[bi]), std::to_string(r), num(c.fprime),
                                num(c.overlap), num(c.resid)});
        }
        const auto ms = mean_se(resid);
        out.assertions.push_back(make_assertion(
            "overlap_identity[beta=" + short_num(cfg.beta_grid[bi]) + "]",
            std::abs(ms.mean) <= 3.0 * ms.se, std::abs(ms.mean), 3.0 * ms.se));
        out.estimates.push_back(
            {{"beta", cfg.beta_grid[bi]}, {"residual_mean", ms.mean}, {"residual_se", ms.se}});
    }
    return out;
}

KindResult run_moments(const ExperimentConfig& cfg, const ExactBudget& budget) {
    const auto model = cfg.model.build();
    const std::size_t nb = cfg.beta_grid.size();
    const auto nr = static_cast<std::size_t>(cfg.replicas);
    struct Cell {
        double z_ratio = 0.0, inv_z_ratio = 0.0;
    };
    std::vector<Cell> cells(nb * nr);
    detail::parallel_for(cells.size(), [&](std::size_t j) {
        const double beta = cfg.beta_grid[j / nr];
        const auto env = sample_environment(model, cfg.seed, static_cast<std::uint32_t>(j % nr));
        const double lz = log_partition(model, env, beta, budget);
        const double mu = 0.5 * beta * beta * model.n();
        cells[j] = {std::exp(lz - mu), std::exp(-lz - mu)};
    });

    KindResult out;
    out.header = {"beta", "replica", "z_ratio", "inv_z_ratio"};
    for (std::size_t bi = 0; bi < nb; ++bi) {
        std::vector<double> zr(nr), ir(nr);
        for (std::size_t r = 0; r < nr; ++r) {
            const auto& c = cells[bi * nr + r];
            zr[r] = c.z_ratio;
            ir[r] = c.inv_z_ratio;
            out.rows.push_back(
                {num(cfg.beta_grid[bi]), std::to_string(r), num(c.z_ratio), num(c.inv_z_ratio)});
        }
        const auto zm = mean_se(zr);
        const auto im = mean_se(ir);
        const std::string tag = "[beta=" + short_num(cfg.beta_grid[bi]) + "]";
        out.assertions.push_back(make_assertion("z_mean" + tag, std::abs(zm.mean - 1.0) <= 3.0 * zm.se,
                                                std::abs(zm.mean - 1.0), 3.0 * zm.se));
        out.assertions.push_back(make_assertion("inv_z_bound" + tag, im.mean <= 1.0 + 3.0 * im.se,
                                                im.mean, 1.0 + 3.0 * im.se));
        out.estimates.push_back({{"beta", cfg.beta_grid[bi]},
                                 {"z_ratio_mean", zm.mean},
                                 {"z_ratio_se", zm.se},
                                 {"inv_z_ratio_mean", im.mean},
                                 {"inv_z_ratio_se", im.se}});
    }
    return out;
}

KindResult run_localization(const ExperimentConfig& cfg, const ExactBudget& budget) {
    const auto model = cfg.model.build();
    const std::size_t nb = cfg.beta_grid.size();
    const std::size_t nd = cfg.delta_grid.size();
    const auto nr = static_cast<std::size_t>(cfg.replicas);
    std::vector<double> a_vals(nb * nr * nd, 0.0);
    std::vector<char> b_vals(nb * nr * nd, 0);
    detail::parallel_for(nb * nr, [&](std::size_t j) {
        const double beta = cfg.beta_grid[j / nr];
        const auto env = sample_environment(model, cfg.seed, static_cast<std::uint32_t>(j % nr));
        const ExactGibbs gibbs(model, env, beta, budget);
        for (std::size_t di = 0; di < nd; ++di) {
            a_vals[j * nd + di] = a_delta_mass(gibbs, cfg.delta_grid[di]).value;
            b_vals[j * nd + di] = b_delta_indicator(gibbs, cfg.delta_grid[di]) ? 1 : 0;
        }
    });

    KindResult out;
    out.header = {"beta", "delta", "replica", "a_delta_mass", "b_delta_indicator"};
    for (std::size_t bi = 0; bi < nb; ++bi)
        for (std::size_t di = 0; di < nd; ++di)
            for (std::size_t r = 0; r < nr; ++r) {
                const std::size_t slot = (bi * nr + r) * nd + di;
                out.rows.push_back({num(cfg.beta_grid[bi]), num(cfg.delta_grid[di]),
                                    std::to_string(r), num(a_vals[slot]),
                                    std::to_string(static_cast<int>(b_vals[slot]))});
            }

    for (std::size_t di = 0; di < nd; ++di) {
        std::vector<MeanSe> a_ms(nb), b_ms(nb);
        for (std::size_t bi = 0; bi < nb; ++bi) {
            std::vector<double> a(nr), b(nr);
            for (std::size_t r = 0; r < nr; ++r) {
                a[r] = a_vals[(bi * nr + r) * nd + di];
                b[r] = b_vals[(bi * nr + r) * nd + di];
            }
            a_ms[bi] = mean_se(a);
            b_ms[bi] = mean_se(b);
            out.estimates.push_back({{"beta", cfg.beta_grid[bi]},
                                     {"delta", cfg.delta_grid[di]},
                                     {"a_mass_mean", a_ms[bi].mean},
                                     {"a_mass_se", a_ms[bi].se},
                                     {"b_fraction", b_ms[bi].mean},
                                     {"b_fraction_se", b_ms[bi].se}});
        }
        double worst_a = -std::numeric_limits<double>::infinity();
        double worst_b = worst_a;
        bool a_ok = true, b_ok = true;
        for (std::size_t bi = 1; bi < nb; ++bi) {
            const double slack_a = 3.0 * std::hypot(a_ms[bi - 1].se, a_ms[bi].se);
            const double slack_b = 3.0 * std::hypot(b_ms[bi - 1].se, b_ms[bi].se);
            worst_a = std::max(worst_a, a_ms[bi].mean - a_ms[bi - 1].mean - slack_a);
            worst_b = std::max(worst_b, b_ms[bi].mean - b_ms[bi - 1].mean - slack_b);
            a_ok = a_ok && a_ms[bi].mean <= a_ms[bi - 1].mean + slack_a;
            b_ok = b_ok && b_ms[bi].mean <= b_ms[bi - 1].mean + slack_b;
        }
        const std::string tag = "[delta=" + short_num(cfg.delta_grid[di]) + "]";
        if (nb > 1) {
            out.assertions.push_back(make_assertion("a_mass_monotone" + tag, a_ok, worst_a, 0.0));
            out.assertions.push_back(make_assertion("b_fraction_monotone" + tag, b_ok, worst_b, 0.0));
        }
    }
    return out;
}

KindResult run_ball_cover(const ExperimentConfig& cfg, const ExactBudget& budget) {
    const auto model = cfg.model.build();
    const std::size_t nb = cfg.beta_grid.size();
    const std::size_t nd = cfg.delta_grid.size();
    const auto nr = static_cast<std::size_t>(cfg.replicas);
    struct Cell {
        double frac = 0.0, se = 0.0;
        int centers = 0;
    };
    std::vector<Cell> cells(nb * nr * nd);
    detail::parallel_for(nb * nr, [&](std::size_t j) {
        const double beta = cfg.beta_grid[j / nr];
        const auto r = static_cast<std::uint32_t>(j % nr);
        const auto env = sample_environment(model, cfg.seed, r);
        const ExactGibbs gibbs(model, env, beta, budget);
        SamplerConfig sampler;
        sampler.seed = cfg.seed;
        sampler.replica_id = r;
        sampler.mcmc = cfg.mcmc;
        for (std::size_t di = 0; di < nd; ++di) {
            const auto rep =
                ball_cover(gibbs, sampler, cfg.cover_k, cfg.delta_grid[di], cfg.cover_eval_samples);
            cells[j * nd + di] = {rep.covered_fraction, rep.se, rep.k};
        }
    });

    KindResult out;
    out.header = {"beta", "delta", "replica", "covered_fraction", "covered_se", "centers"};
    for (std::size_t bi = 0; bi < nb; ++bi) {
        double worst = -std::numeric_limits<double>::infinity();
        bool monotone = true;
        for (std::size_t di = 0; di < nd; ++di) {
            std::vector<double> fr(nr);
            for (std::size_t r = 0; r < nr; ++r) {
                const auto& c = cells[(bi * nr + r) * nd + di];
                fr[r] = c.frac;
                out.rows.push_back({num(cfg.beta_grid[bi]), num(cfg.delta_grid[di]),
                                    std::to_string(r), num(c.frac), num(c.se),
                                    std::to_string(c.centers)});
                if (di > 0) {
                    const double prev = cells[(bi * nr + r) * nd + di - 1].frac;
                    worst = std::max(worst, c.frac - prev);
                    monotone = monotone && c.frac <= prev + 1e-12;
                }
            }
            const auto ms = mean_se(fr);
            out.estimates.push_back({{"beta", cfg.beta_grid[bi]},
                                     {"delta", cfg.delta_grid[di]},
                                     {"covered_fraction_mean", ms.mean},
                                     {"covered_fraction_se", ms.se}});
        }
        if (nd > 1)
            out.assertions.push_back(
                make_assertion("coverage_monotone_in_delta[beta=" + short_num(cfg.beta_grid[bi]) + "]",
                               monotone, worst, 1e-12));
    }
    return out;
}

KindResult run_ou_variance(const ExperimentConfig& cfg, const ExactBudget& budget) {
    const auto model = cfg.model.build();
    const std::size_t nb = cfg.beta_grid.size();
    const std::size_t nt = cfg.time_grid.size();
    std::vector<OuVarianceReport> reports(nb * nt);
    detail::parallel_for(reports.size(), [&](std::size_t j) {
        reports[j] = ou_variance_experiment(model, cfg.beta_grid[j / nt], cfg.time_grid[j % nt],
                                            cfg.replicas, cfg.seed, budget);
    });

    KindResult out;
    out.header = {"beta",           "T",      "t",
                  "lhs",            "lhs_se", "rhs",
                  "rhs_se",         "stationary_mean", "stationary_mean_se",
                  "refinement_shift", "refinement_ok", "satisfied"};
    for (std::size_t j = 0; j < reports.size(); ++j) {
        const double beta = cfg.beta_grid[j / nt];
        const double T = cfg.time_grid[j % nt];
        const auto& rep = reports[j];
        out.rows.push_back({num(beta), num(T), num(rep.time_horizon), num(rep.lhs), num(rep.lhs_se),
                            num(rep.rhs), num(rep.rhs_se), num(rep.stationary_mean),
                            num(rep.stationary_mean_se), num(rep.refinement_shift),
                            rep.refinement_ok ? "1" : "0", rep.satisfied ? "1" : "0"});
        const std::string tag = "[beta=" + short_num(beta) + ",T=" + short_num(T) + "]";
        out.assertions.push_back(make_assertion("variance_bound" + tag, rep.satisfied, rep.lhs,
                                                rep.rhs + 3.0 * std::hypot(rep.lhs_se, rep.rhs_se)));
        out.assertions.push_back(make_assertion(
            "stationary_mean" + tag,
            std::abs(rep.stationary_mean) <= 3.0 * rep.stationary_mean_se,
            std::abs(rep.stationary_mean), 3.0 * rep.stationary_mean_se));
        if (j == 0)
            out.assertions.push_back(make_assertion("quadrature_refinement", rep.refinement_ok,
                                                    rep.refinement_shift, rep.lhs_se));
        out.estimates.push_back({{"beta", beta},
                                 {"T", T},
                                 {"lhs", rep.lhs},
                                 {"rhs", rep.rhs},
                                 {"stationary_mean", rep.stationary_mean}});
    }
    return out;
}

KindResult run_temperature_equivalence(const ExperimentConfig& cfg, const ExactBudget& budget) {
    const auto model = cfg.model.build();
    std::vector<EquivalenceReport> reports(cfg.beta_grid.size());
    detail::parallel_for(reports.size(), [&](std::size_t j) {
        reports[j] = temperature_equivalence_test(model, cfg.beta_grid[j], cfg.perturbation_k,
                                                  cfg.replicas, cfg.seed, budget);
    });

    KindResult out;
    out.header = {"beta",       "k",         "beta_matched", "free_energy_ks",
                  "free_energy_p", "overlap_ks", "overlap_p"};
    for (std::size_t j = 0; j < reports.size(); ++j) {
        const auto& rep = reports[j];
        out.rows.push_back({num(rep.beta_base), std::to_string(rep.k), num(rep.beta_matched),
                            num(rep.free_energy.statistic), num(rep.free_energy.p_value),
                            num(rep.overlap.statistic), num(rep.overlap.p_value)});
        const std::string tag = "[beta=" + short_num(rep.beta_base) + "]";
        out.assertions.push_back(make_assertion("ks_free_energy" + tag,
                                                rep.free_energy.p_value > 0.01,
                                                rep.free_energy.p_value, 0.01));
        out.assertions.push_back(make_assertion("ks_overlap" + tag, rep.overlap.p_value > 0.01,
                                                rep.overlap.p_value, 0.01));
        out.estimates.push_back({{"beta", rep.beta_base},
                                 {"beta_matched", rep.beta_matched},
                                 {"free_energy_p", rep.free_energy.p_value},
                                 {"overlap_p", rep.overlap.p_value}});
    }
    return out;
}

KindResult run_atom_decay(const ExperimentConfig& cfg) {
    KindResult out;
    out.header = {"beta", "n", "replica", "passage", "max_atom", "n_times_atom", "argmax_turns"};
    for (const double beta : cfg.beta_grid) {
        const auto scan = atom_decay_scan(cfg.model.dim, beta, cfg.n_grid, cfg.replicas,
                                          cfg.env_dist, cfg.seed);
        for (const auto& row : scan.rows)
            out.rows.push_back({num(beta), std::to_string(row.n), std::to_string(row.replica),
                                num(row.passage), num(row.max_atom), num(row.n_times_atom),
                                std::to_string(row.argmax_turns)});
        const std::string tag = "[beta=" + short_num(beta) + "]";
        bool decreasing = true;
        double worst_step = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < scan.aggregates.size(); ++i) {
            const double step =
                scan.aggregates[i].max_atom_q.median - scan.aggregates[i - 1].max_atom_q.median;
            worst_step = std::max(worst_step, step);
            decreasing = decreasing && step < 0.0;
        }
        if (scan.aggregates.size() > 1) {
            out.assertions.push_back(
                make_assertion("median_atom_decreasing" + tag, decreasing, worst_step, 0.0));
            const double first = scan.aggregates.front().n_times_atom_q.median;
            const double last = scan.aggregates.back().n_times_atom_q.median;
            const double ratio = first > 0.0 ? last / first : 0.0;
            out.assertions.push_back(
                make_assertion("scaled_atom_bounded" + tag, ratio <= 2.0, ratio, 2.0));
        }
        for (const auto& agg : scan.aggregates)
            out.estimates.push_back({{"beta", beta},
                                     {"n", agg.n},
                                     {"max_atom_median", agg.max_atom_q.median},
                                     {"max_atom_q25", agg.max_atom_q.q25},
                                     {"max_atom_q75", agg.max_atom_q.q75},
                                     {"n_times_atom_median", agg.n_times_atom_q.median},
                                     {"mean_passage_over_n", agg.mean_passage_over_n}});
        out.estimates.push_back({{"beta", beta},
                                 {"lambda_hat", scan.lambda_hat},
                                 {"env_mean", scan.env_mean},
                                 {"lambda_exceeds_env_mean", scan.lambda_hat > scan.env_mean}});
    }
    return out;
}

KindResult run_turn_census(const ExperimentConfig& cfg) {
    using boost::multiprecision::cpp_int;
    KindResult out;
    out.header = {"n", "j", "count"};
    const int d = cfg.model.dim;
    for (const int n : cfg.n_grid) {
        const auto counts = count_paths_by_turns(n, d);
        cpp_int total = 0;
        for (std::size_t j = 0; j < counts.size(); ++j) {
            total += counts[j];
            out.rows.push_back({std::to_string(n), std::to_string(j), counts[j].str()});
        }
        cpp_int expected = 1;
        for (int i = 0; i < n; ++i) expected *= 2 * d;
        const bool ok = total == expected;
        out.assertions.push_back(make_assertion("turn_total[n=" + std::to_string(n) + "]", ok,
                                                static_cast<double>(total - expected), 0.0));
        out.estimates.push_back(
            {{"n", n}, {"total", total.str()}, {"expected", expected.str()}});
    }
    return out;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::IdentityCheck: return "identity_check";
        case ExperimentKind::Moments: return "moments";
        case ExperimentKind::LocalizationScan: return "localization_scan";
        case ExperimentKind::BallCover: return "ball_cover";
        case ExperimentKind::OuVariance: return "ou_variance";
        case ExperimentKind::TemperatureEquivalence: return "temperature_equivalence";
        case ExperimentKind::AtomDecay: return "atom_decay";
        case ExperimentKind::TurnCensus: return "turn_census";
    }
    throw ValidationError("experiment: unknown kind");
}

ExperimentKind parse_experiment_kind(std::string_view text) {
    for (const auto kind :
         {ExperimentKind::IdentityCheck, ExperimentKind::Moments, ExperimentKind::LocalizationScan,
          ExperimentKind::BallCover, ExperimentKind::OuVariance,
          ExperimentKind::TemperatureEquivalence, ExperimentKind::AtomDecay,
          ExperimentKind::TurnCensus})
        if (text == to_string(kind)) return kind;
    fail("experiment", "unknown kind '" + std::string(text) + "'");
}

ModelSpec ModelConfig::build_with_n(int system_size) const {
    if (system_size < 1) fail("model.n", "must be at least 1");
    if (kind == "rem") return ModelSpec::rem(system_size);
    if (kind == "p_spin") {
        if (couplings.empty()) fail("model.couplings", "required for p_spin");
        return ModelSpec::p_spin(system_size, MixedXi(couplings));
    }
    if (kind == "polymer")
        return ModelSpec::polymer(system_size, WalkKernel::simple_random_walk(dim), endpoint);
    fail("model.kind", "must be rem, p_spin, or polymer");
}

void ExperimentConfig::validate() const {
    if (replicas < 1) fail("replicas", "must be at least 1");
    const bool sweeps_n =
        experiment == ExperimentKind::AtomDecay || experiment == ExperimentKind::TurnCensus;

    if (experiment != ExperimentKind::TurnCensus) {
        if (beta_grid.empty()) fail("beta_grid", "must be non-empty");
        for (std::size_t i = 0; i < beta_grid.size(); ++i)
            if (!(beta_grid[i] >= 0.0))
                fail("beta_grid[" + std::to_string(i) + "]", "must be nonnegative");
    }
    if (experiment == ExperimentKind::LocalizationScan || experiment == ExperimentKind::BallCover) {
        if (delta_grid.empty()) fail("delta_grid", "must be non-empty");
        for (std::size_t i = 0; i < delta_grid.size(); ++i)
            if (!(delta_grid[i] >= 0.0 && delta_grid[i] <= 1.0))
                fail("delta_grid[" + std::to_string(i) + "]", "must lie in [0, 1]");
        require_increasing(delta_grid, "delta_grid");
    }
    if (experiment == ExperimentKind::LocalizationScan)
        require_increasing(beta_grid, "beta_grid");
    if (experiment == ExperimentKind::OuVariance) {
        if (time_grid.empty()) fail("time_grid", "must be non-empty");
        for (std::size_t i = 0; i < time_grid.size(); ++i)
            if (!(time_grid[i] > 0.0))
                fail("time_grid[" + std::to_string(i) + "]", "must be positive");
    }
    if (sweeps_n) {
        if (model.kind != "polymer") fail("model.kind", "must be polymer for this experiment");
        if (n_grid.empty()) fail("n_grid", "must be non-empty");
        for (std::size_t i = 0; i < n_grid.size(); ++i) {
            if (n_grid[i] < 1) fail("n_grid[" + std::to_string(i) + "]", "must be at least 1");
            if (i > 0 && n_grid[i] <= n_grid[i - 1]) fail("n_grid", "must be strictly increasing");
        }
    } else if (model.n < 1) {
        fail("model.n", "must be at least 1");
    }
    if (model.dim < 1 || model.dim > 3) fail("model.dim", "must be 1, 2, or 3");
    if (model.kind == "p_spin" && model.couplings.empty())
        fail("model.couplings", "required for p_spin");
    if (experiment == ExperimentKind::BallCover) {
        if (cover_k < 1) fail("cover_k", "must be at least 1");
        if (model.kind == "p_spin" && !mcmc)
            fail("mcmc", "required to sample the spin mixture model");
    }
    if (experiment == ExperimentKind::TemperatureEquivalence && perturbation_k < 1)
        fail("k", "must be at least 1");
}

std::string ExperimentConfig::canonical_text() const {
    json j;
    j["experiment"] = to_string(experiment);
    json m;
    m["kind"] = model.kind;
    m["n"] = model.n;
    m["dim"] = model.dim;
    if (!model.couplings.empty()) {
        json c;
        for (const auto& [p, b] : model.couplings) c[std::to_string(p)] = b;
        m["couplings"] = c;
    }
    if (model.endpoint) {
        json e = json::array();
        for (int a = 0; a < model.dim; ++a) e.push_back((*model.endpoint)[static_cast<std::size_t>(a)]);
        m["endpoint"] = e;
    }
    j["model"] = m;
    j["beta_grid"] = beta_grid;
    j["delta_grid"] = delta_grid;
    j["time_grid"] = time_grid;
    j["n_grid"] = n_grid;
    j["replicas"] = replicas;
    j["seed"] = seed;
    if (budget)
        j["budget"] = {{"rem_max_n", budget->rem_max_n},
                       {"pspin_max_n", budget->pspin_max_n},
                       {"polymer_max_n", budget->polymer_max_n},
                       {"polymer_max_dim", budget->polymer_max_dim}};
    j["cover_k"] = cover_k;
    j["cover_eval_samples"] = cover_eval_samples;
    if (mcmc)
        j["mcmc"] = {{"burn_in_sweeps", mcmc->burn_in_sweeps},
                     {"sweeps_per_sample", mcmc->sweeps_per_sample}};
    j["k"] = perturbation_k;
    j["env"] = to_string(env_dist);
    return j.dump();
}

std::uint64_t ExperimentConfig::hash() const {
    const std::string text = canonical_text();
    return fnv1a_hash(std::span<const char>(text.data(), text.size()));
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config parse: ") + e.what());
    }
    if (!j.is_object()) fail("config", "expected a JSON object");
    expect_keys(j, "config",
                {"experiment", "model", "beta_grid", "delta_grid", "time_grid", "n_grid",
                 "replicas", "seed", "output", "budget", "cover_k", "cover_eval_samples", "mcmc",
                 "k", "env"});

    ExperimentConfig cfg;
    cfg.experiment =
        parse_experiment_kind(as_string(require_field(j, "config", "experiment"), "experiment"));
    cfg.model = parse_model_block(require_field(j, "config", "model"));

    if (const auto it = j.find("beta_grid"); it != j.end())
        cfg.beta_grid = as_double_grid(*it, "beta_grid");
    if (const auto it = j.find("delta_grid"); it != j.end())
        cfg.delta_grid = as_double_grid(*it, "delta_grid");
    if (const auto it = j.find("time_grid"); it != j.end())
        cfg.time_grid = as_double_grid(*it, "time_grid");
    if (const auto it = j.find("n_grid"); it != j.end()) cfg.n_grid = as_int_grid(*it, "n_grid");

    if (const auto it = j.find("replicas"); it != j.end())
        cfg.replicas = static_cast<int>(as_int(*it, "replicas"));

    const auto& seed = require_field(j, "config", "seed");
    if (!seed.is_number_integer() && !seed.is_number_unsigned())
        fail("seed", "expected an integer (wall-clock seeding is not supported)");
    cfg.seed = seed.get<std::uint64_t>();

    if (const auto it = j.find("output"); it != j.end()) cfg.output_dir = as_string(*it, "output");

    if (const auto it = j.find("budget"); it != j.end()) {
        if (!it->is_object()) fail("budget", "expected an object");
        expect_keys(*it, "budget", {"rem_max_n", "pspin_max_n", "polymer_max_n", "polymer_max_dim"});
        ExactBudget b;
        if (const auto f = it->find("rem_max_n"); f != it->end())
            b.rem_max_n = static_cast<int>(as_int(*f, "budget.rem_max_n"));
        if (const auto f = it->find("pspin_max_n"); f != it->end())
            b.pspin_max_n = static_cast<int>(as_int(*f, "budget.pspin_max_n"));
        if (const auto f = it->find("polymer_max_n"); f != it->end())
            b.polymer_max_n = static_cast<int>(as_int(*f, "budget.polymer_max_n"));
        if (const auto f = it->find("polymer_max_dim"); f != it->end())
            b.polymer_max_dim = static_cast<int>(as_int(*f, "budget.polymer_max_dim"));
        cfg.budget = b;
    }

    if (const auto it = j.find("cover_k"); it != j.end())
        cfg.cover_k = static_cast<int>(as_int(*it, "cover_k"));
    if (const auto it = j.find("cover_eval_samples"); it != j.end())
        cfg.cover_eval_samples = static_cast<std::uint64_t>(as_int(*it, "cover_eval_samples"));

    if (const auto it = j.find("mcmc"); it != j.end()) {
        if (!it->is_object()) fail("mcmc", "expected an object");
        expect_keys(*it, "mcmc", {"burn_in_sweeps", "sweeps_per_sample"});
        McmcParams p;
        if (const auto f = it->find("burn_in_sweeps"); f != it->end())
            p.burn_in_sweeps = static_cast<std::uint64_t>(as_int(*f, "mcmc.burn_in_sweeps"));
        if (const auto f = it->find("sweeps_per_sample"); f != it->end())
            p.sweeps_per_sample = static_cast<std::uint64_t>(as_int(*f, "mcmc.sweeps_per_sample"));
        cfg.mcmc = p;
    }

    if (const auto it = j.find("k"); it != j.end())
        cfg.perturbation_k = static_cast<int>(as_int(*it, "k"));

    if (const auto it = j.find("env"); it != j.end()) {
        const auto text = as_string(*it, "env");
        if (text == "gaussian")
            cfg.env_dist = EnvKind::Gaussian;
        else if (text == "bounded_uniform")
            cfg.env_dist = EnvKind::BoundedUniform;
        else
            fail("env", "must be gaussian or bounded_uniform");
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config(buf.str());
}

ExperimentConfig apply_overrides(ExperimentConfig cfg, const FlagOverrides& flags) {
    if (flags.seed && *flags.seed != cfg.seed) {
        std::fprintf(stderr, "flag wins: seed %llu -> %llu\n",
                     static_cast<unsigned long long>(cfg.seed),
                     static_cast<unsigned long long>(*flags.seed));
        cfg.seed = *flags.seed;
    }
    if (flags.replicas && *flags.replicas != cfg.replicas) {
        std::fprintf(stderr, "flag wins: replicas %d -> %d\n", cfg.replicas, *flags.replicas);
        cfg.replicas = *flags.replicas;
    }
    if (flags.output_dir && *flags.output_dir != cfg.output_dir) {
        std::fprintf(stderr, "flag wins: output %s -> %s\n", cfg.output_dir.c_str(),
                     flags.output_dir->c_str());
        cfg.output_dir = *flags.output_dir;
    }
    cfg.validate();
    return cfg;
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.budget)
        std::fprintf(stderr, "budget override active; largest table estimate %.1f MiB\n",
                     estimate_table_mib(cfg));
    const ExactBudget budget = cfg.budget.value_or(ExactBudget{});

    KindResult kr;
    switch (cfg.experiment) {
        case ExperimentKind::IdentityCheck: kr = run_identity(cfg, budget); break;
        case ExperimentKind::Moments: kr = run_moments(cfg, budget); break;
        case ExperimentKind::LocalizationScan: kr = run_localization(cfg, budget); break;
        case ExperimentKind::BallCover: kr = run_ball_cover(cfg, budget); break;
        case ExperimentKind::OuVariance: kr = run_ou_variance(cfg, budget); break;
        case ExperimentKind::TemperatureEquivalence:
            kr = run_temperature_equivalence(cfg, budget);
            break;
        case ExperimentKind::AtomDecay: kr = run_atom_decay(cfg); break;
        case ExperimentKind::TurnCensus: kr = run_turn_census(cfg); break;
    }

    ExperimentOutcome out;
    out.config_hash = cfg.hash();
    out.assertions = kr.assertions;
    out.pass = std::all_of(kr.assertions.begin(), kr.assertions.end(),
                           [](const Assertion& a) { return a.pass; });

    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    const std::string hex = hash_hex(out.config_hash);

    const fs::path csv_path = dir / "rows.csv";
    {
        std::ofstream csv(csv_path);
        if (!csv) throw ValidationError("output: cannot write " + csv_path.string());
        csv << "config_hash";
        for (const auto& h : kr.header) csv << "," << h;
        csv << "\n";
        for (const auto& row : kr.rows) {
            csv << hex;
            for (const auto& cell : row) csv << "," << cell;
            csv << "\n";
        }
    }
    out.csv_path = csv_path.string();

    const fs::path summary_path = dir / "summary.json";
    {
        json s;
        s["experiment"] = to_string(cfg.experiment);
        s["config"] = json::parse(cfg.canonical_text());
        s["config_hash"] = hex;
        s["artifact_version"] = kArtifactVersion;
        s["generated_at"] = iso_timestamp();
        s["estimates"] = kr.estimates;
        json asserts = json::array();
        for (const auto& a : kr.assertions)
            asserts.push_back(
                {{"name", a.name}, {"pass", a.pass}, {"observed", a.observed}, {"bound", a.bound}});
        s["assertions"] = asserts;
        s["pass"] = out.pass;
        std::ofstream summary(summary_path);
        if (!summary) throw ValidationError("output: cannot write " + summary_path.string());
        summary << s.dump(2) << "\n";
    }
    out.summary_path = summary_path.string();
    return out;
}

std::string emit_summary(const std::string& results_dir) {
    const fs::path dir(results_dir);
    if (!fs::is_directory(dir))
        throw ValidationError("results: '" + results_dir + "' is not a directory");
    std::vector<fs::path> inputs;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().filename() == "rows.csv")
            inputs.push_back(entry.path());
    if (inputs.empty()) throw ValidationError("results: no rows.csv found under " + results_dir);
    std::sort(inputs.begin(), inputs.end());

    std::string header;
    std::vector<std::string> lines;
    for (const auto& p : inputs) {
        std::ifstream in(p);
        if (!in) throw ValidationError("results: cannot read " + p.string());
        std::string line;
        if (!std::getline(in, line)) throw ValidationError("results: empty file " + p.string());
        if (header.empty())
            header = line;
        else if (line != header)
            throw ValidationError("results: mixed experiment schemas under " + results_dir);
        while (std::getline(in, line))
            if (!line.empty()) lines.push_back(line);
    }

    const fs::path out_path = dir / "summary_long.csv";
    std::ofstream out(out_path);
    if (!out) throw ValidationError("results: cannot write " + out_path.string());
    out << header << "\n";
    for (const auto& line : lines) out << line << "\n";
    return out_path.string();
}

}  // namespace gibbslab
