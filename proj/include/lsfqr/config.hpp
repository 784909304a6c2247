#pragma once

#include "lsfqr/model.hpp"
#include "lsfqr/simulation.hpp"
#include "lsfqr/tuning.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>

namespace lsfqr {

using Json = nlohmann::json;

enum class FitProtocol { None, Initial, Sparse, Tuned };

struct SimulateConfig {
    Scenario scenario;
    int replicates = 1;
    FitProtocol fit = FitProtocol::Tuned;
    bool write_datasets = false;
};

/// One parsed configuration file; sections unused by a command are ignored.
struct RunConfig {
    // data
    std::string curves_path, scalars_path, response_path;
    // model
    ModelSettings model;
    int n_quantiles = 9;
    Interval u_range{0.05, 0.95};
    // fixed-penalty fit
    double lambda = 1e-4;
    double lambda1 = 1e-4;
    double lambda2 = 1e-3;
    PenaltyOption option = PenaltyOption::Option1;
    double a_w = 1.0;
    // tuning
    TuningPlan plan;
    // solver
    SolveOptions solve;
    // run control
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out_dir = "out";
    bool dump_constraints = false;
    // simulate
    SimulateConfig simulate;
};

namespace detail {

template <typename T>
T get_or(const Json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        LSFQR_THROW(ConfigError, "bad value for '" + key + "': " + e.what());
    }
}

inline PenaltyOption parse_option(int v) {
    LSFQR_REQUIRE(ConfigError, v == 1 || v == 2, "penalty option must be 1 or 2");
    return v == 1 ? PenaltyOption::Option1 : PenaltyOption::Option2;
}

inline Bump parse_bump(const Json& j) {
    Bump b;
    b.center = get_or(j, "center", b.center);
    b.halfwidth = get_or(j, "halfwidth", b.halfwidth);
    b.amplitude = get_or(j, "amplitude", b.amplitude);
    return b;
}

inline FitProtocol parse_protocol(const std::string& s) {
    if (s == "none") return FitProtocol::None;
    if (s == "initial") return FitProtocol::Initial;
    if (s == "sparse") return FitProtocol::Sparse;
    if (s == "tuned") return FitProtocol::Tuned;
    LSFQR_THROW(ConfigError, "unknown fit protocol '" + s + "'");
}

}  // namespace detail

inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    LSFQR_REQUIRE(ConfigError, static_cast<bool>(in), "cannot open config '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        LSFQR_THROW(ConfigError, path + ": " + e.what());
    }

    RunConfig cfg;
    using detail::get_or;
    if (j.contains("data")) {
        const auto& d = j["data"];
        cfg.curves_path = get_or<std::string>(d, "curves", "");
        cfg.scalars_path = get_or<std::string>(d, "scalars", "");
        cfg.response_path = get_or<std::string>(d, "response", "");
    }
    if (j.contains("mesh")) {
        const auto& m = j["mesh"];
        cfg.model.n_t = get_or(m, "n_t", cfg.model.n_t);
        cfg.model.n_u_cells = get_or(m, "n_u_cells", cfg.model.n_u_cells);
    }
    if (j.contains("basis")) {
        const auto& b = j["basis"];
        cfg.model.degree = get_or(b, "degree", cfg.model.degree);
        cfg.model.smoothness = get_or(b, "smoothness", cfg.model.smoothness);
    }
    if (j.contains("alpha_basis")) {
        const auto& b = j["alpha_basis"];
        cfg.model.n_b = get_or(b, "n_b", cfg.model.n_b);
        cfg.model.order = get_or(b, "order", cfg.model.order);
    }
    cfg.model.quad_subdiv = get_or(j, "quad_subdiv", cfg.model.quad_subdiv);
    if (j.contains("quantiles")) {
        const auto& q = j["quantiles"];
        cfg.n_quantiles = get_or(q, "count", cfg.n_quantiles);
        cfg.u_range.lo = get_or(q, "min", cfg.u_range.lo);
        cfg.u_range.hi = get_or(q, "max", cfg.u_range.hi);
    }
    if (j.contains("penalty")) {
        const auto& p = j["penalty"];
        cfg.lambda = get_or(p, "lambda", cfg.lambda);
        cfg.lambda1 = get_or(p, "lambda1", cfg.lambda1);
        cfg.lambda2 = get_or(p, "lambda2", cfg.lambda2);
        cfg.option = detail::parse_option(get_or(p, "option", 1));
        cfg.a_w = get_or(p, "a_w", cfg.a_w);
    }
    if (j.contains("tuning")) {
        const auto& t = j["tuning"];
        cfg.plan.lambda_grid =
            get_or<std::vector<double>>(t, "lambda_grid", {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1});
        cfg.plan.lambda1_grid =
            get_or<std::vector<double>>(t, "lambda1_grid", {1e-6, 1e-5, 1e-4});
        cfg.plan.lambda2_grid =
            get_or<std::vector<double>>(t, "lambda2_grid", {1e-4, 1e-3, 1e-2});
        cfg.plan.folds = get_or(t, "folds", 10);
        LSFQR_REQUIRE(ConfigError, cfg.plan.folds >= 2, "need at least 2 folds");
        LSFQR_REQUIRE(ConfigError,
                      !cfg.plan.lambda_grid.empty() && !cfg.plan.lambda1_grid.empty() &&
                          !cfg.plan.lambda2_grid.empty(),
                      "tuning grids must be nonempty");
    } else {
        cfg.plan.lambda_grid = {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1};
        cfg.plan.lambda1_grid = {1e-6, 1e-5, 1e-4};
        cfg.plan.lambda2_grid = {1e-4, 1e-3, 1e-2};
    }
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        cfg.solve.tol = get_or(s, "tol", cfg.solve.tol);
        cfg.solve.max_iter = get_or(s, "max_iter", cfg.solve.max_iter);
        LSFQR_REQUIRE(ConfigError, cfg.solve.tol > 0.0 && cfg.solve.max_iter > 0,
                      "solver tol and max_iter must be positive");
    }
    cfg.seed = get_or(j, "seed", static_cast<std::uint64_t>(1));
    cfg.workers = get_or(j, "workers", 1);
    LSFQR_REQUIRE(ConfigError, cfg.workers >= 1, "workers must be >= 1");
    cfg.out_dir = get_or<std::string>(j, "out", "out");
    cfg.dump_constraints = get_or(j, "dump_constraints", false);

    if (j.contains("simulate")) {
        const auto& s = j["simulate"];
        Scenario& sc = cfg.simulate.scenario;
        sc.n = get_or<Index>(s, "n", sc.n);
        sc.m = get_or<Index>(s, "m", sc.m);
        sc.K = get_or(s, "K", sc.K);
        sc.T = get_or(s, "T", sc.T);
        if (s.contains("beta_loc")) sc.beta_loc = detail::parse_bump(s["beta_loc"]);
        if (s.contains("beta_scale")) sc.beta_scale = detail::parse_bump(s["beta_scale"]);
        if (s.contains("alpha_star")) {
            const auto v = s["alpha_star"].get<std::vector<double>>();
            sc.alpha_star = Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
        }
        const std::string err = get_or<std::string>(s, "error", "normal");
        LSFQR_REQUIRE(ConfigError, err == "normal" || err == "t",
                      "error distribution must be 'normal' or 't'");
        sc.error = err == "t" ? ErrorDist::StudentT : ErrorDist::Normal;
        sc.t_df = get_or(s, "t_df", sc.t_df);
        sc.positivity_floor = get_or(s, "positivity_floor", sc.positivity_floor);
        sc.resample_budget = get_or(s, "resample_budget", sc.resample_budget);
        cfg.simulate.replicates = get_or(s, "replicates", 1);
        LSFQR_REQUIRE(ConfigError, cfg.simulate.replicates >= 1, "need at least one replicate");
        cfg.simulate.fit =
            detail::parse_protocol(get_or<std::string>(s, "fit", "tuned"));
        cfg.simulate.write_datasets = get_or(s, "write_datasets", false);
    }

    // basic range validation shared by every command
    LSFQR_REQUIRE(ConfigError, cfg.model.n_t >= 1 && cfg.model.n_u_cells >= 1,
                  "mesh cell counts must be >= 1");
    LSFQR_REQUIRE(ConfigError, cfg.model.degree >= cfg.model.smoothness + 1,
                  "basis degree must be at least smoothness + 1");
    LSFQR_REQUIRE(ConfigError, cfg.model.smoothness >= 0, "smoothness must be >= 0");
    LSFQR_REQUIRE(ConfigError, cfg.model.n_b >= cfg.model.order && cfg.model.order >= 1,
                  "alpha basis needs order >= 1 and n_b >= order");
    LSFQR_REQUIRE(ConfigError, cfg.n_quantiles >= 1, "need at least one quantile level");
    LSFQR_REQUIRE(ConfigError,
                  cfg.u_range.lo > 0.0 && cfg.u_range.hi < 1.0 && cfg.u_range.hi > cfg.u_range.lo,
                  "quantile range must be inside (0,1)");
    LSFQR_REQUIRE(ConfigError, cfg.lambda >= 0.0 && cfg.lambda1 >= 0.0 && cfg.lambda2 >= 0.0,
                  "penalty weights must be nonnegative");
    LSFQR_REQUIRE(ConfigError, cfg.a_w > 0.0, "adaptivity exponent must be positive");
    return cfg;
}

inline void require_data_paths(const RunConfig& cfg) {
    LSFQR_REQUIRE(ConfigError, !cfg.curves_path.empty() && !cfg.response_path.empty(),
                  "data.curves and data.response are required");
    namespace fs = std::filesystem;
    for (const std::string& p : {cfg.curves_path, cfg.scalars_path, cfg.response_path})
        if (!p.empty())
            LSFQR_REQUIRE(ConfigError, fs::exists(p), "referenced file does not exist: " + p);
}

}  // namespace lsfqr
