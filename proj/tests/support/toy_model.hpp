#pragma once

// Small, fast model contexts for tuning/pipeline tests.

#include "lsfqr/model.hpp"
#include "lsfqr/simulation.hpp"

namespace lsfqr::testing {

inline Scenario toy_scenario(std::uint64_t seed, Index n = 60) {
    Scenario sc;
    sc.n = n;
    sc.m = 41;
    sc.K = 4;
    sc.T = 1.0;
    sc.beta_loc = {0.3, 0.2, 3.0};
    sc.beta_scale = {0.65, 0.15, 1.0};
    sc.alpha_star = Vector::Zero(2);
    sc.alpha_star << 1.0, 0.5;
    sc.seed = seed;
    return sc;
}

inline ModelSettings toy_settings() {
    ModelSettings ms;
    ms.n_t = 5;
    ms.n_u_cells = 2;
    ms.degree = 2;
    ms.smoothness = 1;
    ms.n_b = 4;
    ms.order = 3;
    ms.quad_subdiv = 2;
    return ms;
}

inline ModelContext toy_context(std::uint64_t seed, Index n = 60, int n_levels = 5) {
    SimulatedData sim = gen_response(toy_scenario(seed, n));
    return build_model_context(std::move(sim.dataset),
                               make_quantile_grid(n_levels, {0.1, 0.9}), toy_settings());
}

}  // namespace lsfqr::testing
