#pragma once

// Locally sparse simultaneous functional quantile regression: bivariate
// Bernstein splines on a triangulation, adaptive group-LASSO sparsity at
// the triangle level, and cross-validated tuning.

#include "lsfqr/bernstein.hpp"
#include "lsfqr/bspline.hpp"
#include "lsfqr/config.hpp"
#include "lsfqr/csv.hpp"
#include "lsfqr/dataset.hpp"
#include "lsfqr/design.hpp"
#include "lsfqr/mesh.hpp"
#include "lsfqr/model.hpp"
#include "lsfqr/penalties.hpp"
#include "lsfqr/pipeline.hpp"
#include "lsfqr/prox.hpp"
#include "lsfqr/quadrature.hpp"
#include "lsfqr/rng.hpp"
#include "lsfqr/simulation.hpp"
#include "lsfqr/solver.hpp"
#include "lsfqr/tuning.hpp"
