#pragma once

// Optimal atom-centred basis sets for a 1D diatomic model.

#include "aobasis/error.hpp"
#include "aobasis/grid.hpp"
#include "aobasis/tridiagonal_eigen.hpp"
#include "aobasis/hermite.hpp"
#include "aobasis/reference.hpp"
#include "aobasis/galerkin.hpp"
#include "aobasis/criteria.hpp"
#include "aobasis/stiefel.hpp"
#include "aobasis/optimize.hpp"
#include "aobasis/evaluate.hpp"
