#pragma once

// Umbrella header for the whole library.

#include "orlicz/allocation.hpp"
#include "orlicz/combinatorics.hpp"
#include "orlicz/constants.hpp"
#include "orlicz/construction.hpp"
#include "orlicz/dual.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/norms.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/piecewise_affine.hpp"
#include "orlicz/profile.hpp"
#include "orlicz/quadrature.hpp"
#include "orlicz/rng.hpp"
#include "orlicz/rootfind.hpp"
#include "orlicz/weights.hpp"
