#pragma once

#include "errors.hpp"
#include "parallel.hpp"
#include "grids.hpp"
#include "smooth_step.hpp"
#include "quadrature.hpp"
#include "regression.hpp"
#include "weights.hpp"
#include "phasespace.hpp"
#include "coefficients.hpp"
#include "excision.hpp"
#include "sobolev.hpp"
#include "solver.hpp"
#include "activators.hpp"
