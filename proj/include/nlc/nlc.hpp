#ifndef NLC_NLC_HPP
#define NLC_NLC_HPP

#include "nlc/config.hpp"
#include "nlc/continuity.hpp"
#include "nlc/diagnostics.hpp"
#include "nlc/director.hpp"
#include "nlc/galerkin.hpp"
#include "nlc/grid.hpp"
#include "nlc/initial_data.hpp"
#include "nlc/io.hpp"
#include "nlc/linear_solvers.hpp"
#include "nlc/momentum.hpp"
#include "nlc/operators.hpp"
#include "nlc/penalty.hpp"
#include "nlc/simulation.hpp"

#endif  // NLC_NLC_HPP
