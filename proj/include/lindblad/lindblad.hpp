#pragma once

#include "lindblad/complex_matrix.hpp"
#include "lindblad/config.hpp"
#include "lindblad/cutoffs.hpp"
#include "lindblad/dynamics.hpp"
#include "lindblad/eigen.hpp"
#include "lindblad/expm.hpp"
#include "lindblad/fit.hpp"
#include "lindblad/lattice.hpp"
#include "lindblad/lightcone.hpp"
#include "lindblad/model.hpp"
#include "lindblad/report_io.hpp"
#include "lindblad/rng.hpp"
#include "lindblad/scenario.hpp"
#include "lindblad/superop.hpp"
#include "lindblad/svg_plot.hpp"
#include "lindblad/tolerances.hpp"
