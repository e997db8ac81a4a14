#pragma once

#include <msp/banded_matrix.hpp>
#include <msp/block_system.hpp>
#include <msp/chebyshev.hpp>
#include <msp/cholesky.hpp>
#include <msp/dense_matrix.hpp>
#include <msp/eigensolver.hpp>
#include <msp/errors.hpp>
#include <msp/experiments.hpp>
#include <msp/fem.hpp>
#include <msp/matrix_market.hpp>
#include <msp/mesh.hpp>
#include <msp/minres.hpp>
#include <msp/preconditioners.hpp>
#include <msp/problems.hpp>
#include <msp/rng.hpp>
#include <msp/schur_approx.hpp>
#include <msp/serialization.hpp>
#include <msp/util.hpp>
