#pragma once

#include "span_lattice/closure.hpp"
#include "span_lattice/convergence.hpp"
#include "span_lattice/double_array.hpp"
#include "span_lattice/errors.hpp"
#include "span_lattice/lattice_expr.hpp"
#include "span_lattice/linalg.hpp"
#include "span_lattice/market_io.hpp"
#include "span_lattice/partition.hpp"
#include "span_lattice/payoff.hpp"
#include "span_lattice/scalar.hpp"
#include "span_lattice/spanning.hpp"
