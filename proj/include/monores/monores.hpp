#pragma once

// Umbrella header: directed circuits with the monomial conductance law,
// two-pole solvers, effective-resistance quasi-metrics, classical limit
// oracles, and the multi-pole balanced-flow algorithm.

#include "monores/balanced.hpp"
#include "monores/core.hpp"
#include "monores/dissipation.hpp"
#include "monores/generate.hpp"
#include "monores/io.hpp"
#include "monores/limits.hpp"
#include "monores/oracles.hpp"
#include "monores/resistance.hpp"
#include "monores/rng.hpp"
#include "monores/solver.hpp"
