#pragma once

#include "fuzzyclust/common.hpp"
#include "fuzzyclust/dense.hpp"
#include "fuzzyclust/generator.hpp"
#include "fuzzyclust/graph.hpp"
#include "fuzzyclust/membership.hpp"
#include "fuzzyclust/objective.hpp"
#include "fuzzyclust/parallel.hpp"
#include "fuzzyclust/rng.hpp"
#include "fuzzyclust/secondorder.hpp"
#include "fuzzyclust/simplex.hpp"
#include "fuzzyclust/solver.hpp"
#include "fuzzyclust/sparse.hpp"
