#pragma once

// Propagation kernels: graph similarity from locality-sensitive hashes of
// diffusing node-label and node-attribute distributions, for labeled,
// partially labeled, directed, attributed, and grid-structured graphs.

#include "attributes.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "graph.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "kernel.hpp"
#include "lsh.hpp"
#include "matrix.hpp"
#include "propagation.hpp"
#include "random.hpp"
