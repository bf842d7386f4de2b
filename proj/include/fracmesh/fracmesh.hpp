#pragma once

#include "fracmesh/weights.hpp"
#include "fracmesh/mollify.hpp"
#include "fracmesh/mesh.hpp"
#include "fracmesh/fracop.hpp"
#include "fracmesh/assembly.hpp"
#include "fracmesh/cn_solver.hpp"
#include "fracmesh/harness.hpp"
