#pragma once

#include "stenfuse/autotune.hpp"
#include "stenfuse/bench.hpp"
#include "stenfuse/boundary.hpp"
#include "stenfuse/common.hpp"
#include "stenfuse/correlate.hpp"
#include "stenfuse/diffusion.hpp"
#include "stenfuse/engine.hpp"
#include "stenfuse/field.hpp"
#include "stenfuse/fusion.hpp"
#include "stenfuse/kernel.hpp"
#include "stenfuse/machine.hpp"
#include "stenfuse/mhd.hpp"
#include "stenfuse/oracle.hpp"
#include "stenfuse/phi.hpp"
#include "stenfuse/phi_expr.hpp"
#include "stenfuse/plan.hpp"
#include "stenfuse/problem.hpp"
#include "stenfuse/rational.hpp"
#include "stenfuse/rng.hpp"
#include "stenfuse/shape.hpp"
#include "stenfuse/toml.hpp"
#include "stenfuse/verify.hpp"
