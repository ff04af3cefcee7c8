#pragma once

#include "gsr/bench.hpp"
#include "gsr/coherence.hpp"
#include "gsr/design.hpp"
#include "gsr/errors.hpp"
#include "gsr/generate.hpp"
#include "gsr/gomp.hpp"
#include "gsr/io.hpp"
#include "gsr/metrics.hpp"
#include "gsr/partition.hpp"
#include "gsr/penalty.hpp"
#include "gsr/rng.hpp"
#include "gsr/solver.hpp"
#include "gsr/types.hpp"
