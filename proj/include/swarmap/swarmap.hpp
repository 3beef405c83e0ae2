#pragma once

#include "swarmap/types.hpp"
#include "swarmap/geometry.hpp"
#include "swarmap/domain.hpp"
#include "swarmap/signal.hpp"
#include "swarmap/ekf.hpp"
#include "swarmap/swarm.hpp"
#include "swarmap/gaussian_mass.hpp"
#include "swarmap/occupancy.hpp"
#include "swarmap/union_find.hpp"
#include "swarmap/complex.hpp"
#include "swarmap/persistence.hpp"
#include "swarmap/threshold.hpp"
#include "swarmap/stats.hpp"
#include "swarmap/io.hpp"
#include "swarmap/pipeline.hpp"
