#pragma once

#include "hetsched/model.hpp"
#include "hetsched/simulator.hpp"
#include "hetsched/orderspace.hpp"
#include "hetsched/genmaps.hpp"
#include "hetsched/heuristics.hpp"
#include "hetsched/search.hpp"
#include "hetsched/milp.hpp"
#include "hetsched/datagen.hpp"
#include "hetsched/io.hpp"
#include "hetsched/bench.hpp"
