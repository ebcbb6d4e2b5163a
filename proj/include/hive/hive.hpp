#pragma once

#include "hive/errors.hpp"
#include "hive/rng.hpp"
#include "hive/pmf.hpp"
#include "hive/skew_normal.hpp"
#include "hive/renewal.hpp"
#include "hive/stationary.hpp"
#include "hive/cyclic.hpp"
#include "hive/simulator.hpp"
