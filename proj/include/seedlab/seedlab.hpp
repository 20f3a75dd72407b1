#pragma once

#include "seedlab/core.hpp"
#include "seedlab/errors.hpp"
#include "seedlab/harness.hpp"
#include "seedlab/instances.hpp"
#include "seedlab/lloyd.hpp"
#include "seedlab/oracle.hpp"
#include "seedlab/rng.hpp"
#include "seedlab/seeding.hpp"
#include "seedlab/stats.hpp"
