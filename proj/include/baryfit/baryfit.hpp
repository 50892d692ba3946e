// Umbrella header.

#pragma once

#include "baryfit/algorithms.hpp"
#include "baryfit/datagen.hpp"
#include "baryfit/io.hpp"
#include "baryfit/loewner.hpp"
#include "baryfit/lsq.hpp"
#include "baryfit/metrics.hpp"
#include "baryfit/optim.hpp"
#include "baryfit/realification.hpp"
#include "baryfit/statespace.hpp"
#include "baryfit/types.hpp"
