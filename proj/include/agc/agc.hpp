#pragma once

#include "agc/convolve.hpp"
#include "agc/datagen.hpp"
#include "agc/driver.hpp"
#include "agc/error.hpp"
#include "agc/graph.hpp"
#include "agc/io.hpp"
#include "agc/metrics.hpp"
#include "agc/parallel.hpp"
#include "agc/partition.hpp"
#include "agc/rng.hpp"
#include "agc/spectral.hpp"
#include "agc/version.hpp"
