#pragma once

// Umbrella header for the whole library.

#include "samlab/ascent.hpp"
#include "samlab/autodiff.hpp"
#include "samlab/bruteforce.hpp"
#include "samlab/common.hpp"
#include "samlab/config.hpp"
#include "samlab/csv.hpp"
#include "samlab/dataset.hpp"
#include "samlab/experiment.hpp"
#include "samlab/landscape.hpp"
#include "samlab/manifest.hpp"
#include "samlab/model.hpp"
#include "samlab/objective.hpp"
#include "samlab/optimizer.hpp"
#include "samlab/persist.hpp"
#include "samlab/prng.hpp"
#include "samlab/spectrum.hpp"
#include "samlab/svg.hpp"
#include "samlab/toylosses.hpp"
#include "samlab/train.hpp"
#include "samlab/vecmath.hpp"
