#pragma once

#include "cuplen/core.hpp"
#include "cuplen/random.hpp"
#include "cuplen/metrics.hpp"
#include "cuplen/rips.hpp"
#include "cuplen/cohomology.hpp"
#include "cuplen/cup.hpp"
#include "cuplen/cuplength.hpp"
#include "cuplen/synth.hpp"
#include "cuplen/pipeline.hpp"
#include "cuplen/experiments.hpp"
#include "cuplen/plot.hpp"
