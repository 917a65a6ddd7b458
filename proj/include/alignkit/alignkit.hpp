#pragma once

#include "alignkit/core_geometry.hpp"
#include "alignkit/error.hpp"
#include "alignkit/experiments.hpp"
#include "alignkit/io.hpp"
#include "alignkit/metrics.hpp"
#include "alignkit/procrustes.hpp"
#include "alignkit/random.hpp"
#include "alignkit/synth.hpp"
