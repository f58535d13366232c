#pragma once

// Umbrella header for the volratio convex-geometry library.

#include "volr/bodies.hpp"
#include "volr/body_io.hpp"
#include "volr/constructions.hpp"
#include "volr/errors.hpp"
#include "volr/experiments.hpp"
#include "volr/linalg.hpp"
#include "volr/operators.hpp"
#include "volr/parallel.hpp"
#include "volr/presets.hpp"
#include "volr/report.hpp"
#include "volr/rng.hpp"
#include "volr/sampling.hpp"
#include "volr/simplex.hpp"
#include "volr/volume.hpp"
#include "volr/vr.hpp"
