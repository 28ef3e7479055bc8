#pragma once

#include "endocal/calibrate.hpp"
#include "endocal/camera.hpp"
#include "endocal/dataio.hpp"
#include "endocal/errors.hpp"
#include "endocal/geometry.hpp"
#include "endocal/mask.hpp"
#include "endocal/metrics.hpp"
#include "endocal/objective.hpp"
#include "endocal/raster.hpp"
#include "endocal/rng.hpp"
#include "endocal/scenegen.hpp"
