#pragma once

// Umbrella header for the whole library.

#include "flametomo/adam.hpp"
#include "flametomo/atomic_file.hpp"
#include "flametomo/camera.hpp"
#include "flametomo/checkpoint.hpp"
#include "flametomo/config.hpp"
#include "flametomo/dataset_io.hpp"
#include "flametomo/encoding.hpp"
#include "flametomo/error.hpp"
#include "flametomo/gradcheck.hpp"
#include "flametomo/graymap.hpp"
#include "flametomo/network.hpp"
#include "flametomo/phantom.hpp"
#include "flametomo/projection.hpp"
#include "flametomo/radiometry.hpp"
#include "flametomo/render.hpp"
#include "flametomo/trainer.hpp"
#include "flametomo/types.hpp"
#include "flametomo/volume.hpp"
#include "flametomo/volume_io.hpp"
