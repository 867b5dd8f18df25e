#pragma once

// Umbrella header: reduced-FOV sampling pattern synthesis and reconstruction.

#include "coils.hpp"
#include "core.hpp"
#include "decomposition.hpp"
#include "direct.hpp"
#include "fourier.hpp"
#include "io.hpp"
#include "mbr.hpp"
#include "pattern.hpp"
#include "phantom.hpp"
#include "threading.hpp"
