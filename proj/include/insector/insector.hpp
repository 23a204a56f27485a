#pragma once

// Comb-sector codebooks and in-sector convolutional compressed sensing for
// phased-array beam alignment. Umbrella header.

#include "insector/beamform.hpp"
#include "insector/channel.hpp"
#include "insector/codebook.hpp"
#include "insector/csmodel.hpp"
#include "insector/experiment.hpp"
#include "insector/grid.hpp"
#include "insector/io.hpp"
#include "insector/recovery.hpp"
#include "insector/rng.hpp"
#include "insector/sector.hpp"
#include "insector/shifts.hpp"
#include "insector/sweep.hpp"
