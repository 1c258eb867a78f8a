#pragma once

#include "schro/core.hpp"
#include "schro/evolve.hpp"
#include "schro/fourier_xi.hpp"
#include "schro/harness.hpp"
#include "schro/problems.hpp"
#include "schro/recover.hpp"
#include "schro/spectral_p.hpp"
#include "schro/system_model.hpp"
#include "schro/warping.hpp"
