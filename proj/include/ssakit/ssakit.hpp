#ifndef SSAKIT_SSAKIT_HPP
#define SSAKIT_SSAKIT_HPP

// Umbrella header: singular spectrum analysis with automated eigentriple
// grouping for 1D series, multichannel series and 2D fields.

#include "ssakit/common.hpp"
#include "ssakit/embed.hpp"
#include "ssakit/decompose.hpp"
#include "ssakit/reconstruct.hpp"
#include "ssakit/spectral.hpp"
#include "ssakit/identify.hpp"
#include "ssakit/identify_mssa.hpp"
#include "ssakit/identify_2d.hpp"
#include "ssakit/experiments.hpp"

#endif  // SSAKIT_SSAKIT_HPP
