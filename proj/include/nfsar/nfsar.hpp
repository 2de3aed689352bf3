#pragma once

#include "nfsar/errors.hpp"
#include "nfsar/forward.hpp"
#include "nfsar/geometry.hpp"
#include "nfsar/io.hpp"
#include "nfsar/reconstruct.hpp"
#include "nfsar/spectral.hpp"
#include "nfsar/version.hpp"
