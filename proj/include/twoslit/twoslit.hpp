#pragma once

#include "twoslit/error.hpp"
#include "twoslit/projective.hpp"
#include "twoslit/congruence.hpp"
#include "twoslit/camera.hpp"
#include "twoslit/epipolar.hpp"
#include "twoslit/selfcal.hpp"
#include "twoslit/harness.hpp"
