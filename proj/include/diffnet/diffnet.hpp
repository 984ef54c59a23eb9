#pragma once

#include "diffusion.hpp"
#include "haar.hpp"
#include "io.hpp"
#include "nonlinearity.hpp"
#include "numerics.hpp"
#include "resnet.hpp"
#include "signal.hpp"
#include "stability.hpp"
#include "variational.hpp"
