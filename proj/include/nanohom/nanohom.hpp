#pragma once

#include "nanohom/core.hpp"
#include "nanohom/params.hpp"
#include "nanohom/kernels.hpp"
#include "nanohom/geometry.hpp"
#include "nanohom/tensors.hpp"
#include "nanohom/effective.hpp"
#include "nanohom/farfield.hpp"
#include "nanohom/interaction.hpp"
#include "nanohom/foldy_lax.hpp"
#include "nanohom/lse.hpp"
#include "nanohom/pipeline.hpp"
#include "nanohom/config.hpp"
#include "nanohom/io.hpp"
#include "nanohom/commands.hpp"
