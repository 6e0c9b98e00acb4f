//
// catspin - Copyright 2026 The catspin Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include "catspin/dynamics.hpp"
#include "catspin/errors.hpp"
#include "catspin/husimi.hpp"
#include "catspin/interferometer.hpp"
#include "catspin/io.hpp"
#include "catspin/lbfgsb.hpp"
#include "catspin/parallel.hpp"
#include "catspin/pulse_optimizer.hpp"
#include "catspin/spin_core.hpp"
#include "catspin/sweep.hpp"
