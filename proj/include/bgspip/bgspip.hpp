// Copyright (c) 2026 The bgspip authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BGSPIP_BGSPIP_HPP
#define BGSPIP_BGSPIP_HPP

#include "precision.hpp"
#include "matrix.hpp"
#include "linalg.hpp"
#include "intraorth.hpp"
#include "bgs.hpp"
#include "metrics.hpp"
#include "rng.hpp"
#include "testmat.hpp"
#include "harness/config.hpp"
#include "harness/sweep.hpp"
#include "harness/emit.hpp"

#endif
