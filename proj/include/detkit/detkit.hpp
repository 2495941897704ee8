// Copyright (c) 2026 the detkit authors.
// Licensed under the Apache License 2.0.

#ifndef DETKIT_DETKIT_HPP_
#define DETKIT_DETKIT_HPP_

#include "detkit/augment.hpp"
#include "detkit/boxsim.hpp"
#include "detkit/clahe.hpp"
#include "detkit/dataset.hpp"
#include "detkit/eval.hpp"
#include "detkit/geometry.hpp"
#include "detkit/gradcheck.hpp"
#include "detkit/image.hpp"
#include "detkit/image_io.hpp"
#include "detkit/losses.hpp"
#include "detkit/rng.hpp"

#endif  // DETKIT_DETKIT_HPP_
