#pragma once

// Umbrella header.

#include "termshape/curve.hpp"
#include "termshape/dynamics.hpp"
#include "termshape/envelope.hpp"
#include "termshape/errors.hpp"
#include "termshape/ingest.hpp"
#include "termshape/io.hpp"
#include "termshape/numerics.hpp"
#include "termshape/segmentation.hpp"
#include "termshape/shape.hpp"
#include "termshape/shape_scan.hpp"
