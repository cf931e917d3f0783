#pragma once

#include "symrate/bounds.hpp"
#include "symrate/errors.hpp"
#include "symrate/estimator.hpp"
#include "symrate/generators.hpp"
#include "symrate/hull.hpp"
#include "symrate/io.hpp"
#include "symrate/lz.hpp"
#include "symrate/manifest.hpp"
#include "symrate/pfsa.hpp"
#include "symrate/pfsa_io.hpp"
#include "symrate/stream.hpp"
#include "symrate/sync.hpp"
