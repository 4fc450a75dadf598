//! \file zpf.hpp
//! Umbrella header.
#pragma once

#include "config.hpp"
#include "core.hpp"
#include "field.hpp"
#include "lorentz.hpp"
#include "moyal.hpp"
#include "oracle.hpp"
#include "polynomial.hpp"
#include "rng.hpp"
#include "sed.hpp"
#include "spectrum.hpp"
#include "stencil.hpp"
#include "wigner.hpp"
