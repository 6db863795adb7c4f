#pragma once

// Umbrella header for the entanglement purification toolkit.

#include "qpa/bell.hpp"
#include "qpa/circuit.hpp"
#include "qpa/ensemble.hpp"
#include "qpa/linalg.hpp"
#include "qpa/map.hpp"
#include "qpa/noise.hpp"
#include "qpa/rng.hpp"
#include "qpa/verify.hpp"
