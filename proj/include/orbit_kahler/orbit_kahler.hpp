#pragma once

#include "orbit_kahler/config.hpp"
#include "orbit_kahler/operator_core.hpp"
#include "orbit_kahler/tangent_space.hpp"
#include "orbit_kahler/kahler.hpp"
#include "orbit_kahler/uncertainty.hpp"
#include "orbit_kahler/dynamics.hpp"
#include "orbit_kahler/io.hpp"
#include "orbit_kahler/integrability.hpp"
#include "orbit_kahler/suite.hpp"
