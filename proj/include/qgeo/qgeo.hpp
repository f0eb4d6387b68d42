#pragma once

#include "qgeo/csv.hpp"
#include "qgeo/dynamics.hpp"
#include "qgeo/errors.hpp"
#include "qgeo/experiment.hpp"
#include "qgeo/geodesic.hpp"
#include "qgeo/geometry.hpp"
#include "qgeo/json_io.hpp"
#include "qgeo/linalg.hpp"
#include "qgeo/purification.hpp"
#include "qgeo/sta.hpp"
#include "qgeo/state.hpp"
