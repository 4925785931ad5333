#ifndef GEOTIME_GEOTIME_HPP
#define GEOTIME_GEOTIME_HPP

// Umbrella header: ground-truth geometry, distance oracles, travel time
// datasets, the reconstruction pipeline and its verification harness.

#include "geotime/config.hpp"
#include "geotime/curve.hpp"
#include "geotime/dataset.hpp"
#include "geotime/domain.hpp"
#include "geotime/eikonal.hpp"
#include "geotime/geodesic.hpp"
#include "geotime/linalg.hpp"
#include "geotime/metric.hpp"
#include "geotime/parallel.hpp"
#include "geotime/reconstruct.hpp"
#include "geotime/report.hpp"
#include "geotime/shooting.hpp"
#include "geotime/verify.hpp"

#endif  // GEOTIME_GEOTIME_HPP
