#pragma once

// Anomaly detection for time-varying network flow traffic: windows of
// quantized flows are tested against a learned family of probability laws;
// a window alarms when its smallest divergence to the family crosses a
// threshold.

#include "dynanom/detector.hpp"
#include "dynanom/errors.hpp"
#include "dynanom/features.hpp"
#include "dynanom/flow.hpp"
#include "dynanom/io.hpp"
#include "dynanom/measures.hpp"
#include "dynanom/pipeline.hpp"
#include "dynanom/pl_learning.hpp"
#include "dynanom/pl_refinement.hpp"
#include "dynanom/rng.hpp"
#include "dynanom/traffic_gen.hpp"
