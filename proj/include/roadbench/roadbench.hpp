#pragma once

#include "roadbench/builders.hpp"
#include "roadbench/csv.hpp"
#include "roadbench/drivability.hpp"
#include "roadbench/dynamics.hpp"
#include "roadbench/errors.hpp"
#include "roadbench/frenet.hpp"
#include "roadbench/geometry.hpp"
#include "roadbench/harness.hpp"
#include "roadbench/levelk.hpp"
#include "roadbench/prediction.hpp"
#include "roadbench/render.hpp"
#include "roadbench/route.hpp"
#include "roadbench/rules.hpp"
#include "roadbench/scenario.hpp"
#include "roadbench/scoring.hpp"
