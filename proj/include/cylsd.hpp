#pragma once

#include "cylsd/charfn.hpp"
#include "cylsd/constructions.hpp"
#include "cylsd/error.hpp"
#include "cylsd/fdiff.hpp"
#include "cylsd/group.hpp"
#include "cylsd/independence.hpp"
#include "cylsd/io.hpp"
#include "cylsd/linalg.hpp"
#include "cylsd/montecarlo.hpp"
#include "cylsd/parallel.hpp"
#include "cylsd/rational.hpp"
#include "cylsd/solenoid.hpp"
#include "cylsd/stat_matrix.hpp"
