#pragma once

#include "fockspec/assumptions.hpp"
#include "fockspec/bands.hpp"
#include "fockspec/birman_schwinger.hpp"
#include "fockspec/config.hpp"
#include "fockspec/efimov.hpp"
#include "fockspec/fock_oracle.hpp"
#include "fockspec/friedrichs.hpp"
#include "fockspec/inertia.hpp"
#include "fockspec/model.hpp"
#include "fockspec/optimize.hpp"
#include "fockspec/parallel.hpp"
#include "fockspec/point.hpp"
#include "fockspec/summation.hpp"
#include "fockspec/torus_grid.hpp"
