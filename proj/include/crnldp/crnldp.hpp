#pragma once

#include "crnldp/dynamics.hpp"
#include "crnldp/errors.hpp"
#include "crnldp/geometry.hpp"
#include "crnldp/io.hpp"
#include "crnldp/ldp.hpp"
#include "crnldp/logspace.hpp"
#include "crnldp/lp.hpp"
#include "crnldp/model.hpp"
#include "crnldp/parallel.hpp"
#include "crnldp/quasipotential.hpp"
#include "crnldp/random.hpp"
#include "crnldp/rational.hpp"
#include "crnldp/report.hpp"
#include "crnldp/topology.hpp"
