#pragma once

#include "innerfn/catalog.hpp"
#include "innerfn/derivative.hpp"
#include "innerfn/diagnostics.hpp"
#include "innerfn/disk_functions.hpp"
#include "innerfn/error.hpp"
#include "innerfn/factorization.hpp"
#include "innerfn/io.hpp"
#include "innerfn/polynomial.hpp"
#include "innerfn/probes.hpp"
#include "innerfn/spec_io.hpp"
#include "innerfn/spectrum.hpp"
