#pragma once

// Umbrella header.
#include "locus/core_model.hpp"
#include "locus/data_io.hpp"
#include "locus/electre.hpp"
#include "locus/error.hpp"
#include "locus/ga_hybrid.hpp"
#include "locus/objectives.hpp"
#include "locus/promethee.hpp"
#include "locus/report.hpp"
#include "locus/screening.hpp"
