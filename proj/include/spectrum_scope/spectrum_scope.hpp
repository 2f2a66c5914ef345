// Umbrella header.
#pragma once

#include "spectrum_scope/errors.hpp"
#include "spectrum_scope/ldp_analysis.hpp"
#include "spectrum_scope/log_value.hpp"
#include "spectrum_scope/rsk_sampler.hpp"
#include "spectrum_scope/schur_eval.hpp"
#include "spectrum_scope/sw_measure.hpp"
#include "spectrum_scope/young_lattice.hpp"
