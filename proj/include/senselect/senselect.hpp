#ifndef SENSELECT_SENSELECT_HPP
#define SENSELECT_SENSELECT_HPP

#include "senselect/analysis.hpp"
#include "senselect/baselines.hpp"
#include "senselect/configuration.hpp"
#include "senselect/constrained.hpp"
#include "senselect/csv.hpp"
#include "senselect/energy.hpp"
#include "senselect/errors.hpp"
#include "senselect/experiment.hpp"
#include "senselect/gibbs.hpp"
#include "senselect/gpl.hpp"
#include "senselect/model.hpp"
#include "senselect/numeric.hpp"
#include "senselect/rng.hpp"
#include "senselect/runner.hpp"

#endif  // SENSELECT_SENSELECT_HPP
