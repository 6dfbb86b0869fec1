#pragma once

#include "stoverify/assembly.hpp"
#include "stoverify/decomposition.hpp"
#include "stoverify/dfa.hpp"
#include "stoverify/error.hpp"
#include "stoverify/generator.hpp"
#include "stoverify/interval.hpp"
#include "stoverify/lp.hpp"
#include "stoverify/ltl.hpp"
#include "stoverify/parallel.hpp"
#include "stoverify/pipeline.hpp"
#include "stoverify/polynomial.hpp"
#include "stoverify/sampling.hpp"
#include "stoverify/simulation.hpp"
#include "stoverify/smtlib.hpp"
#include "stoverify/synthesis.hpp"
#include "stoverify/system.hpp"
