#pragma once

#include "critns/checkpoint.hpp"
#include "critns/config.hpp"
#include "critns/continuum_oracle.hpp"
#include "critns/dynamics.hpp"
#include "critns/error.hpp"
#include "critns/fft.hpp"
#include "critns/field.hpp"
#include "critns/grid.hpp"
#include "critns/harness.hpp"
#include "critns/norms.hpp"
#include "critns/parallel.hpp"
#include "critns/picard.hpp"
#include "critns/random_samples.hpp"
#include "critns/splitting.hpp"
#include "critns/stability.hpp"
