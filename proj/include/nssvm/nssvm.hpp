#ifndef NSSVM_NSSVM_HPP
#define NSSVM_NSSVM_HPP

#include "nssvm/adaptive.hpp"
#include "nssvm/bench.hpp"
#include "nssvm/dataset.hpp"
#include "nssvm/linear_core.hpp"
#include "nssvm/metrics.hpp"
#include "nssvm/model_io.hpp"
#include "nssvm/newton.hpp"
#include "nssvm/oracle.hpp"
#include "nssvm/projection.hpp"

#endif  // NSSVM_NSSVM_HPP
