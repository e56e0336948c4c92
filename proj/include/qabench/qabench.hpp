#pragma once

// Umbrella header; pulls in the whole library.

#include "qabench/arch.hpp"
#include "qabench/benchgen.hpp"
#include "qabench/circuit.hpp"
#include "qabench/gates.hpp"
#include "qabench/harness.hpp"
#include "qabench/qasm.hpp"
#include "qabench/scoring.hpp"
#include "qabench/simulator.hpp"
#include "qabench/transpiler.hpp"
