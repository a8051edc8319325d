#pragma once

#include "qthermo/linalg.hpp"              // IWYU pragma: export
#include "qthermo/qubit.hpp"               // IWYU pragma: export
#include "qthermo/master_equation.hpp"     // IWYU pragma: export
#include "qthermo/channel.hpp"             // IWYU pragma: export
#include "qthermo/thermal_hamiltonian.hpp" // IWYU pragma: export
#include "qthermo/four_qubit.hpp"          // IWYU pragma: export
#include "qthermo/nonmarkov.hpp"           // IWYU pragma: export
