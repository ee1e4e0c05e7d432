#pragma once

// Everything at once. Individual headers can be included on their own.

#include "heisvoa/field.hpp"
#include "heisvoa/linalg.hpp"
#include "heisvoa/formal.hpp"
#include "heisvoa/fock.hpp"
#include "heisvoa/vertex.hpp"
#include "heisvoa/axioms.hpp"
#include "heisvoa/bulk.hpp"
#include "heisvoa/conformal.hpp"
#include "heisvoa/quotient.hpp"
#include "heisvoa/heismod.hpp"
#include "heisvoa/expr.hpp"
#include "heisvoa/serialize.hpp"
#include "heisvoa/suites.hpp"
