#pragma once

#include "covsel/error.hpp"
#include "covsel/instgen.hpp"
#include "covsel/nsa.hpp"
#include "covsel/oracle.hpp"
#include "covsel/problem.hpp"
#include "covsel/smacs.hpp"
#include "covsel/symmat.hpp"
#include "covsel/vsmacs.hpp"
