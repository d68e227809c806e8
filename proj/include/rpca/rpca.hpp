#pragma once

#include "rpca/errors.hpp"
#include "rpca/io.hpp"
#include "rpca/kernels.hpp"
#include "rpca/linop.hpp"
#include "rpca/parallel.hpp"
#include "rpca/random.hpp"
#include "rpca/randsvd.hpp"
#include "rpca/specnorm.hpp"
#include "rpca/testgen.hpp"
#include "rpca/theory.hpp"
