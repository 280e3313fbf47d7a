#pragma once

#include "colligation.hpp"
#include "error.hpp"
#include "factor.hpp"
#include "function.hpp"
#include "kernels.hpp"
#include "numlin.hpp"
#include "toeplitz.hpp"
