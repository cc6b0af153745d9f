#pragma once

// Umbrella header.

#include "jmetric/catalog.hpp"
#include "jmetric/connection.hpp"
#include "jmetric/error.hpp"
#include "jmetric/expr.hpp"
#include "jmetric/field.hpp"
#include "jmetric/frame.hpp"
#include "jmetric/lie_algebra.hpp"
#include "jmetric/linalg.hpp"
#include "jmetric/manifest.hpp"
#include "jmetric/parser.hpp"
#include "jmetric/sampling.hpp"
#include "jmetric/structure.hpp"
#include "jmetric/tensor.hpp"
#include "jmetric/verify.hpp"
