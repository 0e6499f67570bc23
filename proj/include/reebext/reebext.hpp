#pragma once

#include "surface.hpp"
#include "union_find.hpp"
#include "diagram.hpp"
#include "sweep.hpp"
#include "extension.hpp"
#include "search.hpp"
#include "oracle.hpp"
