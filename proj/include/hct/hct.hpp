#pragma once

#include "hct/builder.hpp"
#include "hct/constraint.hpp"
#include "hct/constraint_io.hpp"
#include "hct/dimension.hpp"
#include "hct/min_cut.hpp"
#include "hct/msf.hpp"
#include "hct/msf_builder.hpp"
#include "hct/online.hpp"
#include "hct/pac.hpp"
#include "hct/parallel.hpp"
#include "hct/tree.hpp"
#include "hct/tree_index.hpp"
#include "hct/tree_ops.hpp"
#include "hct/types.hpp"
#include "hct/union_find.hpp"
