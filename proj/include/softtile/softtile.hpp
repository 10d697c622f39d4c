#pragma once

#include "softtile/error.hpp"
#include "softtile/geometry.hpp"
#include "softtile/cluster.hpp"
#include "softtile/styles.hpp"
#include "softtile/soft_placer.hpp"
#include "softtile/qor.hpp"
#include "softtile/config.hpp"
#include "softtile/spec_io.hpp"
#include "softtile/layout_io.hpp"
#include "softtile/reference.hpp"
#include "softtile/sweep.hpp"
#include "softtile/ordering.hpp"
#include "softtile/tiler.hpp"
#include "softtile/render.hpp"
