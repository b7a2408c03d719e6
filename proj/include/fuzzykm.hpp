#pragma once

#include "fuzzykm/approx.hpp"
#include "fuzzykm/core.hpp"
#include "fuzzykm/error.hpp"
#include "fuzzykm/fm.hpp"
#include "fuzzykm/gridcand.hpp"
#include "fuzzykm/hardcluster.hpp"
#include "fuzzykm/instances.hpp"
#include "fuzzykm/io.hpp"
#include "fuzzykm/oracle.hpp"
#include "fuzzykm/rng.hpp"
#include "fuzzykm/search.hpp"
