#pragma once

#include "tvbarc/acf.hpp"
#include "tvbarc/changepoint.hpp"
#include "tvbarc/date.hpp"
#include "tvbarc/errors.hpp"
#include "tvbarc/export.hpp"
#include "tvbarc/io.hpp"
#include "tvbarc/manifest.hpp"
#include "tvbarc/model.hpp"
#include "tvbarc/posterior.hpp"
#include "tvbarc/sampler.hpp"
#include "tvbarc/series.hpp"
#include "tvbarc/simulate.hpp"
#include "tvbarc/spline.hpp"
#include "tvbarc/staging.hpp"
#include "tvbarc/version.hpp"
