#pragma once

// Convenience umbrella: the whole library in one include.

#include "qbethe/bethe.hpp"
#include "qbethe/bilateral.hpp"
#include "qbethe/config.hpp"
#include "qbethe/errors.hpp"
#include "qbethe/hseries.hpp"
#include "qbethe/identities.hpp"
#include "qbethe/model.hpp"
#include "qbethe/numeric.hpp"
#include "qbethe/pipeline.hpp"
#include "qbethe/pochhammer.hpp"
#include "qbethe/poly.hpp"
#include "qbethe/probes.hpp"
#include "qbethe/report.hpp"
#include "qbethe/series.hpp"
#include "qbethe/theta.hpp"
