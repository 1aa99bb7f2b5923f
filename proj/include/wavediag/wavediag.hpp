#pragma once

#include "wavediag/config.hpp"
#include "wavediag/correlation.hpp"
#include "wavediag/dfn.hpp"
#include "wavediag/diagnose.hpp"
#include "wavediag/error.hpp"
#include "wavediag/knn.hpp"
#include "wavediag/pipeline.hpp"
#include "wavediag/preprocess.hpp"
#include "wavediag/random.hpp"
#include "wavediag/signal.hpp"
#include "wavediag/synth.hpp"
#include "wavediag/wavelet.hpp"
