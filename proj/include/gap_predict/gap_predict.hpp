#ifndef GAP_PREDICT_GAP_PREDICT_HPP
#define GAP_PREDICT_GAP_PREDICT_HPP

#include "gap_predict/approx.hpp"
#include "gap_predict/error.hpp"
#include "gap_predict/harness.hpp"
#include "gap_predict/io.hpp"
#include "gap_predict/linalg.hpp"
#include "gap_predict/predictor.hpp"
#include "gap_predict/quadrature.hpp"
#include "gap_predict/signal.hpp"
#include "gap_predict/taper.hpp"

#endif  // GAP_PREDICT_GAP_PREDICT_HPP
