#pragma once

#include <span>
#include <string>
#include <vector>

#include "windramp/series.hpp"

namespace windramp {

struct ARMAOrder {
    int p = 0; // AR lags
    int d = 0; // differencing order
    int q = 0; // MA lags
};

struct FitDiagnostics {
    int iterations = 0;
    bool converged = false;
    double final_css = 0.0;
    bool ar_stationary = true; // warning flag, never a rejection
};

/// Fitted ARMA/ARIMA model. The intercept is the constant term of
/// y_t = c + sum phi_i y_{t-i} + e_t + sum theta_j e_{t-j} applied to the
/// d-times differenced series. Pure differencing models (p = q = 0) carry no
/// intercept, so ARIMA(0,1,0) forecasts reduce to persistence.
struct ARMAModel {
    ARMAOrder order;
    std::vector<double> phi;
    std::vector<double> theta;
    double intercept = 0.0;
    double sigma2 = 0.0;
    FitDiagnostics diag;
};

/// Wall-clock timings of a model run.
struct FitReport {
    double fit_time_s = 0.0;
    double forecast_time_s = 0.0;
};

/// True when the AR polynomial 1 - phi_1 z - ... - phi_p z^p has all roots
/// outside the unit circle.
bool ar_stationary(std::span<const double> phi);

/// Persistence baseline: every forecast equals the last observed value.
std::vector<double> persistence_forecast(const UniformSeries& history, int horizon);

/// Rolling one-step persistence over the test window: each prediction is
/// the most recent present true value.
std::vector<double> rolling_persistence(const UniformSeries& train, const UniformSeries& test);

/// Fits ARMA(p,q) by minimising the conditional sum of squared one-step
/// residuals, initialised by a long-AR / Hannan-Rissanen two-stage
/// regression. Deterministic given input. Throws on zero-variance input;
/// optimiser non-convergence is reported in the diagnostics, not thrown.
ARMAModel fit_arma(std::span<const double> series, int p, int q);

/// ARMA(p,q) on the d-times differenced series, with order.d recorded.
ARMAModel fit_arima(std::span<const double> series, int p, int d, int q);

/// h-step forecast: AR recursion with future innovations set to zero and MA
/// terms from in-sample residuals, integrated back d times.
std::vector<double> forecast(const ARMAModel& model, std::span<const double> history, int horizon);

/// Rolling one-step prediction over the test window with frozen parameters:
/// the prediction for test index i uses all true values up to i-1.
std::vector<double> rolling_one_step(const ARMAModel& model, std::span<const double> train,
                                     std::span<const double> test);

/// UniformSeries variant; rejects a gap or cadence mismatch between train
/// and test.
std::vector<double> rolling_one_step(const ARMAModel& model, const UniformSeries& train,
                                     const UniformSeries& test);

/// In-sample one-step predictions on the training series (for train-side
/// metrics). Defined for level index t >= p + d; earlier indices are
/// excluded via the returned offset.
struct InSamplePredictions {
    std::size_t offset = 0; // first level index with a prediction
    std::vector<double> values;
};
InSamplePredictions in_sample_predictions(const ARMAModel& model, std::span<const double> series);

std::string arma_to_json(const ARMAModel& model);
ARMAModel arma_from_json(const std::string& json_text);

} // namespace windramp
