#pragma once

#include <functional>
#include <vector>

#include "idd/barycenter.hpp"
#include "idd/empirical_measure.hpp"
#include "idd/mfpca.hpp"
#include "idd/solver.hpp"
#include "idd/tangent.hpp"

namespace idd {

struct DetectorConfig {
    double alpha_t2 = 0.01;
    double alpha_spe = 0.01;
    MfpcaConfig mfpca;
    BarycenterConfig barycenter;
    SolverConfig solver;
};

/// Calibrated detector state: reference barycenter, eigenbasis, and the
/// order-statistic thresholds. Immutable after calibration.
struct MonitorModel {
    EmpiricalMeasure barycenter;
    EigenBasis basis;
    double h_t2 = 0.0;
    double h_spe = 0.0;
    double alpha_t2 = 0.0;
    double alpha_spe = 0.0;
    int n0 = 0;
    SolverConfig solver;
};

enum class Trigger { none, t2, spe, both };

struct MonitorUpdate {
    int t = 0;
    ChartStatistics stats;
    bool alarm = false;
    Trigger triggered_by = Trigger::none;
};

struct RunLength {
    int tau = 0;          // first alarm index, or the horizon when censored
    bool censored = false;
};

/// Order-statistic rank ceil((1 - alpha) * n0), computed robustly against
/// floating-point representation of (1 - alpha).
int order_statistic_index(double alpha, int n0);

/// k-th order statistic of the sample with k = order_statistic_index.
double empirical_threshold(std::vector<double> values, double alpha);

/// Full calibration pass: barycenter, reference tangent fields, eigenbasis,
/// reference statistics, and (1 - alpha) order-statistic thresholds.
MonitorModel calibrate(const std::vector<EmpiricalMeasure>& measures,
                       const DetectorConfig& config);

/// Tangent field of one batch relative to the model barycenter.
TangentField tangent_at(const MonitorModel& model, const EmpiricalMeasure& measure);

/// One monitoring step: plan, projection, scores, both chart statistics, and
/// the OR alarm rule with strict exceedance.
MonitorUpdate step(const MonitorModel& model, const EmpiricalMeasure& measure, int t);

/// Feed the stream until the first alarm or the horizon. Censoring at the
/// horizon is a value, not an error.
RunLength run_length(const MonitorModel& model,
                     const std::function<EmpiricalMeasure(int)>& stream, int horizon);

/// Finite-sample bound n0 + 1 + 1/(alpha_t2 + alpha_spe + 2/(n0 + 1)) on the
/// in-control average run length under order-statistic calibration.
double arl_lower_bound(int n0, double alpha_t2, double alpha_spe);

}  // namespace idd
