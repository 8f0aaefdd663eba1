#include "idd/detector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "idd/ot.hpp"
#include "idd/parallel.hpp"

namespace idd {

int order_statistic_index(double alpha, int n0) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    // Guard the ceil against (1 - alpha) * n0 landing a few ulps above an
    // integer, which would silently shift the rank by one.
    int k = static_cast<int>(std::ceil((1.0 - alpha) * n0 - 1e-9));
    if (k < 1 || k > n0)
        throw ConfigError("order statistic rank " + std::to_string(k) +
                          " out of range for n0 = " + std::to_string(n0));
    return k;
}

double empirical_threshold(std::vector<double> values, double alpha) {
    const int n0 = static_cast<int>(values.size());
    const int k = order_statistic_index(alpha, n0);
    std::nth_element(values.begin(), values.begin() + (k - 1), values.end());
    return values[static_cast<std::size_t>(k - 1)];
}

MonitorModel calibrate(const std::vector<EmpiricalMeasure>& measures,
                       const DetectorConfig& config) {
    const int n0 = static_cast<int>(measures.size());
    if (n0 < 3)
        throw InsufficientSamplesError("calibrate: need at least 3 batches, got " +
                                       std::to_string(n0));
    (void)order_statistic_index(config.alpha_t2, n0);
    (void)order_statistic_index(config.alpha_spe, n0);

    BarycenterResult bary = fit_barycenter(measures, config.barycenter, config.solver);

    MonitorModel model{std::move(bary.barycenter), {},   0.0, 0.0, config.alpha_t2,
                       config.alpha_spe,           n0,   config.solver};

    std::vector<TangentField> fields(measures.size());
    detail::parallel_for(static_cast<long>(measures.size()), [&](long i) {
        fields[static_cast<std::size_t>(i)] =
            tangent_at(model, measures[static_cast<std::size_t>(i)]);
    });

    model.basis = fit_basis(fields, config.mfpca);

    std::vector<double> ref_t2, ref_spe;
    ref_t2.reserve(fields.size());
    ref_spe.reserve(fields.size());
    for (const auto& f : fields) {
        ChartStatistics stats = chart_statistics(model.basis, f);
        ref_t2.push_back(stats.t2);
        ref_spe.push_back(stats.spe);
    }
    model.h_t2 = empirical_threshold(std::move(ref_t2), config.alpha_t2);
    model.h_spe = empirical_threshold(std::move(ref_spe), config.alpha_spe);
    return model;
}

TangentField tangent_at(const MonitorModel& model, const EmpiricalMeasure& measure) {
    Coupling pi = solve_plan(model.barycenter, measure, model.solver);
    return tangent_field(barycentric_projection(pi, measure), model.barycenter);
}

MonitorUpdate step(const MonitorModel& model, const EmpiricalMeasure& measure, int t) {
    if (measure.dim() != model.barycenter.dim())
        throw DimensionError("step: batch dimension does not match the model at t = " +
                             std::to_string(t));
    MonitorUpdate update;
    update.t = t;
    try {
        TangentField field = tangent_at(model, measure);
        update.stats = chart_statistics(model.basis, field);
    } catch (const ConvergenceError& e) {
        throw ConvergenceError("t = " + std::to_string(t) + ": " + e.what(), e.violation);
    }
    const bool over_t2 = update.stats.t2 > model.h_t2;
    const bool over_spe = update.stats.spe > model.h_spe;
    update.alarm = over_t2 || over_spe;
    update.triggered_by = over_t2 ? (over_spe ? Trigger::both : Trigger::t2)
                                  : (over_spe ? Trigger::spe : Trigger::none);
    return update;
}

RunLength run_length(const MonitorModel& model,
                     const std::function<EmpiricalMeasure(int)>& stream, int horizon) {
    if (horizon < 1) throw ConfigError("run_length: horizon must be >= 1");
    for (int t = 1; t <= horizon; ++t) {
        if (step(model, stream(t), t).alarm) return {t, false};
    }
    return {horizon, true};
}

double arl_lower_bound(int n0, double alpha_t2, double alpha_spe) {
    if (!(alpha_t2 > 0.0 && alpha_t2 < 1.0) || !(alpha_spe > 0.0 && alpha_spe < 1.0))
        throw ConfigError("arl_lower_bound: alphas must lie in (0, 1)");
    return n0 + 1 + 1.0 / (alpha_t2 + alpha_spe + 2.0 / (n0 + 1));
}

}  // namespace idd
