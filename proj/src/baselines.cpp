#include "idd/baselines.hpp"

#include <cmath>
#include <iostream>
#include <string>

#include <Eigen/Dense>

#include "idd/detector.hpp"

namespace idd::baselines {

namespace {

Eigen::VectorXd batch_mean(const Eigen::MatrixXd& batch) {
    if (batch.rows() == 0) throw DimensionError("baseline: empty batch");
    return batch.colwise().mean().transpose();
}

}  // namespace

HotellingMeanModel hotelling_calibrate(const std::vector<Eigen::MatrixXd>& batches, double alpha) {
    if (batches.empty()) throw EmptyInputError("hotelling_calibrate: no batches");
    const Eigen::Index d = batches.front().cols();
    const int n0 = static_cast<int>(batches.size());
    if (n0 < d + 2)
        throw InsufficientSamplesError("hotelling_calibrate: need n0 >= d + 2, got " +
                                       std::to_string(n0));

    Eigen::MatrixXd means(n0, d);
    for (int t = 0; t < n0; ++t) means.row(t) = batch_mean(batches[static_cast<std::size_t>(t)]);

    HotellingMeanModel model;
    model.alpha = alpha;
    model.mean = means.colwise().mean().transpose();
    Eigen::MatrixXd centered = means.rowwise() - model.mean.transpose();
    Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n0 - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    const double floor = cov.trace() * 1e-12;
    if (eig.eigenvalues().minCoeff() <= std::max(floor, 0.0)) {
        const double ridge = 1e-8 * cov.trace() / static_cast<double>(d);
        cov += ridge * Eigen::MatrixXd::Identity(d, d);
        model.ridged = true;
        std::cerr << "hotelling_calibrate: singular covariance, added ridge " << ridge << "\n";
    }
    model.cov_inverse = cov.ldlt().solve(Eigen::MatrixXd::Identity(d, d));

    std::vector<double> stats;
    stats.reserve(batches.size());
    for (const auto& b : batches) stats.push_back(hotelling_statistic(model, b));
    model.threshold = empirical_threshold(std::move(stats), alpha);
    return model;
}

double hotelling_statistic(const HotellingMeanModel& model, const Eigen::MatrixXd& batch) {
    if (batch.cols() != model.mean.size())
        throw DimensionError("hotelling_statistic: batch dimension mismatch");
    Eigen::VectorXd diff = batch_mean(batch) - model.mean;
    return diff.dot(model.cov_inverse * diff);
}

BaselineUpdate hotelling_step(const HotellingMeanModel& model, const Eigen::MatrixXd& batch) {
    const double stat = hotelling_statistic(model, batch);
    return {stat, stat > model.threshold};
}

CountChartModel count_chart_calibrate(const std::vector<Eigen::MatrixXd>& batches) {
    if (batches.empty()) throw EmptyInputError("count_chart_calibrate: no batches");
    double acc = 0.0;
    for (const auto& b : batches) {
        if (b.rows() == 0 || b.cols() != 1) throw DimensionError("count chart: needs N x 1 batches");
        acc += b.sum();
    }
    CountChartModel model;
    model.c_bar = acc / static_cast<double>(batches.size());
    if (!(model.c_bar > 0.0)) throw DegenerateVarianceError("count chart: zero mean count");
    return model;
}

double count_chart_statistic(const CountChartModel& model, const Eigen::MatrixXd& batch) {
    if (batch.rows() == 0 || batch.cols() != 1)
        throw DimensionError("count chart: needs N x 1 batches");
    return std::abs(batch.sum() - model.c_bar) / std::sqrt(model.c_bar);
}

BaselineUpdate count_chart_step(const CountChartModel& model, const Eigen::MatrixXd& batch) {
    const double stat = count_chart_statistic(model, batch);
    return {stat, stat > model.z_threshold};
}

namespace {

MaxDevModel make_max_dev(const std::vector<Eigen::MatrixXd>& batches, Eigen::VectorXd p0,
                         int categories, double alpha) {
    MaxDevModel model;
    model.categories = categories;
    model.p0 = std::move(p0);
    for (int j = 0; j < categories; ++j)
        if (model.p0[j] <= 0.0 || model.p0[j] >= 1.0) {
            model.excluded.push_back(j);
            std::cerr << "max_dev: category " << j + 1 << " has boundary probability "
                      << model.p0[j] << ", excluded\n";
        }
    if (static_cast<int>(model.excluded.size()) == categories)
        throw ConfigError("max_dev: every category excluded");

    std::vector<double> stats;
    stats.reserve(batches.size());
    for (const auto& b : batches) stats.push_back(max_dev_statistic(model, b));
    model.threshold = empirical_threshold(std::move(stats), alpha);
    return model;
}

}  // namespace

MaxDevModel max_dev_calibrate(const std::vector<Eigen::MatrixXd>& batches, int categories,
                              double alpha) {
    if (batches.empty()) throw EmptyInputError("max_dev_calibrate: no batches");
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(categories);
    double total = 0.0;
    for (const auto& b : batches) {
        if (b.rows() == 0 || b.cols() != 1) throw DimensionError("max_dev: needs N x 1 batches");
        for (Eigen::Index i = 0; i < b.rows(); ++i) {
            const int v = static_cast<int>(b(i, 0));
            if (v < 1 || v > categories)
                throw DimensionError("max_dev: value " + std::to_string(v) +
                                     " outside 1..M");
            counts[v - 1] += 1.0;
            total += 1.0;
        }
    }
    return make_max_dev(batches, counts / total, categories, alpha);
}

MaxDevModel max_dev_with_p0(const std::vector<Eigen::MatrixXd>& batches,
                            const Eigen::VectorXd& p0, double alpha) {
    if (batches.empty()) throw EmptyInputError("max_dev_with_p0: no batches");
    if (p0.minCoeff() < 0.0 || std::abs(p0.sum() - 1.0) > 1e-10)
        throw ConfigError("max_dev: p0 must form a simplex vector");
    return make_max_dev(batches, p0, static_cast<int>(p0.size()), alpha);
}

double max_dev_statistic(const MaxDevModel& model, const Eigen::MatrixXd& batch) {
    if (batch.rows() == 0 || batch.cols() != 1)
        throw DimensionError("max_dev: needs N x 1 batches");
    const double n = static_cast<double>(batch.rows());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(model.categories);
    for (Eigen::Index i = 0; i < batch.rows(); ++i) {
        const int v = static_cast<int>(batch(i, 0));
        if (v < 1 || v > model.categories)
            throw DimensionError("max_dev: value outside 1..M");
        counts[v - 1] += 1.0;
    }
    double z = 0.0;
    for (int j = 0; j < model.categories; ++j) {
        if (model.p0[j] <= 0.0 || model.p0[j] >= 1.0) continue;
        const double se = std::sqrt(model.p0[j] * (1.0 - model.p0[j]) / n);
        z = std::max(z, std::abs(counts[j] / n - model.p0[j]) / se);
    }
    return z;
}

BaselineUpdate max_dev_step(const MaxDevModel& model, const Eigen::MatrixXd& batch) {
    const double stat = max_dev_statistic(model, batch);
    return {stat, stat > model.threshold};
}

}  // namespace idd::baselines
