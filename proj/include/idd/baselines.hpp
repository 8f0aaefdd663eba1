#pragma once

#include <Eigen/Core>
#include <vector>

#include "idd/errors.hpp"

namespace idd::baselines {

/// Shared result of one baseline monitoring step.
struct BaselineUpdate {
    double statistic = 0.0;
    bool alarm = false;
};

/// Hotelling T2 chart on batch means: the Euclidean-summary reference
/// detector. Thresholded with the same order-statistic rule as the main
/// detector so delay comparisons run at matched ARL0.
struct HotellingMeanModel {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov_inverse;
    double threshold = 0.0;
    double alpha = 0.0;
    bool ridged = false;  // covariance was singular and stabilized
};

HotellingMeanModel hotelling_calibrate(const std::vector<Eigen::MatrixXd>& batches, double alpha);
double hotelling_statistic(const HotellingMeanModel& model, const Eigen::MatrixXd& batch);
BaselineUpdate hotelling_step(const HotellingMeanModel& model, const Eigen::MatrixXd& batch);

/// Count chart on batch totals S_t with acceptance region
/// [max(0, c - z sqrt(c)), c + z sqrt(c)]. The statistic reported is
/// |S_t - c| / sqrt(c) so threshold matching can rescale z.
struct CountChartModel {
    double c_bar = 0.0;
    double z_threshold = 3.0;
};

CountChartModel count_chart_calibrate(const std::vector<Eigen::MatrixXd>& batches);
double count_chart_statistic(const CountChartModel& model, const Eigen::MatrixXd& batch);
BaselineUpdate count_chart_step(const CountChartModel& model, const Eigen::MatrixXd& batch);

/// Max absolute standardized deviation of category proportions from the
/// reference pmf. Categories with p0 in {0, 1} are excluded (their standard
/// error is undefined); exclusions are reported on the model.
struct MaxDevModel {
    Eigen::VectorXd p0;
    std::vector<int> excluded;  // 0-based category indices left out
    double threshold = 0.0;
    int categories = 0;  // values live on {1, ..., categories}
};

MaxDevModel max_dev_calibrate(const std::vector<Eigen::MatrixXd>& batches, int categories,
                              double alpha);
MaxDevModel max_dev_with_p0(const std::vector<Eigen::MatrixXd>& batches,
                            const Eigen::VectorXd& p0, double alpha);
double max_dev_statistic(const MaxDevModel& model, const Eigen::MatrixXd& batch);
BaselineUpdate max_dev_step(const MaxDevModel& model, const Eigen::MatrixXd& batch);

}  // namespace idd::baselines
