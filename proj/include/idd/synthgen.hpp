#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "idd/empirical_measure.hpp"
#include "idd/errors.hpp"

namespace idd::synth {

/// Parameters of one convex-potential deformation map
///   T(x) = x + eps * sum_j w_j h_beta(<a_j, x> - c_j) a_j,
/// the gradient of a strictly convex potential, hence an optimal transport
/// map from any absolutely continuous base law to its pushforward.
struct DeformationParams {
    Eigen::MatrixXd directions;  // J x d, unit rows
    Eigen::VectorXd weights;     // J positive, sum 1
    Eigen::VectorXd offsets;     // J
    double magnitude = 0.3;      // eps
    double smoothness = 5.0;     // beta

    void validate() const;
};

enum class Scenario { barycenter, mm_reweight, copula_shift, poisson_spike, ordinal_drift };

const char* to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

/// K-component product-Beta mixture on [0,1]^d.
struct MixtureSpec {
    Eigen::VectorXd weights;               // pi on the simplex
    std::vector<Eigen::MatrixXd> shapes;   // per component: d x 2 (alpha | beta)

    bool empty() const { return shapes.empty(); }
    void validate(int d) const;
};

/// Everything needed to generate one stream deterministically from `seed`.
struct StreamSpec {
    Scenario scenario = Scenario::barycenter;
    int d = 2;
    int batch_size = 100;  // N
    int horizon = 100;     // T
    int change_point = 50; // kappa; batches t <= kappa are pre-change

    // continuous scenarios
    double delta_loc = 0.15;   // S1 logit-scale location shift
    double delta_mm = 2.0;     // S2 log-normal reweighting spread
    double rho = 0.6;          // S3 target equicorrelation
    int deform_j = 3;          // J ridge directions
    double deform_beta = 5.0;  // smoothness
    double deform_eps = 0.3;   // pre/post deformation magnitude
    MixtureSpec mixture;       // empty => default 4-component layout from seed

    // discrete scenarios
    double lambda0 = 5.0;      // Poisson rate
    double alpha_mix = 0.05;   // spike/mixture proportion
    int spike_value = 25;      // k*
    bool heavy_tail = false;   // mean-matched two-rate Poisson variant
    double heavy_rate = 15.0;  // second rate of the heavy-tail variant
    int ramp_length = 30;      // ordinal drift ramp
    Eigen::VectorXd ordinal_p0;  // empty => default pmf on 6 classes

    std::uint64_t seed = 0;

    void validate() const;
};

/// Default mixture for the continuous scenarios: four product-Beta
/// components whose mean vectors form a parallelogram, so the paired
/// reweighting of mm_reweight preserves the global mean exactly.
MixtureSpec default_mixture(int d, std::uint64_t seed);

/// N i.i.d. draws from the spec's mixture (or the default one).
Eigen::MatrixXd sample_reference(const StreamSpec& spec, std::uint64_t seed);

double h_beta(double z, double beta);
Eigen::VectorXd apply_deformation(const DeformationParams& params, const Eigen::VectorXd& x);
Eigen::MatrixXd apply_deformation(const DeformationParams& params, const Eigen::MatrixXd& points);

/// Fresh random deformation: directions uniform on the sphere, Dirichlet(1)
/// weights, offsets uniform over the projection range of [0,1]^d.
DeformationParams random_deformation(int d, int j, double eps, double beta, std::uint64_t seed);

struct MonotonicityReport {
    bool pass = false;
    double worst_margin = 0.0;
};

/// Sampled 2-cycle monotonicity audit: <T(x) - T(y), x - y> >= -1e-10 over
/// n_pairs uniform pairs. Convex-potential gradients always pass; written
/// against a generic map so adversarial controls can be checked too.
MonotonicityReport monotonicity_check(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& map, int dim, int n_pairs,
    std::uint64_t seed);
MonotonicityReport monotonicity_check(const DeformationParams& params, int n_pairs,
                                      std::uint64_t seed);

/// Rank-preserving reordering of the sample columns toward a Gaussian-copula
/// score matrix with equicorrelation rho. Every column of the result is a
/// permutation of the input column.
Eigen::MatrixXd iman_conover(const Eigen::MatrixXd& base, double rho, std::uint64_t seed);

std::vector<EmpiricalMeasure> gen_stream_continuous(const StreamSpec& spec);
std::vector<EmpiricalMeasure> gen_stream_poisson_spike(const StreamSpec& spec);
std::vector<EmpiricalMeasure> gen_stream_ordinal_drift(const StreamSpec& spec);

/// Dispatch on spec.scenario.
std::vector<EmpiricalMeasure> gen_stream(const StreamSpec& spec);

/// Same stream as raw N x d batches, duplicates kept. Baselines that need
/// sample multiplicities (totals, proportions, batch means) consume this
/// form; the measure form merges duplicate atoms.
std::vector<Eigen::MatrixXd> gen_stream_raw(const StreamSpec& spec);

}  // namespace idd::synth
