#include "idd/mfpca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace idd {

namespace {

constexpr double kWeightMatchTol = 1e-12;
constexpr double kEigenvalueFloorRel = 1e-10;

void require_same_grid(const TangentField& f, const TangentField& g, const char* where) {
    if (f.atoms() != g.atoms() || f.dim() != g.dim())
        throw DimensionError(std::string(where) + ": fields live on different grids");
    if ((f.ref_weights - g.ref_weights).cwiseAbs().maxCoeff() > kWeightMatchTol)
        throw DimensionError(std::string(where) + ": fields carry different reference weights");
}

// Rows are the fields, flattened and scaled by sqrt(w) per atom so that the
// Euclidean inner product of rows equals the weighted L2 inner product.
Eigen::MatrixXd stack_scaled(const std::vector<TangentField>& fields) {
    const Eigen::Index n = static_cast<Eigen::Index>(fields.size());
    const Eigen::Index m = fields[0].atoms();
    const Eigen::Index d = fields[0].dim();
    Eigen::VectorXd sqw = fields[0].ref_weights.cwiseSqrt();
    Eigen::MatrixXd z(n, m * d);
    for (Eigen::Index t = 0; t < n; ++t) {
        Eigen::MatrixXd scaled = fields[static_cast<std::size_t>(t)].vectors;
        scaled.array().colwise() *= sqw.array();
        z.row(t) = Eigen::Map<const Eigen::RowVectorXd>(scaled.data(), m * d);
    }
    return z;
}

}  // namespace

double weighted_inner(const TangentField& f, const TangentField& g) {
    require_same_grid(f, g, "weighted_inner");
    return ((f.vectors.array() * g.vectors.array()).rowwise().sum() * f.ref_weights.array()).sum();
}

double weighted_norm2(const TangentField& f) {
    return (f.vectors.rowwise().squaredNorm().array() * f.ref_weights.array()).sum();
}

EigenBasis fit_basis(const std::vector<TangentField>& fields, const MfpcaConfig& config) {
    const int n0 = static_cast<int>(fields.size());
    if (n0 < 3)
        throw InsufficientSamplesError("fit_basis: need at least 3 fields, got " +
                                       std::to_string(n0));
    for (const auto& f : fields) require_same_grid(fields[0], f, "fit_basis");

    const Eigen::Index m = fields[0].atoms();
    const Eigen::Index d = fields[0].dim();

    EigenBasis basis;
    basis.n_samples = n0;
    basis.mean_field.ref_weights = fields[0].ref_weights;
    basis.mean_field.vectors = Eigen::MatrixXd::Zero(m, d);
    for (const auto& f : fields) basis.mean_field.vectors += f.vectors;
    basis.mean_field.vectors /= static_cast<double>(n0);

    std::vector<TangentField> centered;
    centered.reserve(fields.size());
    for (const auto& f : fields)
        centered.push_back({f.vectors - basis.mean_field.vectors, f.ref_weights});

    // Gram route: the n0 x n0 matrix shares its nonzero spectrum with the
    // weighted covariance operator, regardless of the grid size.
    Eigen::MatrixXd z = stack_scaled(centered);
    Eigen::MatrixXd gram = z * z.transpose() / static_cast<double>(n0 - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success)
        throw DegenerateVarianceError("fit_basis: eigendecomposition failed");

    const Eigen::VectorXd evals = eig.eigenvalues();  // ascending
    const double lambda_max = evals[evals.size() - 1];
    if (!(lambda_max > 0.0))
        throw DegenerateVarianceError("fit_basis: total variance is zero");
    const double floor = lambda_max * kEigenvalueFloorRel;

    std::vector<Eigen::Index> keep;  // descending order
    for (Eigen::Index i = evals.size() - 1; i >= 0; --i)
        if (evals[i] > floor) keep.push_back(i);
    // Centering removes one degree of freedom; never report more.
    if (static_cast<int>(keep.size()) > n0 - 1) keep.resize(static_cast<std::size_t>(n0 - 1));
    const Eigen::Index r = static_cast<Eigen::Index>(keep.size());
    if (r == 0) throw DegenerateVarianceError("fit_basis: total variance is zero");

    basis.eigenvalues.resize(r);
    // phi_m = sum_t u_tm v~_t / sqrt((n0-1) lambda_m); assembled as one
    // product in the sqrt(w)-scaled coordinates, then unscaled.
    Eigen::MatrixXd coeff(n0, r);
    for (Eigen::Index k = 0; k < r; ++k) {
        const double lambda = evals[keep[static_cast<std::size_t>(k)]];
        basis.eigenvalues[k] = lambda;
        coeff.col(k) = eig.eigenvectors().col(keep[static_cast<std::size_t>(k)]) /
                       std::sqrt(static_cast<double>(n0 - 1) * lambda);
    }
    Eigen::MatrixXd phi_scaled = coeff.transpose() * z;  // r x (m*d)

    Eigen::VectorXd inv_sqw = fields[0].ref_weights.cwiseSqrt().cwiseInverse();
    basis.eigenfields.reserve(static_cast<std::size_t>(r));
    for (Eigen::Index k = 0; k < r; ++k) {
        Eigen::RowVectorXd row = phi_scaled.row(k);  // contiguous copy
        Eigen::MatrixXd vec = Eigen::Map<const Eigen::MatrixXd>(row.data(), m, d);
        vec.array().colwise() *= inv_sqw.array();
        basis.eigenfields.push_back({std::move(vec), fields[0].ref_weights});
    }

    basis.total_variance = basis.eigenvalues.sum();
    if (config.k_override > 0) {
        basis.truncation = std::clamp(config.k_override, 1, static_cast<int>(r));
    } else {
        int k = select_k(basis, config.variance_fraction);
        int cap = std::max(1, std::min(static_cast<int>(r), n0 / 2));
        basis.truncation = std::min(k, cap);
    }
    return basis;
}

Eigen::VectorXd project_scores(const EigenBasis& basis, const TangentField& field) {
    require_same_grid(basis.mean_field, field, "project_scores");
    TangentField delta{field.vectors - basis.mean_field.vectors, field.ref_weights};
    Eigen::VectorXd scores(basis.rank());
    for (Eigen::Index k = 0; k < basis.rank(); ++k)
        scores[k] = weighted_inner(delta, basis.eigenfields[static_cast<std::size_t>(k)]);
    return scores;
}

double t2_statistic(const EigenBasis& basis, const Eigen::VectorXd& scores) {
    const int k = basis.truncation;
    if (scores.size() < k)
        throw DimensionError("t2_statistic: fewer scores than the truncation level");
    double t2 = 0.0;
    for (int i = 0; i < k; ++i) t2 += scores[i] * scores[i] / basis.eigenvalues[i];
    return t2;
}

double spe_statistic(const EigenBasis& basis, const TangentField& field) {
    return chart_statistics(basis, field).spe;
}

ChartStatistics chart_statistics(const EigenBasis& basis, const TangentField& field) {
    require_same_grid(basis.mean_field, field, "chart_statistics");
    TangentField delta{field.vectors - basis.mean_field.vectors, field.ref_weights};
    const int k = basis.truncation;
    ChartStatistics out;
    out.scores.resize(k);
    for (int i = 0; i < k; ++i)
        out.scores[i] = weighted_inner(delta, basis.eigenfields[static_cast<std::size_t>(i)]);
    out.t2 = t2_statistic(basis, out.scores);
    // Energy in all directions off the retained span, including outside the
    // fitted rank, so novel directions register here.
    out.spe = std::max(0.0, weighted_norm2(delta) - out.scores.squaredNorm());
    return out;
}

double tail_energy(const EigenBasis& basis, int k) {
    if (k < 0) throw ConfigError("tail_energy: K must be >= 0");
    double sum = 0.0;
    for (Eigen::Index i = k; i < basis.rank(); ++i) sum += basis.eigenvalues[i];
    return sum;
}

int select_k(const EigenBasis& basis, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw ConfigError("select_k: fraction must lie in (0, 1]");
    const double target = fraction * basis.total_variance;
    double cum = 0.0;
    for (Eigen::Index i = 0; i < basis.rank(); ++i) {
        cum += basis.eigenvalues[i];
        if (cum >= target * (1.0 - 1e-12)) return static_cast<int>(i) + 1;
    }
    return static_cast<int>(basis.rank());
}

}  // namespace idd
