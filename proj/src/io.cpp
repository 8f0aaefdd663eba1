#include "idd/io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace idd::io {

namespace {

constexpr int kModelFormatVersion = 1;

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) throw IoError("model file: expected a non-empty matrix");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(j.front().size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw IoError("model file: ragged matrix rows");
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j[static_cast<std::size_t>(i)].get<double>();
    return v;
}

}  // namespace

void write_stream(const std::string& path, const std::vector<Eigen::MatrixXd>& batches) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    const Eigen::Index d = batches.empty() ? 1 : batches.front().cols();
    out << "t";
    for (Eigen::Index j = 1; j <= d; ++j) out << ",x" << j;
    out << "\n";
    out.precision(17);
    for (std::size_t t = 0; t < batches.size(); ++t) {
        const auto& b = batches[t];
        for (Eigen::Index i = 0; i < b.rows(); ++i) {
            out << (t + 1);
            for (Eigen::Index j = 0; j < b.cols(); ++j) out << ',' << b(i, j);
            out << "\n";
        }
    }
    if (!out) throw IoError("failed writing stream to '" + path + "'");
}

StreamReader::StreamReader(const std::string& path) : in_(path), path_(path) {
    if (!in_) throw IoError("cannot open stream file '" + path + "'");
    std::string header;
    if (!std::getline(in_, header)) throw IoError("stream file '" + path + "' is empty");
    int commas = 0;
    for (char c : header)
        if (c == ',') ++commas;
    if (commas < 1 || header.substr(0, 1) != "t")
        throw IoError("stream file '" + path + "': header must be t,x1,...,xd");
    dim_ = commas;
}

bool StreamReader::read_row(int& t, Eigen::RowVectorXd& row) {
    std::string line;
    while (std::getline(in_, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        if (!std::getline(ss, field, ',')) continue;
        try {
            t = std::stoi(field);
        } catch (const std::exception&) {
            throw IoError("stream file '" + path_ + "': bad time index '" + field + "'");
        }
        row.resize(dim_);
        for (int j = 0; j < dim_; ++j) {
            if (!std::getline(ss, field, ','))
                throw IoError("stream file '" + path_ + "': row with fewer than d values");
            try {
                row[j] = std::stod(field);
            } catch (const std::exception&) {
                throw IoError("stream file '" + path_ + "': bad value '" + field + "'");
            }
        }
        return true;
    }
    return false;
}

std::optional<Batch> StreamReader::next() {
    std::vector<Eigen::RowVectorXd> rows;
    int t = 0;
    if (pending_valid_) {
        t = pending_t_;
        rows.push_back(pending_row_);
        pending_valid_ = false;
    } else {
        Eigen::RowVectorXd row;
        int first_t = 0;
        if (!read_row(first_t, row)) return std::nullopt;
        t = first_t;
        rows.push_back(std::move(row));
    }
    // accumulate rows while t stays the same
    Eigen::RowVectorXd row;
    int next_t = 0;
    while (read_row(next_t, row)) {
        if (next_t != t) {
            pending_valid_ = true;
            pending_t_ = next_t;
            pending_row_ = std::move(row);
            break;
        }
        rows.push_back(row);
    }
    Batch batch;
    batch.t = t;
    batch.points.resize(static_cast<Eigen::Index>(rows.size()), dim_);
    for (std::size_t i = 0; i < rows.size(); ++i) batch.points.row(static_cast<Eigen::Index>(i)) = rows[i];
    return batch;
}

std::vector<Batch> read_stream(const std::string& path) {
    StreamReader reader(path);
    std::vector<Batch> out;
    while (auto batch = reader.next()) out.push_back(std::move(*batch));
    return out;
}

const char* trigger_name(Trigger trigger) {
    switch (trigger) {
        case Trigger::none: return "none";
        case Trigger::t2: return "t2";
        case Trigger::spe: return "spe";
        case Trigger::both: return "both";
    }
    return "none";
}

void write_alarms(const std::string& path, const std::vector<MonitorUpdate>& updates) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "t,t2,spe,alarm,triggered_by\n";
    out.precision(17);
    for (const auto& u : updates)
        out << u.t << ',' << u.stats.t2 << ',' << u.stats.spe << ',' << (u.alarm ? 1 : 0) << ','
            << trigger_name(u.triggered_by) << "\n";
    if (!out) throw IoError("failed writing alarms to '" + path + "'");
}

void save_model(const std::string& path, const MonitorModel& model) {
    nlohmann::json j;
    j["format_version"] = kModelFormatVersion;
    j["barycenter"]["support"] = matrix_to_json(model.barycenter.support());
    j["barycenter"]["weights"] = vector_to_json(model.barycenter.weights());
    nlohmann::json basis;
    basis["mean_field"] = matrix_to_json(model.basis.mean_field.vectors);
    basis["eigenvalues"] = vector_to_json(model.basis.eigenvalues);
    nlohmann::json fields = nlohmann::json::array();
    for (const auto& phi : model.basis.eigenfields) fields.push_back(matrix_to_json(phi.vectors));
    basis["eigenfields"] = std::move(fields);
    basis["truncation"] = model.basis.truncation;
    basis["total_variance"] = model.basis.total_variance;
    basis["n_samples"] = model.basis.n_samples;
    j["basis"] = std::move(basis);
    j["thresholds"] = {{"t2", model.h_t2}, {"spe", model.h_spe}};
    j["alphas"] = {{"t2", model.alpha_t2}, {"spe", model.alpha_spe}};
    j["n0"] = model.n0;
    j["solver"] = {{"method", to_string(model.solver.method)},
                   {"eps_scale", model.solver.eps_scale},
                   {"marginal_tol", model.solver.marginal_tol},
                   {"max_iter", model.solver.max_iter}};

    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("failed writing model to '" + path + "'");
}

MonitorModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("model file '" + path + "': " + e.what());
    }
    if (!j.contains("format_version") || j["format_version"].get<int>() != kModelFormatVersion)
        throw IoError("model file '" + path + "': unsupported format version");

    try {
        EmpiricalMeasure barycenter(matrix_from_json(j.at("barycenter").at("support")),
                                    vector_from_json(j.at("barycenter").at("weights")));
        const auto& jb = j.at("basis");
        EigenBasis basis;
        basis.mean_field = {matrix_from_json(jb.at("mean_field")), barycenter.weights()};
        basis.eigenvalues = vector_from_json(jb.at("eigenvalues"));
        for (const auto& f : jb.at("eigenfields"))
            basis.eigenfields.push_back({matrix_from_json(f), barycenter.weights()});
        basis.truncation = jb.at("truncation").get<int>();
        basis.total_variance = jb.at("total_variance").get<double>();
        basis.n_samples = jb.at("n_samples").get<int>();

        SolverConfig solver;
        solver.method = plan_method_from_string(j.at("solver").at("method").get<std::string>());
        solver.eps_scale = j.at("solver").at("eps_scale").get<double>();
        solver.marginal_tol = j.at("solver").at("marginal_tol").get<double>();
        solver.max_iter = j.at("solver").at("max_iter").get<int>();

        return MonitorModel{std::move(barycenter),
                            std::move(basis),
                            j.at("thresholds").at("t2").get<double>(),
                            j.at("thresholds").at("spe").get<double>(),
                            j.at("alphas").at("t2").get<double>(),
                            j.at("alphas").at("spe").get<double>(),
                            j.at("n0").get<int>(),
                            solver};
    } catch (const nlohmann::json::exception& e) {
        throw IoError("model file '" + path + "': " + e.what());
    }
}

}  // namespace idd::io
