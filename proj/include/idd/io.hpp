#pragma once

#include <Eigen/Core>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "idd/detector.hpp"
#include "idd/errors.hpp"

namespace idd::io {

/// One row group of a stream file.
struct Batch {
    int t = 0;
    Eigen::MatrixXd points;
};

/// Stream files are CSV with header "t,x1,...,xd"; consecutive rows sharing
/// t form one batch.
void write_stream(const std::string& path, const std::vector<Eigen::MatrixXd>& batches);

/// Incremental reader; holds one batch in memory at a time.
class StreamReader {
  public:
    explicit StreamReader(const std::string& path);
    /// Next batch, or nullopt at end of file.
    std::optional<Batch> next();
    int dim() const { return dim_; }

  private:
    std::ifstream in_;
    std::string path_;
    int dim_ = 0;
    bool pending_valid_ = false;
    int pending_t_ = 0;
    Eigen::RowVectorXd pending_row_;

    bool read_row(int& t, Eigen::RowVectorXd& row);
};

/// Convenience: read the whole stream at once.
std::vector<Batch> read_stream(const std::string& path);

/// Alarm files are CSV "t,t2,spe,alarm,triggered_by".
void write_alarms(const std::string& path, const std::vector<MonitorUpdate>& updates);

/// Model files are versioned JSON holding the barycenter, the eigenbasis,
/// thresholds, and the solver settings snapshot.
void save_model(const std::string& path, const MonitorModel& model);
MonitorModel load_model(const std::string& path);

const char* trigger_name(Trigger trigger);

}  // namespace idd::io
