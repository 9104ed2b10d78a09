#ifndef SGOBS_RECORD_HPP
#define SGOBS_RECORD_HPP

#include <optional>
#include <string>
#include <vector>

#include "sgobs/core.hpp"

namespace sgobs {

enum class Mode { ClosedLoop, Unforced, PlantOnly };

const char* to_string(Mode mode);
/// Accepts closed-loop, unforced, plant-only.
std::optional<Mode> parse_mode(const std::string& text);

/// Parameters a record was produced with; used to refuse mismatched
/// certificates.
struct RunInfo {
  double k = 0.0;
  double beta = 0.0;
  double alpha = 0.0;
  double gamma = 0.0;
  double h_star = 0.0;
  int n = 0;
  Mode mode = Mode::ClosedLoop;
  /// false when the run was forced outside the admissible (k, beta) region.
  bool certified = true;
};

struct Snapshot {
  double t;
  VectorXd x;
  FieldState plant;
  FieldState observer;
};

struct TimeSeriesRecord {
  RunInfo info;
  std::vector<double> t;
  std::vector<double> H;
  std::vector<double> H_hat;
  std::vector<double> E;
  std::vector<double> u;
  std::vector<double> y;
  std::vector<Snapshot> snapshots;

  std::size_t size() const noexcept { return t.size(); }
  bool empty() const noexcept { return t.empty(); }

  void append(double t_, double H_, double H_hat_, double E_, double u_, double y_) {
    t.push_back(t_);
    H.push_back(H_);
    H_hat.push_back(H_hat_);
    E.push_back(E_);
    u.push_back(u_);
    y.push_back(y_);
  }
};

}  // namespace sgobs

#endif  // SGOBS_RECORD_HPP
