#ifndef SGOBS_IO_HPP
#define SGOBS_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sgobs/record.hpp"
#include "sgobs/scenario.hpp"

namespace sgobs {

/// %.17g: round-trips every double, renders zero as `0`.
std::string format_number(double value);

/// Header `t,H,H_hat,E,u,y`, one LF-terminated row per sample. Uncertified
/// records get a leading `# uncertified ...` comment line. Returns bytes written.
std::size_t write_csv(const TimeSeriesRecord& record, std::ostream& out);

/// Writes `path` and one `<stem>.snap<t>.csv` per snapshot next to it
/// (header `x,z,v,z_hat,v_hat`). Returns the bytes of the main file. Throws
/// Io when a destination cannot be written.
std::size_t emit_csv(const TimeSeriesRecord& record, const std::filesystem::path& path);

std::filesystem::path snapshot_path(const std::filesystem::path& main, double t);

/// Reads the series written by write_csv; comment lines are skipped.
TimeSeriesRecord read_csv(std::istream& in);
TimeSeriesRecord read_csv(const std::filesystem::path& path);

std::size_t write_sweep_csv(const std::vector<RunSummary>& rows, std::ostream& out);

struct PlotOptions {
  bool log_error = false;
  int width = 900;
  int panel_height = 220;
  std::string title;
};

/// Stacked line charts of H and H_hat, E, and u against t.
std::string render_svg(const TimeSeriesRecord& record, const PlotOptions& options);

}  // namespace sgobs

#endif  // SGOBS_IO_HPP
