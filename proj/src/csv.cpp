#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sgobs/io.hpp"

namespace sgobs {

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

class CountingWriter {
 public:
  explicit CountingWriter(std::ostream& out) : out_(out) {}

  void line(const std::string& text) {
    out_ << text << '\n';
    bytes_ += text.size() + 1;
  }

  std::size_t bytes() const { return bytes_; }

 private:
  std::ostream& out_;
  std::size_t bytes_ = 0;
};

std::string join(std::initializer_list<double> values) {
  std::string row;
  bool first = true;
  for (double v : values) {
    if (!first) row += ',';
    row += format_number(v);
    first = false;
  }
  return row;
}

double parse_field(std::string_view text, int line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw Error(ErrorKind::Io,
                "csv line " + std::to_string(line) + ": malformed number '" +
                    std::string(text) + "'");
  return value;
}

}  // namespace

std::size_t write_csv(const TimeSeriesRecord& record, std::ostream& out) {
  CountingWriter w(out);
  if (!record.info.certified)
    w.line("# uncertified: (k, beta) outside the admissible region");
  w.line("t,H,H_hat,E,u,y");
  for (std::size_t i = 0; i < record.size(); ++i)
    w.line(join({record.t[i], record.H[i], record.H_hat[i], record.E[i], record.u[i],
                 record.y[i]}));
  return w.bytes();
}

std::filesystem::path snapshot_path(const std::filesystem::path& main, double t) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", t);
  std::filesystem::path out = main;
  out.replace_filename(main.stem().string() + ".snap" + buf + ".csv");
  return out;
}

std::size_t emit_csv(const TimeSeriesRecord& record, const std::filesystem::path& path) {
  if (record.empty()) throw Error(ErrorKind::InvalidArgument, "record is empty");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  const std::size_t bytes = write_csv(record, out);
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path.string() + "'");

  for (const Snapshot& snap : record.snapshots) {
    const auto snap_path = snapshot_path(path, snap.t);
    std::ofstream s(snap_path, std::ios::binary | std::ios::trunc);
    if (!s) throw Error(ErrorKind::Io, "cannot open '" + snap_path.string() + "' for writing");
    CountingWriter w(s);
    w.line("x,z,v,z_hat,v_hat");
    for (Eigen::Index i = 0; i < snap.x.size(); ++i)
      w.line(join({snap.x(i), snap.plant.z(i), snap.plant.v(i), snap.observer.z(i),
                   snap.observer.v(i)}));
    s.flush();
    if (!s) throw Error(ErrorKind::Io, "failed writing '" + snap_path.string() + "'");
  }
  return bytes;
}

TimeSeriesRecord read_csv(std::istream& in) {
  TimeSeriesRecord record;
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.starts_with("# uncertified")) record.info.certified = false;
      continue;
    }
    if (!header) {
      if (line != "t,H,H_hat,E,u,y")
        throw Error(ErrorKind::Io, "csv line " + std::to_string(line_no) +
                                       ": expected header t,H,H_hat,E,u,y");
      header = true;
      continue;
    }
    double f[6];
    std::string_view rest = line;
    for (int c = 0; c < 6; ++c) {
      const auto comma = rest.find(',');
      if ((c < 5) == (comma == std::string_view::npos))
        throw Error(ErrorKind::Io,
                    "csv line " + std::to_string(line_no) + ": expected 6 columns");
      f[c] = parse_field(rest.substr(0, comma), line_no);
      rest = c < 5 ? rest.substr(comma + 1) : std::string_view{};
    }
    record.append(f[0], f[1], f[2], f[3], f[4], f[5]);
  }
  if (!header) throw Error(ErrorKind::Io, "csv has no header");
  return record;
}

TimeSeriesRecord read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  return read_csv(in);
}

std::size_t write_sweep_csv(const std::vector<RunSummary>& rows, std::ostream& out) {
  CountingWriter w(out);
  w.line("gamma,final_error,band_entry,error_ratio,status");
  for (const RunSummary& r : rows) {
    std::string row = format_number(r.gamma) + ',';
    if (r.ok) {
      row += format_number(r.final_error) + ',';
      row += (r.band_entry ? format_number(*r.band_entry) : std::string("never")) + ',';
      row += format_number(r.error_ratio) + ",ok";
    } else {
      std::string msg = r.error;
      for (char& c : msg)
        if (c == ',' || c == '\n') c = ';';
      row += ",,,error: " + msg;
    }
    w.line(row);
  }
  return w.bytes();
}

}  // namespace sgobs
