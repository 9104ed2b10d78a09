#include "sgobs/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "sgobs/dynamics.hpp"
#include "sgobs/functionals.hpp"

namespace sgobs {

namespace {

std::optional<ControllerConfig> controller_for(const ScenarioConfig& cfg) {
  if (cfg.mode == Mode::Unforced) return std::nullopt;
  return cfg.controller();
}

ClosedLoopSystem make_system(const ScenarioConfig& cfg) {
  return ClosedLoopSystem(cfg.params, cfg.grid(), controller_for(cfg), cfg.alpha, cfg.mode);
}

VectorXd initial_vector(const ScenarioConfig& cfg, const Grid& grid) {
  ClosedLoopState s;
  s.plant.z = sample_profile(cfg.z0, grid);
  s.plant.v = sample_profile(cfg.z1, grid);
  if (cfg.mode == Mode::PlantOnly) {
    VectorXd y(2 * grid.interior());
    y << s.plant.z, s.plant.v;
    return y;
  }
  s.observer.z = sample_profile(cfg.zhat0, grid);
  s.observer.v = sample_profile(cfg.zhat1, grid);
  return pack(s);
}

CertificateCheck empty_check() {
  return {true, std::numeric_limits<double>::infinity(), 0.0, 0};
}

void observe(CertificateCheck& check, double margin, double t) {
  if (margin < check.worst_margin) {
    check.worst_margin = margin;
    check.worst_time = t;
  }
  if (!(margin >= 0.0)) {
    check.passed = false;
    ++check.violations;
  }
}

}  // namespace

InitialEnergies initial_energies(const ScenarioConfig& cfg) {
  const Grid grid = cfg.grid();
  const ClosedLoopSystem system = make_system(cfg);
  const auto d = system.diagnostics(initial_vector(cfg, grid));
  return {d.H, d.E};
}

RunResult run(const ScenarioConfig& cfg) {
  const Grid grid = cfg.grid();
  if (!(cfg.T > 0.0)) throw Error(ErrorKind::InvalidArgument, "T must be positive");
  if (!(cfg.sample_dt > 0.0 && cfg.sample_dt <= cfg.T))
    throw Error(ErrorKind::InvalidArgument, "sample_dt must lie in (0, T]");

  bool certified = true;
  if (cfg.mode == Mode::ClosedLoop) {
    const auto report = check_assumption2(cfg.params);
    if (!report.holds) {
      if (!cfg.unsafe)
        throw Error(ErrorKind::InadmissibleParameters,
                    "(k, beta) outside the admissible region; pass the unsafe override "
                    "to run uncertified");
      certified = false;
    }
  }

  const ClosedLoopSystem system = make_system(cfg);
  VectorXd y = initial_vector(cfg, grid);

  IntegratorConfig icfg = cfg.integrator;
  icfg.dt_init = cfg.dt_init.value_or(std::min(1e-3, grid.h() / std::sqrt(cfg.params.k())));

  RunResult result;
  TimeSeriesRecord& rec = result.record;
  rec.info.k = cfg.params.k();
  rec.info.beta = cfg.params.beta();
  rec.info.alpha = cfg.mode == Mode::PlantOnly ? 0.0 : cfg.alpha;
  rec.info.gamma = cfg.gamma.value_or(0.0);
  rec.info.h_star = cfg.h_star;
  rec.info.n = cfg.n;
  rec.info.mode = cfg.mode;
  rec.info.certified = certified;

  const std::size_t expected = sample_count(0.0, cfg.T, cfg.sample_dt);
  rec.t.reserve(expected);
  rec.H.reserve(expected);
  rec.H_hat.reserve(expected);
  rec.E.reserve(expected);
  rec.u.reserve(expected);
  rec.y.reserve(expected);

  // Each requested snapshot is taken at the nearest output sample.
  std::vector<std::size_t> snapshot_index;
  for (double ts : cfg.snapshots)
    snapshot_index.push_back(static_cast<std::size_t>(std::llround(ts / cfg.sample_dt)));
  const VectorXd nodes = grid.interior_nodes();
  const Eigen::Index m = grid.interior();

  auto on_sample = [&](double t, const VectorXd& state) {
    const std::size_t j = rec.size();
    const auto d = system.diagnostics(state);
    rec.append(t, d.H, d.H_hat, d.E, d.u, d.y);
    if (std::find(snapshot_index.begin(), snapshot_index.end(), j) != snapshot_index.end()) {
      Snapshot snap;
      snap.t = t;
      snap.x = nodes;
      snap.plant = {state.segment(0, m), state.segment(m, m)};
      if (cfg.mode == Mode::PlantOnly)
        snap.observer = snap.plant;
      else
        snap.observer = {state.segment(2 * m, m), state.segment(3 * m, m)};
      rec.snapshots.push_back(std::move(snap));
    }
  };

  result.stats = integrate(system, y, {0.0, cfg.T}, icfg, cfg.sample_dt, on_sample);

  result.final_state.t = cfg.T;
  result.final_state.plant = {y.segment(0, m), y.segment(m, m)};
  if (cfg.mode == Mode::PlantOnly)
    result.final_state.observer = result.final_state.plant;
  else
    result.final_state.observer = {y.segment(2 * m, m), y.segment(3 * m, m)};
  return result;
}

VerificationReport verify_certificate(const TimeSeriesRecord& record,
                                      const DecayCertificate& cert) {
  if (record.size() < 3)
    throw Error(ErrorKind::Refusal, "record has fewer than 3 samples");
  if (record.info.mode != Mode::ClosedLoop)
    throw Error(ErrorKind::Refusal, "certificates apply to closed-loop records only");
  const RunInfo& info = record.info;
  if (info.k != cert.k || info.beta != cert.beta || info.alpha != cert.alpha ||
      info.h_star != cert.h_star)
    throw Error(ErrorKind::Refusal,
                "record parameters (k, beta, alpha, h_star) do not match the certificate");
  const double e0 = record.E.front();
  const double h0 = record.H.front();
  if (std::abs(e0 - cert.e0) > 1e-9 * std::max(1.0, e0) ||
      std::abs(h0 - cert.h0) > 1e-9 * std::max(1.0, h0))
    throw Error(ErrorKind::Refusal,
                "certificate was built for different initial energies (e0, h0)");

  VerificationReport report{empty_check(), empty_check(), empty_check()};
  report.absolute_floor = 1e-10 * std::max(1.0, h0);
  for (std::size_t i = 0; i < record.size(); ++i) {
    const double t = record.t[i];
    const double E = record.E[i];
    const double decay_bound =
        report.slack * cert.m_const * e0 * std::exp(-cert.delta_rate * t) +
        report.absolute_floor;
    observe(report.decay, decay_bound - E, t);

    const double gap = std::abs(record.H[i] - record.H_hat[i]);
    const double gap_bound = cert.c_corr * std::sqrt(std::max(E, 0.0)) + report.absolute_floor;
    observe(report.energy_gap, gap_bound - gap, t);

    observe(report.energy_cap, cert.h_max - std::max(record.H[i], record.H_hat[i]), t);
  }
  return report;
}

RunSummary summarize(const TimeSeriesRecord& record, double gamma, double h_star) {
  RunSummary s{gamma, true, {}, 0.0, std::nullopt, 0.0};
  if (record.empty()) {
    s.ok = false;
    s.error = "empty record";
    return s;
  }
  s.final_error = std::abs(record.H.back() - h_star);
  const double band = kBandFraction * h_star;
  std::optional<std::size_t> last_outside;
  for (std::size_t i = 0; i < record.size(); ++i)
    if (std::abs(record.H[i] - h_star) > band) last_outside = i;
  if (!last_outside)
    s.band_entry = record.t.front();
  else if (*last_outside + 1 < record.size())
    s.band_entry = record.t[*last_outside + 1];
  const double e0 = record.E.front();
  s.error_ratio = e0 > 0.0 ? record.E.back() / e0 : 0.0;
  return s;
}

const std::vector<double>& reference_gammas() {
  static const std::vector<double> gammas = {0.1, 0.3, 1.0, 3.0};
  return gammas;
}

std::vector<RunSummary> gamma_sweep(const ScenarioConfig& base,
                                    const std::vector<double>& gammas,
                                    SweepOptions options) {
  if (gammas.empty()) throw Error(ErrorKind::InvalidArgument, "gamma list is empty");
  for (double g : gammas)
    if (!(g > 0.0) || !std::isfinite(g))
      throw Error(ErrorKind::InvalidArgument, "every gamma must be > 0");
  if (base.mode == Mode::Unforced)
    throw Error(ErrorKind::InvalidArgument, "a gamma sweep needs a controlled mode");

  std::vector<RunSummary> out(gammas.size());
  auto work = [&](std::size_t i) {
    ScenarioConfig cfg = base;
    cfg.gamma = gammas[i];
    try {
      const RunResult r = run(cfg);
      out[i] = summarize(r.record, gammas[i], cfg.h_star);
    } catch (const std::exception& e) {
      out[i] = RunSummary{gammas[i], false, e.what(), 0.0, std::nullopt, 0.0};
    }
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, gammas.size()));
  if (jobs == 1) {
    for (std::size_t i = 0; i < gammas.size(); ++i) work(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned j = 0; j < jobs; ++j)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < gammas.size(); i = next++) work(i);
    });
  pool.clear();
  return out;
}

}  // namespace sgobs
