#ifndef SGOBS_SCENARIO_HPP
#define SGOBS_SCENARIO_HPP

// Experiment configuration, execution and post-hoc verification.
//
// Configuration documents are line-oriented UTF-8 text:
//
//   # comment
//   key = value
//
// Keys: k, beta, alpha, gamma, h_star, psi, psi_scale, n, T, sample_dt, rtol,
// atol, z0, z1, zhat0, zhat1, mode, snapshots. Profile values are `zero`,
// `const:<c>`, `paper` or `expr:<expression in x>`; `psi` is `linear` (slope
// k) or `tanh` (scale psi_scale); `mode` is closed-loop, unforced or
// plant-only; `snapshots` is a comma-separated list of times.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgobs/admissibility.hpp"
#include "sgobs/core.hpp"
#include "sgobs/integrator.hpp"
#include "sgobs/record.hpp"

namespace sgobs {

/// Raw `key = value` entries with their source line numbers.
class ConfigDocument {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  /// Throws ParseError on malformed lines, unknown or duplicate keys.
  static ConfigDocument parse(std::string_view text);

  /// Sets or replaces a key (line 0 marks a command-line override).
  void set(const std::string& key, std::string value);

  const Entry* find(const std::string& key) const;
  const std::map<std::string, Entry>& entries() const noexcept { return entries_; }

 private:
  std::map<std::string, Entry> entries_;
};

const std::vector<std::string>& config_keys();

/// Names accepted by preset_document().
const std::vector<std::string>& preset_names();

/// The reference experiment: k = 0.12, beta = 0.02, alpha = 20, H* = 10,
/// n = 1000, T = 50, z0 = 5 (1 - cos 2 pi x), z1 = 0, observer at rest.
/// gamma is left unset.
ConfigDocument preset_document(const std::string& name);

struct ScenarioConfig {
  PhysicalParams params{0.12, 0.02};
  int n = 1000;
  /// Required in closed-loop and plant-only modes.
  std::optional<double> gamma;
  double h_star = 10.0;
  GainFunction psi = GainFunction::linear(0.12);
  double alpha = 20.0;
  ProfileDescriptor z0 = profile::PaperInitial{};
  ProfileDescriptor z1 = profile::Zero{};
  ProfileDescriptor zhat0 = profile::Zero{};
  ProfileDescriptor zhat1 = profile::Zero{};
  double T = 50.0;
  double sample_dt = 0.01;
  IntegratorConfig integrator{};
  /// When unset the run uses min(1e-3, h / sqrt(k)).
  std::optional<double> dt_init;
  Mode mode = Mode::Unforced;
  std::vector<double> snapshots;
  /// Permit closed-loop runs with inadmissible (k, beta); output is marked
  /// uncertified.
  bool unsafe = false;

  Grid grid() const { return Grid(n); }
  ControllerConfig controller() const;
  ObserverConfig observer() const { return ObserverConfig(alpha, zhat0, zhat1); }
};

/// Validates a document into a scenario. Unspecified keys take the defaults
/// above; gamma has no default in controlled modes.
ScenarioConfig to_scenario(const ConfigDocument& doc);

ScenarioConfig load_config(std::string_view text);

/// Renders the scenario back into document form (17 significant digits).
std::string to_document(const ScenarioConfig& config);

struct RunResult {
  TimeSeriesRecord record;
  ClosedLoopState final_state;
  IntegrationStats stats;
};

/// Integrates the configured system and samples H, H_hat, E, u, y every
/// sample_dt. Closed-loop runs refuse inadmissible parameters unless
/// `unsafe` is set. Integrator failures surface as IntegrationError.
RunResult run(const ScenarioConfig& config);

/// Initial plant energy and initial weighted error of a scenario.
struct InitialEnergies {
  double h0;
  double e0;
};

InitialEnergies initial_energies(const ScenarioConfig& config);

/// Multiplicative slack on the exponential bound.
inline constexpr double kDecaySlack = 1.05;

struct CertificateCheck {
  bool passed;
  /// Smallest bound - value over all samples (negative when violated).
  double worst_margin;
  /// Sample time of the worst margin.
  double worst_time;
  std::size_t violations;
};

struct VerificationReport {
  CertificateCheck decay;       // E(t) <= 1.05 M E(0) exp(-delta t)
  CertificateCheck energy_gap;  // |H - H_hat| <= c_corr sqrt(E)
  CertificateCheck energy_cap;  // max(H, H_hat) <= H_max
  double slack = kDecaySlack;
  /// Absolute allowance on E, 1e-10 max(1, H(0)), so a zero initial error
  /// does not demand E == 0 exactly.
  double absolute_floor = 0.0;

  bool passed() const { return decay.passed && energy_gap.passed && energy_cap.passed; }
};

/// Checks a closed-loop record against the certificate built for it. Refuses
/// (ErrorKind::Refusal) records with fewer than 3 samples, records that are
/// not closed-loop, or parameters that do not match the certificate.
VerificationReport verify_certificate(const TimeSeriesRecord& record,
                                      const DecayCertificate& cert);

/// Relative width of the energy band around H*.
inline constexpr double kBandFraction = 0.05;

struct RunSummary {
  double gamma;
  bool ok;
  std::string error;
  double final_error;  // |H(T) - H*|
  /// First time after which H stays inside H* (1 +- 5%); empty if never.
  std::optional<double> band_entry;
  double error_ratio;  // E(T) / E(0)
};

RunSummary summarize(const TimeSeriesRecord& record, double gamma, double h_star);

struct SweepOptions {
  /// Runs executed concurrently; results are merged in input order.
  unsigned jobs = 1;
};

/// One run per gamma on top of `base`. Per-run failures are recorded in the
/// summary and do not stop the sweep.
std::vector<RunSummary> gamma_sweep(const ScenarioConfig& base,
                                    const std::vector<double>& gammas,
                                    SweepOptions options = {});

/// The documented reference sweep.
const std::vector<double>& reference_gammas();

}  // namespace sgobs

#endif  // SGOBS_SCENARIO_HPP
