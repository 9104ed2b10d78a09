#include "sgobs/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sgobs/admissibility.hpp"
#include "sgobs/functionals.hpp"
#include "sgobs/integrator.hpp"
#include "sgobs/io.hpp"
#include "sgobs/scenario.hpp"

namespace sgobs::cli {

namespace {

std::string num(double v) { return format_number(v); }

ConfigDocument resolve_config(const std::string& source) {
  const auto& presets = preset_names();
  if (std::find(presets.begin(), presets.end(), source) != presets.end())
    return preset_document(source);
  std::ifstream in(source, std::ios::binary);
  if (!in) throw ParseError("", 0, "cannot read config '" + source + "' (not a preset or file)");
  std::ostringstream text;
  text << in.rdbuf();
  return ConfigDocument::parse(text.str());
}

void apply_overrides(ConfigDocument& doc, const std::vector<std::string>& sets) {
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ParseError(kv, 0, "--set expects key=value");
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
      return s;
    };
    doc.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw ParseError("", 0, "malformed number '" + item + "' in list");
    out.push_back(v);
  }
  return out;
}

void print_certificate(std::ostream& out, const DecayCertificate& c) {
  out << "epsilon = " << num(c.epsilon) << '\n'
      << "alpha = " << num(c.alpha) << '\n'
      << "delta1 = " << num(c.delta1) << '\n'
      << "delta2 = " << num(c.delta2) << '\n'
      << "delta3 = " << num(c.delta3) << '\n'
      << "k0 = " << num(c.k0) << '\n'
      << "M = " << num(c.m_const) << '\n'
      << "delta = " << num(c.delta_rate) << '\n'
      << "e0 = " << num(c.e0) << '\n'
      << "h0 = " << num(c.h0) << '\n'
      << "h_star = " << num(c.h_star) << '\n'
      << "C1 = " << num(c.c1_const) << '\n'
      << "C2 = " << num(c.c2_const) << '\n'
      << "H_max = " << num(c.h_max) << '\n'
      << "c_corr = " << num(c.c_corr) << '\n';
}

void print_check(std::ostream& out, const char* name, const CertificateCheck& c) {
  out << name << ": " << (c.passed ? "pass" : "FAIL") << " (worst margin " << num(c.worst_margin)
      << " at t = " << num(c.worst_time) << ", violations " << c.violations << ")\n";
}

int check_params(double k, double beta, std::ostream& out) {
  const PhysicalParams params(k, beta);
  const auto report = check_assumption2(params);
  out << "k = " << num(k) << '\n' << "beta = " << num(beta) << '\n';
  out << "eta = " << (std::isinf(report.eta) ? std::string("undefined") : num(report.eta)) << '\n';
  out << "case = " << to_string(report.case_label) << '\n';
  out << "beta_bound = " << num(beta_bound(k)) << '\n';
  if (report.holds) {
    out << "admissible\n";
    out << "epsilon_range = (" << num(report.epsilon_range.lo) << ", "
        << num(report.epsilon_range.hi) << ")\n";
    return kOk;
  }
  out << "inadmissible";
  if (beta >= 1.0) out << " (beta < 1 necessary)";
  out << '\n';
  return kDomainError;
}

double initial_energy(const PhysicalParams& params, int n) {
  const Grid grid(n);
  const VectorXd z = sample_profile(profile::PaperInitial{}, grid);
  const VectorXd v = VectorXd::Zero(grid.interior());
  return hamiltonian(z, v, z(grid.interior() - 1), params, grid);
}

void convergence_space(std::ostream& out, const PhysicalParams& params,
                       const std::vector<double>& ns, int reference_n) {
  out << "# H(0) of 5(1 - cos 2 pi x) with z1 = 0\n";
  out << "n,H0\n";
  std::vector<double> values;
  for (double nd : ns) {
    const int n = static_cast<int>(nd);
    values.push_back(initial_energy(params, n));
    out << n << ',' << num(values.back()) << '\n';
  }
  if (reference_n > 0)
    out << "reference n = " << reference_n << ": " << num(initial_energy(params, reference_n))
        << '\n';
  for (std::size_t i = 2; i < values.size(); ++i) {
    const double ratio = ns[i] / ns[i - 1];
    const double order = std::log(std::abs(values[i - 2] - values[i - 1]) /
                                  std::abs(values[i - 1] - values[i])) /
                         std::log(ratio);
    out << "observed order (n = " << ns[i - 2] << ", " << ns[i - 1] << ", " << ns[i]
        << "): " << num(order) << '\n';
  }
}

void convergence_time(std::ostream& out) {
  auto decay = [](double, const Eigen::Ref<const VectorXd>& y, Eigen::Ref<VectorXd> dydt) {
    dydt = -y;
  };
  const VectorXd y0 = VectorXd::Constant(1, 1.0);
  const double exact = std::exp(-1.0);
  out << "# y' = -y on [0, 1], fixed steps\n";
  out << "method,steps,error\n";
  for (auto [method, name] : {std::pair{FixedMethod::Rk4, "rk4"}, std::pair{FixedMethod::Dp5, "dp5"}}) {
    double prev = 0.0;
    std::vector<std::string> orders;
    for (int steps : {10, 20, 40, 80}) {
      const VectorXd y = integrate_fixed(decay, y0, {0.0, 1.0}, steps, method);
      const double err = std::abs(y(0) - exact);
      out << name << ',' << steps << ',' << num(err) << '\n';
      if (prev > 0.0) orders.push_back(num(std::log2(prev / err)));
      prev = err;
    }
    out << name << " observed orders:";
    for (const auto& o : orders) out << ' ' << o;
    out << '\n';
  }
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Observer-based boundary energy control of the sine-Gordon equation"};
  app.name("sgobs");
  app.require_subcommand(1);

  double k = 0.0, beta = 0.0;
  auto* check = app.add_subcommand("check-params", "Evaluate the admissibility inequalities");
  check->add_option("--k", k, "wave coefficient")->required();
  check->add_option("--beta", beta, "nonlinearity amplitude")->required();

  std::optional<double> cert_alpha, cert_eps, cert_e0, cert_h0, cert_hstar;
  std::string cert_config;
  auto* cert = app.add_subcommand("certificate", "Compute the exponential decay certificate");
  cert->add_option("--k", k, "wave coefficient");
  cert->add_option("--beta", beta, "nonlinearity amplitude");
  cert->add_option("--alpha", cert_alpha, "observer gain");
  cert->add_option("--epsilon", cert_eps, "certificate epsilon (optimised when omitted)");
  cert->add_option("--e0", cert_e0, "initial weighted error");
  cert->add_option("--h0", cert_h0, "initial plant energy");
  cert->add_option("--h-star", cert_hstar, "target energy");
  cert->add_option("--config", cert_config,
                   "take k, beta, alpha, h_star, e0, h0 from a config or preset");

  std::string sim_config, sim_out;
  std::optional<double> sim_gamma, sim_eps;
  std::vector<std::string> sim_sets;
  bool sim_unsafe = false, sim_verify = false, sim_quiet = false;
  auto* sim = app.add_subcommand("simulate", "Run one experiment and write a CSV time series");
  sim->add_option("--config", sim_config, "config file or preset name")->required();
  sim->add_option("--gamma", sim_gamma, "controller gain");
  sim->add_option("--set", sim_sets, "override a config key (key=value)");
  sim->add_option("--out", sim_out, "CSV destination")->required();
  sim->add_flag("--unsafe", sim_unsafe, "allow inadmissible (k, beta); output is uncertified");
  sim->add_flag("--verify", sim_verify, "check the decay certificate on the trajectory");
  sim->add_option("--epsilon", sim_eps, "certificate epsilon for --verify");
  sim->add_flag("--quiet", sim_quiet, "suppress the run summary");

  std::string sweep_config, sweep_out, sweep_gammas;
  std::vector<std::string> sweep_sets;
  unsigned sweep_jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Run the closed loop for a list of gammas");
  sweep->add_option("--config", sweep_config, "config file or preset name")->required();
  sweep->add_option("--gammas", sweep_gammas, "comma-separated gains (default 0.1,0.3,1,3)");
  sweep->add_option("--set", sweep_sets, "override a config key (key=value)");
  sweep->add_option("--out", sweep_out, "summary CSV destination (stdout when omitted)");
  sweep->add_option("--jobs", sweep_jobs, "concurrent runs")->check(CLI::PositiveNumber);

  std::string conv_which = "both", conv_ns = "250,500,1000";
  int conv_ref = 100000;
  double conv_k = 0.12, conv_beta = 0.02;
  auto* conv = app.add_subcommand("convergence", "Spatial and temporal order studies");
  conv->add_option("--which", conv_which, "space, time or both")
      ->check(CLI::IsMember({"space", "time", "both"}));
  conv->add_option("--ns", conv_ns, "grid sizes for the spatial study");
  conv->add_option("--reference-n", conv_ref, "fine reference grid (0 to skip)");
  conv->add_option("--k", conv_k, "wave coefficient");
  conv->add_option("--beta", conv_beta, "nonlinearity amplitude");

  std::string plot_in, plot_out, plot_title;
  bool plot_log = false;
  auto* plot = app.add_subcommand("plot", "Render a simulation CSV as SVG line charts");
  plot->add_option("--in", plot_in, "CSV written by simulate")->required();
  plot->add_option("--out", plot_out, "SVG destination")->required();
  plot->add_flag("--log-e", plot_log, "log scale for the weighted error");
  plot->add_option("--title", plot_title, "figure title");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  try {
    if (*check) return check_params(k, beta, out);

    if (*cert) {
      std::optional<PhysicalParams> params;
      double alpha_value = 0.0;
      std::optional<double> alpha;
      double e0 = cert_e0.value_or(0.0), h0 = cert_h0.value_or(0.0);
      double h_star = cert_hstar.value_or(0.0);
      if (!cert_config.empty()) {
        ConfigDocument doc = resolve_config(cert_config);
        if (!doc.find("gamma")) doc.set("gamma", "1");  // gamma does not enter the certificate
        ScenarioConfig cfg = to_scenario(doc);
        cfg.mode = Mode::ClosedLoop;
        params = cfg.params;
        alpha = cfg.alpha;
        h_star = cfg.h_star;
        const auto energies = initial_energies(cfg);
        e0 = energies.e0;
        h0 = energies.h0;
      } else {
        if (cert->count("--k") == 0 || cert->count("--beta") == 0) {
          err << "certificate: --k and --beta are required without --config\n";
          return kUsageError;
        }
        params = PhysicalParams(k, beta);
      }
      if (cert_alpha) alpha = cert_alpha;
      if (cert_e0) e0 = *cert_e0;
      if (cert_h0) h0 = *cert_h0;
      if (cert_hstar) h_star = *cert_hstar;

      const auto report = check_assumption2(*params);
      if (!report.holds) {
        out << "inadmissible parameters: no certificate\n";
        return kDomainError;
      }
      DecayCertificate c{};
      if (cert_eps) {
        alpha_value = alpha.value_or(1.0 / *cert_eps);
        c = decay_certificate(*params, *cert_eps, alpha_value, e0, h_star, h0);
      } else {
        c = optimize_epsilon(*params, alpha, e0, h_star, h0).second;
      }
      const Interval gains = alpha_interval(*params, c.epsilon);
      out << "k = " << num(c.k) << '\n' << "beta = " << num(c.beta) << '\n'
          << "eta = " << num(report.eta) << '\n';
      out << "alpha_interval = [" << num(gains.lo) << ", " << num(gains.hi) << "]\n";
      print_certificate(out, c);
      return kOk;
    }

    if (*sim) {
      ConfigDocument doc = resolve_config(sim_config);
      apply_overrides(doc, sim_sets);
      if (sim_gamma) doc.set("gamma", num(*sim_gamma));
      ScenarioConfig cfg = to_scenario(doc);
      cfg.unsafe = sim_unsafe;
      const RunResult result = run(cfg);
      emit_csv(result.record, sim_out);
      const auto& rec = result.record;
      if (!rec.info.certified)
        err << "warning: (k, beta) outside the admissible region; output is uncertified\n";
      if (!sim_quiet) {
        out << "mode = " << to_string(cfg.mode) << '\n'
            << "samples = " << rec.size() << '\n'
            << "accepted_steps = " << result.stats.accepted << '\n'
            << "rejected_steps = " << result.stats.rejected << '\n'
            << "H(0) = " << num(rec.H.front()) << '\n'
            << "H(T) = " << num(rec.H.back()) << '\n'
            << "H_hat(T) = " << num(rec.H_hat.back()) << '\n'
            << "E(0) = " << num(rec.E.front()) << '\n'
            << "E(T) = " << num(rec.E.back()) << '\n';
      }
      if (sim_verify) {
        if (cfg.mode != Mode::ClosedLoop) {
          err << "--verify needs a closed-loop run\n";
          return kUsageError;
        }
        const double e0 = rec.E.front(), h0 = rec.H.front();
        const DecayCertificate c =
            sim_eps ? decay_certificate(cfg.params, *sim_eps, cfg.alpha, e0, cfg.h_star, h0)
                    : optimize_epsilon(cfg.params, cfg.alpha, e0, cfg.h_star, h0).second;
        const auto report = verify_certificate(rec, c);
        out << "certificate epsilon = " << num(c.epsilon) << ", M = " << num(c.m_const)
            << ", delta = " << num(c.delta_rate) << '\n';
        print_check(out, "decay", report.decay);
        print_check(out, "energy_gap", report.energy_gap);
        print_check(out, "energy_cap", report.energy_cap);
        return report.passed() ? kOk : kDomainError;
      }
      return kOk;
    }

    if (*sweep) {
      ConfigDocument doc = resolve_config(sweep_config);
      apply_overrides(doc, sweep_sets);
      // The sweep supplies gamma itself.
      if (!doc.find("gamma")) doc.set("gamma", "1");
      const ScenarioConfig cfg = to_scenario(doc);
      const std::vector<double> gammas =
          sweep_gammas.empty() ? reference_gammas() : parse_list(sweep_gammas);
      const auto rows = gamma_sweep(cfg, gammas, SweepOptions{sweep_jobs});
      if (sweep_out.empty()) {
        write_sweep_csv(rows, out);
      } else {
        std::ofstream file(sweep_out, std::ios::binary | std::ios::trunc);
        if (!file) throw Error(ErrorKind::Io, "cannot open '" + sweep_out + "' for writing");
        write_sweep_csv(rows, file);
        if (!file) throw Error(ErrorKind::Io, "failed writing '" + sweep_out + "'");
      }
      const bool any_failed =
          std::any_of(rows.begin(), rows.end(), [](const RunSummary& r) { return !r.ok; });
      return any_failed ? kDomainError : kOk;
    }

    if (*conv) {
      if (conv_which == "space" || conv_which == "both")
        convergence_space(out, PhysicalParams(conv_k, conv_beta), parse_list(conv_ns), conv_ref);
      if (conv_which == "time" || conv_which == "both") convergence_time(out);
      return kOk;
    }

    if (*plot) {
      const TimeSeriesRecord rec = read_csv(std::filesystem::path(plot_in));
      PlotOptions options;
      options.log_error = plot_log;
      options.title = plot_title;
      std::ofstream file(plot_out, std::ios::binary | std::ios::trunc);
      if (!file) throw Error(ErrorKind::Io, "cannot open '" + plot_out + "' for writing");
      file << render_svg(rec, options);
      if (!file) throw Error(ErrorKind::Io, "failed writing '" + plot_out + "'");
      return kOk;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return kDomainError;
  }
  return kUsageError;
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace sgobs::cli
