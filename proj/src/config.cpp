#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sgobs/scenario.hpp"

namespace sgobs {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string render(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double parse_number(const std::string& key, const ConfigDocument::Entry& entry) {
  const std::string& text = entry.value;
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(value))
    throw ParseError(key, entry.line, "expected a finite number, got '" + text + "'");
  return value;
}

int parse_integer(const std::string& key, const ConfigDocument::Entry& entry) {
  const std::string& text = entry.value;
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError(key, entry.line, "expected an integer, got '" + text + "'");
  return value;
}

}  // namespace

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::ClosedLoop: return "closed-loop";
    case Mode::Unforced: return "unforced";
    case Mode::PlantOnly: return "plant-only";
  }
  return "?";
}

std::optional<Mode> parse_mode(const std::string& text) {
  if (text == "closed-loop") return Mode::ClosedLoop;
  if (text == "unforced") return Mode::Unforced;
  if (text == "plant-only") return Mode::PlantOnly;
  return std::nullopt;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "k",  "beta", "alpha",     "gamma", "h_star", "psi", "psi_scale",
      "n",  "T",    "sample_dt", "rtol",  "atol",   "z0",  "z1",
      "zhat0", "zhat1", "mode",  "snapshots"};
  return keys;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"paper-5.2"};
  return names;
}

ConfigDocument ConfigDocument::parse(std::string_view text) {
  ConfigDocument doc;
  const auto& keys = config_keys();
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("", line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError("", line_no, "missing key before '='");
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ParseError(key, line_no, "unknown key");
    if (doc.entries_.count(key))
      throw ParseError(key, line_no,
                       "duplicate key (first set on line " +
                           std::to_string(doc.entries_.at(key).line) + ")");
    doc.entries_[key] = Entry{value, line_no};
    if (end == text.size()) break;
  }
  return doc;
}

void ConfigDocument::set(const std::string& key, std::string value) {
  const auto& keys = config_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end())
    throw ParseError(key, 0, "unknown key");
  entries_[key] = Entry{std::move(value), 0};
}

const ConfigDocument::Entry* ConfigDocument::find(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

ConfigDocument preset_document(const std::string& name) {
  if (name == "paper-5.2") {
    return ConfigDocument::parse(
        "mode = closed-loop\n"
        "k = 0.12\n"
        "beta = 0.02\n"
        "alpha = 20\n"
        "h_star = 10\n"
        "psi = linear\n"
        "n = 1000\n"
        "T = 50\n"
        "sample_dt = 0.01\n"
        "z0 = paper\n"
        "z1 = zero\n"
        "zhat0 = zero\n"
        "zhat1 = zero\n");
  }
  throw ParseError("", 0, "unknown preset '" + name + "'");
}

ControllerConfig ScenarioConfig::controller() const {
  if (!gamma) throw ParseError("gamma", 0, "required in " + std::string(to_string(mode)) + " mode");
  return ControllerConfig(*gamma, h_star, psi);
}

ScenarioConfig to_scenario(const ConfigDocument& doc) {
  ScenarioConfig cfg;

  auto number = [&](const char* key, double& target) {
    if (const auto* e = doc.find(key)) target = parse_number(key, *e);
  };
  auto require = [&](const char* key, bool ok, const std::string& message) {
    if (!ok) {
      const auto* e = doc.find(key);
      throw ParseError(key, e ? e->line : 0, message);
    }
  };

  if (const auto* e = doc.find("mode")) {
    const auto mode = parse_mode(e->value);
    if (!mode)
      throw ParseError("mode", e->line,
                       "expected closed-loop, unforced or plant-only, got '" + e->value + "'");
    cfg.mode = *mode;
  }

  double k = cfg.params.k();
  double beta = cfg.params.beta();
  number("k", k);
  number("beta", beta);
  require("k", k > 0.0, "must be > 0");
  require("beta", beta > 0.0, "must be > 0");
  cfg.params = PhysicalParams(k, beta);

  number("alpha", cfg.alpha);
  require("alpha", cfg.alpha > 0.0, "must be > 0");

  if (const auto* e = doc.find("gamma")) {
    const double gamma = parse_number("gamma", *e);
    require("gamma", gamma > 0.0, "must be > 0");
    cfg.gamma = gamma;
  }

  number("h_star", cfg.h_star);
  require("h_star", cfg.h_star >= 0.0, "must be >= 0");

  double psi_scale = 1.0;
  number("psi_scale", psi_scale);
  require("psi_scale", psi_scale > 0.0, "must be > 0");
  std::string psi = "linear";
  if (const auto* e = doc.find("psi")) psi = e->value;
  if (psi == "linear") {
    cfg.psi = GainFunction::linear(cfg.params.k());
  } else if (psi == "tanh") {
    cfg.psi = GainFunction::scaled_tanh(psi_scale);
  } else {
    require("psi", false, "expected linear or tanh, got '" + psi + "'");
  }

  if (const auto* e = doc.find("n")) cfg.n = parse_integer("n", *e);
  require("n", cfg.n >= 3, "must be an integer >= 3");

  number("T", cfg.T);
  require("T", cfg.T > 0.0, "must be > 0");
  number("sample_dt", cfg.sample_dt);
  require("sample_dt", cfg.sample_dt > 0.0 && cfg.sample_dt <= cfg.T, "must lie in (0, T]");

  number("rtol", cfg.integrator.rtol);
  require("rtol", cfg.integrator.rtol > 0.0, "must be > 0");
  number("atol", cfg.integrator.atol);
  require("atol", cfg.integrator.atol > 0.0, "must be > 0");

  auto profile_key = [&](const char* key, ProfileDescriptor& target) {
    if (const auto* e = doc.find(key)) {
      try {
        target = parse_profile(e->value);
      } catch (const Error& err) {
        throw ParseError(key, e->line, err.what());
      }
    }
  };
  profile_key("z0", cfg.z0);
  profile_key("z1", cfg.z1);
  profile_key("zhat0", cfg.zhat0);
  profile_key("zhat1", cfg.zhat1);

  if (const auto* e = doc.find("snapshots")) {
    std::string_view rest = e->value;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string item(trim(rest.substr(0, comma)));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      if (item.empty()) continue;
      const double t = parse_number("snapshots", ConfigDocument::Entry{item, e->line});
      if (t < 0.0 || t > cfg.T)
        throw ParseError("snapshots", e->line, "snapshot time " + item + " outside [0, T]");
      cfg.snapshots.push_back(t);
    }
    std::sort(cfg.snapshots.begin(), cfg.snapshots.end());
  }

  if (cfg.mode != Mode::Unforced && !cfg.gamma)
    throw ParseError("gamma", 0,
                     std::string("required in ") + to_string(cfg.mode) + " mode (no default)");
  return cfg;
}

ScenarioConfig load_config(std::string_view text) {
  return to_scenario(ConfigDocument::parse(text));
}

std::string to_document(const ScenarioConfig& c) {
  std::ostringstream out;
  out << "mode = " << to_string(c.mode) << '\n'
      << "k = " << render(c.params.k()) << '\n'
      << "beta = " << render(c.params.beta()) << '\n'
      << "alpha = " << render(c.alpha) << '\n';
  if (c.gamma) out << "gamma = " << render(*c.gamma) << '\n';
  out << "h_star = " << render(c.h_star) << '\n';
  if (c.psi.kind() == GainFunction::Kind::Linear) {
    out << "psi = linear\n";
  } else {
    out << "psi = tanh\npsi_scale = " << render(c.psi.parameter()) << '\n';
  }
  out << "n = " << c.n << '\n'
      << "T = " << render(c.T) << '\n'
      << "sample_dt = " << render(c.sample_dt) << '\n'
      << "rtol = " << render(c.integrator.rtol) << '\n'
      << "atol = " << render(c.integrator.atol) << '\n'
      << "z0 = " << describe(c.z0) << '\n'
      << "z1 = " << describe(c.z1) << '\n'
      << "zhat0 = " << describe(c.zhat0) << '\n'
      << "zhat1 = " << describe(c.zhat1) << '\n';
  if (!c.snapshots.empty()) {
    out << "snapshots = ";
    for (std::size_t i = 0; i < c.snapshots.size(); ++i)
      out << (i ? "," : "") << render(c.snapshots[i]);
    out << '\n';
  }
  return out.str();
}

}  // namespace sgobs
