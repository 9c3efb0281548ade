#include "bohmgrid/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bohmgrid/errors.hpp"

namespace bohm {

namespace {

const char* kPolyfitConfig = R"cfg(# Reference two-packet experiment, exact polynomial fitting in the interior.
[packets]
packet = 0.70710678118654752 0.0 -3.0 4.0
packet = 0.70710678118654752 0.0 3.0 4.0

[grid]
kind = uniform
lo = -8.0
hi = 8.0
count = 51

[step]
dt = 0.01
num_steps = 5000
potential = free

[amp_fit]
estimator = exact
basis_count = 7
interior_half_width = 3
boundary_degree = 2
boundary_extension = 7
weight_kernel = uniform

[phase_fit]
estimator = exact
basis_count = 7
interior_half_width = 3
boundary_degree = 2
boundary_extension = 7
weight_kernel = uniform

[output]
directory = out/paper_polyfit
snapshot_stride = 10
emit_trajectories = true
emit_fields = false
emit_errors = true
emit_summary = true
)cfg";

const char* kLsqConfig = R"cfg(# Reference two-packet experiment, mild least-squares fitting in the interior.
[packets]
packet = 0.70710678118654752 0.0 -3.0 4.0
packet = 0.70710678118654752 0.0 3.0 4.0

[grid]
kind = uniform
lo = -8.0
hi = 8.0
count = 51

[step]
dt = 0.01
num_steps = 5000
potential = free

[amp_fit]
estimator = lsq
basis_count = 7
interior_half_width = 4
boundary_degree = 2
boundary_extension = 7
weight_kernel = uniform

[phase_fit]
estimator = lsq
basis_count = 7
interior_half_width = 4
boundary_degree = 2
boundary_extension = 7
weight_kernel = uniform

[output]
directory = out/paper_lsq
snapshot_stride = 10
emit_trajectories = true
emit_fields = false
emit_errors = true
emit_summary = true
)cfg";

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

class Parser {
 public:
  Parser(const std::string& text, std::string source)
      : text_(text), source_(std::move(source)) {}

  RunConfig parse() {
    std::istringstream in(text_);
    std::string raw;
    while (std::getline(in, raw)) {
      ++line_;
      const std::string line = trim(raw);
      if (line.empty() || line.front() == '#') continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail("malformed section header");
        enter_section(trim(line.substr(1, line.size() - 2)));
        continue;
      }
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) fail("expected 'key = value'");
      handle(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    cfg_.validate();
    return cfg_;
  }

 private:
  enum class Section { None, Packets, Grid, Step, AmpFit, PhaseFit, Output };

  [[noreturn]] void fail(const std::string& msg, const std::string& field = {}) {
    throw ConfigError(source_ + ":" + std::to_string(line_) + ": " + msg, line_, field);
  }

  void enter_section(const std::string& name) {
    if (name == "packets") section_ = Section::Packets;
    else if (name == "grid") section_ = Section::Grid;
    else if (name == "step") section_ = Section::Step;
    else if (name == "amp_fit") section_ = Section::AmpFit;
    else if (name == "phase_fit") section_ = Section::PhaseFit;
    else if (name == "output") section_ = Section::Output;
    else fail("unknown section [" + name + "]");
  }

  double to_double(const std::string& v, const std::string& field) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || trim(end).size() != 0) fail("'" + v + "' is not a number", field);
    return x;
  }

  long to_long(const std::string& v, const std::string& field) {
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || trim(end).size() != 0) fail("'" + v + "' is not an integer", field);
    return x;
  }

  bool to_bool(const std::string& v, const std::string& field) {
    if (v == "true") return true;
    if (v == "false") return false;
    fail("'" + v + "' is not a boolean (use true/false)", field);
  }

  void handle(const std::string& key, const std::string& value) {
    switch (section_) {
      case Section::None:
        fail("key '" + key + "' before any section header", key);
      case Section::Packets:
        handle_packet(key, value);
        return;
      case Section::Grid:
        handle_grid(key, value);
        return;
      case Section::Step:
        handle_step(key, value);
        return;
      case Section::AmpFit:
        handle_fit(cfg_.amp_policy, "amp_fit", key, value);
        return;
      case Section::PhaseFit:
        handle_fit(cfg_.phase_policy, "phase_fit", key, value);
        return;
      case Section::Output:
        handle_output(key, value);
        return;
    }
  }

  void handle_packet(const std::string& key, const std::string& value) {
    if (key != "packet") fail("unknown key '" + key + "' in [packets]", key);
    std::istringstream fields(value);
    double wr, wi, center, sigma;
    if (!(fields >> wr >> wi >> center >> sigma)) {
      fail("packet needs four numbers: weight_re weight_im center sigma", key);
    }
    std::string rest;
    if (fields >> rest) fail("packet has trailing data '" + rest + "'", key);
    cfg_.packets.push_back(GaussianPacket{{wr, wi}, center, sigma});
  }

  void handle_grid(const std::string& key, const std::string& value) {
    if (key == "kind") {
      if (value == "uniform") cfg_.grid.kind = GridSpec::Kind::Uniform;
      else if (value == "quantile") cfg_.grid.kind = GridSpec::Kind::Quantile;
      else if (value == "random") cfg_.grid.kind = GridSpec::Kind::RandomSampled;
      else fail("grid kind must be uniform, quantile or random", key);
    } else if (key == "count") {
      cfg_.grid.count = static_cast<int>(to_long(value, key));
    } else if (key == "lo") {
      cfg_.grid.lo = to_double(value, key);
    } else if (key == "hi") {
      cfg_.grid.hi = to_double(value, key);
    } else if (key == "start_hint") {
      cfg_.grid.start_hint = to_double(value, key);
    } else if (key == "seed") {
      cfg_.grid.seed = static_cast<std::uint64_t>(to_long(value, key));
    } else if (key == "min_spacing_time_ratio") {
      cfg_.grid.min_spacing_time_ratio = to_double(value, key);
    } else {
      fail("unknown key '" + key + "' in [grid]", key);
    }
  }

  void handle_step(const std::string& key, const std::string& value) {
    if (key == "dt") {
      cfg_.dt = to_double(value, key);
    } else if (key == "num_steps") {
      cfg_.num_steps = static_cast<int>(to_long(value, key));
    } else if (key == "potential") {
      if (value != "free") {
        fail("only the free potential is configurable; tabulated potentials are "
             "API-only", key);
      }
    } else {
      fail("unknown key '" + key + "' in [step]", key);
    }
  }

  void handle_fit(FitPolicy& policy, const std::string& section,
                  const std::string& key, const std::string& value) {
    if (key == "estimator") {
      if (value == "exact") policy.estimator = Estimator::ExactPolynomial;
      else if (value == "lsq") policy.estimator = Estimator::LeastSquares;
      else fail("estimator must be exact or lsq", key);
    } else if (key == "basis_count") {
      policy.basis_count = static_cast<int>(to_long(value, key));
    } else if (key == "interior_half_width") {
      policy.interior_half_width = static_cast<int>(to_long(value, key));
    } else if (key == "boundary_degree") {
      policy.boundary_degree = static_cast<int>(to_long(value, key));
    } else if (key == "boundary_extension") {
      policy.boundary_extension = static_cast<int>(to_long(value, key));
    } else if (key == "weight_kernel") {
      if (value == "uniform") {
        policy.weight_kernel = WeightKernel::uniform();
      } else if (value.rfind("gaussian:", 0) == 0) {
        policy.weight_kernel = WeightKernel::gaussian(to_double(value.substr(9), key));
      } else {
        fail("weight_kernel must be uniform or gaussian:<bandwidth>", key);
      }
    } else {
      fail("unknown key '" + key + "' in [" + section + "]", key);
    }
  }

  void handle_output(const std::string& key, const std::string& value) {
    if (key == "directory") {
      cfg_.output.directory = value;
    } else if (key == "snapshot_stride") {
      cfg_.output.snapshot_stride = static_cast<int>(to_long(value, key));
    } else if (key == "emit_trajectories") {
      cfg_.output.emit_trajectories = to_bool(value, key);
    } else if (key == "emit_fields") {
      cfg_.output.emit_fields = to_bool(value, key);
    } else if (key == "emit_errors") {
      cfg_.output.emit_errors = to_bool(value, key);
    } else if (key == "emit_summary") {
      cfg_.output.emit_summary = to_bool(value, key);
    } else if (key == "fields_times") {
      cfg_.output.fields_times.clear();
      std::string item;
      std::istringstream list(value);
      while (std::getline(list, item, ',')) {
        const std::string t = trim(item);
        if (!t.empty()) cfg_.output.fields_times.push_back(to_double(t, key));
      }
    } else {
      fail("unknown key '" + key + "' in [output]", key);
    }
  }

  const std::string& text_;
  std::string source_;
  int line_ = 0;
  Section section_ = Section::None;
  RunConfig cfg_;
};

}  // namespace

StepConfig RunConfig::step_config() const {
  StepConfig sc;
  sc.dt = dt;
  sc.amp_policy = amp_policy;
  sc.phase_policy = phase_policy;
  sc.potential = Potential::free();
  return sc;
}

void RunConfig::validate() const {
  if (packets.empty()) {
    throw ConfigError("config defines no packets", 0, "packets.packet");
  }
  for (const auto& p : packets) {
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
      throw ConfigError("packet sigma must be finite and > 0", 0, "packets.packet");
    }
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError("step.dt must be finite and positive", 0, "step.dt");
  }
  if (num_steps < 1) {
    throw ConfigError("step.num_steps must be >= 1", 0, "step.num_steps");
  }
  if (output.snapshot_stride < 1) {
    throw ConfigError("output.snapshot_stride must be >= 1", 0, "output.snapshot_stride");
  }
  if (output.emit_fields && output.fields_times.empty()) {
    throw ConfigError("output.emit_fields needs output.fields_times", 0,
                      "output.fields_times");
  }
  try {
    grid.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("grid: ") + e.what(), 0, "grid");
  }
  try {
    amp_policy.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("amp_fit: ") + e.what(), 0, "amp_fit");
  }
  try {
    phase_policy.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("phase_fit: ") + e.what(), 0, "phase_fit");
  }
}

std::vector<std::string> bundled_config_names() { return {"paper_polyfit", "paper_lsq"}; }

bool is_bundled_config(const std::string& name) {
  return name == "paper_polyfit" || name == "paper_lsq";
}

std::string bundled_config_text(const std::string& name) {
  if (name == "paper_polyfit") return kPolyfitConfig;
  if (name == "paper_lsq") return kLsqConfig;
  throw ConfigError("unknown bundled config '" + name + "'");
}

RunConfig load_config(const std::string& path_or_name) {
  if (is_bundled_config(path_or_name)) {
    return parse_config(bundled_config_text(path_or_name), path_or_name);
  }
  std::ifstream in(path_or_name);
  if (!in) {
    throw ConfigError("cannot open config '" + path_or_name + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path_or_name);
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  return Parser(text, source).parse();
}

}  // namespace bohm
