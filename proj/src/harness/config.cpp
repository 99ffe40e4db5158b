#include "dikin/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dikin/errors.hpp"

namespace dikin::harness {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
    ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
    --e;
  return std::string(s.substr(b, e - b));
}

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

struct RawConfig {
  std::vector<std::pair<std::string, Section>> sections; // file order
  std::string source;

  Section *find(const std::string &name) {
    for (auto &[n, s] : sections)
      if (n == name)
        return &s;
    return nullptr;
  }
};

RawConfig tokenize(const std::string &text, const std::string &source) {
  RawConfig raw;
  raw.source = source;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  Section *current = nullptr;
  while (std::getline(in, line)) {
    ++lineno;
    // Comments: '#' or ';' at the start, or '#' after whitespace.
    std::string body = line;
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (body[i] == '#' && (i == 0 || std::isspace(static_cast<unsigned char>(
                                           body[i - 1])))) {
        body.resize(i);
        break;
      }
    }
    body = trim(body);
    if (body.empty() || body[0] == ';')
      continue;
    if (body.front() == '[') {
      if (body.back() != ']')
        throw ConfigError(source + ":" + std::to_string(lineno) +
                          ": malformed section header");
      const std::string name = trim(body.substr(1, body.size() - 2));
      if (name.empty())
        throw ConfigError(source + ":" + std::to_string(lineno) +
                          ": empty section name");
      if (raw.find(name))
        throw ConfigError(source + ":" + std::to_string(lineno) +
                          ": duplicate section [" + name + "]");
      raw.sections.emplace_back(name, Section{});
      current = &raw.sections.back().second;
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    if (!current)
      throw ConfigError(source + ":" + std::to_string(lineno) +
                        ": key outside of any section");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty())
      throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    if (current->count(key))
      throw ConfigError(source + ":" + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
    (*current)[key] = Entry{value, lineno};
  }
  return raw;
}

// Reads typed values out of one section and rejects unknown keys.
class SectionReader {
public:
  SectionReader(const RawConfig &raw, std::string name, const Section &section)
      : raw_(raw), name_(std::move(name)), section_(section) {}

  bool has(const std::string &key) const { return section_.count(key) > 0; }

  std::string str(const std::string &key) {
    used_.insert(key);
    auto it = section_.find(key);
    if (it == section_.end())
      throw ConfigError(raw_.source + ": [" + name_ + "] missing key '" + key +
                        "'");
    return it->second.value;
  }

  std::string str(const std::string &key, const std::string &fallback) {
    return has(key) ? str(key) : fallback;
  }

  double real(const std::string &key) {
    const std::string v = str(key);
    return parse_real(v, key);
  }
  double real(const std::string &key, double fallback) {
    return has(key) ? real(key) : fallback;
  }

  std::int64_t integer(const std::string &key) {
    const std::string v = str(key);
    std::int64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
      fail(key, "expected an integer, got '" + v + "'");
    return out;
  }
  std::int64_t integer(const std::string &key, std::int64_t fallback) {
    return has(key) ? integer(key) : fallback;
  }

  std::uint64_t unsigned_integer(const std::string &key) {
    const std::string v = str(key);
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
      fail(key, "expected an unsigned 64-bit integer, got '" + v + "'");
    return out;
  }

  bool boolean(const std::string &key, bool fallback) {
    if (!has(key))
      return fallback;
    std::string v = str(key);
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "yes" || v == "on" || v == "1")
      return true;
    if (v == "false" || v == "no" || v == "off" || v == "0")
      return false;
    fail(key, "expected a boolean, got '" + v + "'");
  }

  Vector vector(const std::string &key) { return parse_vector(str(key), key); }

  Matrix matrix(const std::string &key) {
    const std::string v = str(key);
    std::vector<Vector> rows;
    std::stringstream ss(v);
    std::string row;
    while (std::getline(ss, row, ';')) {
      if (trim(row).empty())
        continue;
      rows.push_back(parse_list(row, key));
    }
    if (rows.empty())
      fail(key, "matrix has no rows");
    Matrix m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols())
        fail(key, "matrix rows have unequal length");
      m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    }
    return m;
  }

  [[noreturn]] void fail(const std::string &key, const std::string &msg) const {
    auto it = section_.find(key);
    const std::string where =
        it != section_.end() ? ":" + std::to_string(it->second.line) : "";
    throw ConfigError(raw_.source + where + ": [" + name_ + "] " + key + ": " +
                      msg);
  }

  void finish() const {
    for (const auto &[key, entry] : section_)
      if (!used_.count(key))
        throw ConfigError(raw_.source + ":" + std::to_string(entry.line) +
                          ": unknown key '" + key + "' in [" + name_ + "]");
  }

private:
  double parse_real(const std::string &v, const std::string &key) const {
    double out = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out))
      fail(key, "expected a finite number, got '" + v + "'");
    return out;
  }

  Vector parse_list(const std::string &text, const std::string &key) const {
    std::string t = text;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream in(t);
    std::vector<double> vals;
    std::string tok;
    while (in >> tok)
      vals.push_back(parse_real(tok, key));
    if (vals.empty())
      fail(key, "empty list");
    return Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  }

  // "a, b, c" | "logspace(first, last, n)" | "constant(value, n)"
  Vector parse_vector(const std::string &v, const std::string &key) const {
    auto call = [&](const std::string &fn) -> std::optional<Vector> {
      if (v.rfind(fn + "(", 0) != 0)
        return std::nullopt;
      if (v.back() != ')')
        fail(key, "unterminated " + fn + "(...)");
      return parse_list(v.substr(fn.size() + 1, v.size() - fn.size() - 2), key);
    };
    if (auto args = call("logspace")) {
      if (args->size() != 3 || (*args)[2] < 1 || std::floor((*args)[2]) != (*args)[2])
        fail(key, "logspace(first, last, n) needs three arguments");
      return logspace_bounds((*args)[0], (*args)[1],
                             static_cast<Eigen::Index>((*args)[2]));
    }
    if (auto args = call("constant")) {
      if (args->size() != 2 || (*args)[1] < 1 || std::floor((*args)[1]) != (*args)[1])
        fail(key, "constant(value, n) needs two arguments");
      return Vector::Constant(static_cast<Eigen::Index>((*args)[1]), (*args)[0]);
    }
    return parse_list(v, key);
  }

  const RawConfig &raw_;
  std::string name_;
  const Section &section_;
  std::set<std::string> used_;
};

bool valid_name(const std::string &name) {
  if (name.empty())
    return false;
  return std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

} // namespace

// ---------------------------------------------------------------------------

std::unique_ptr<Barrier> DomainSpec::build() const {
  switch (type) {
  case Type::box:
    return std::make_unique<PolytopeBarrier>(PolytopeBarrier::box(bounds));
  case Type::polytope: {
    const Vector x0 =
        interior_point.size() ? interior_point : Vector::Zero(rows.cols());
    return std::make_unique<PolytopeBarrier>(rows, x0);
  }
  case Type::ball:
    return std::make_unique<BallBarrier>(dimension, radius);
  }
  throw ConfigError("unknown domain type");
}

std::string DomainSpec::type_name() const {
  switch (type) {
  case Type::box:
    return "box";
  case Type::polytope:
    return "polytope";
  case Type::ball:
    return "ball";
  }
  return "unknown";
}

Target TargetSpec::build(const DomainSpec &domain) const {
  Target t = [&]() -> Target {
    if (type == "gaussian_box") {
      if (domain.type != DomainSpec::Type::box)
        throw ConfigError("target gaussian_box needs a box domain");
      return gaussian_box_target(domain.bounds);
    }
    if (type == "bimodal")
      return bimodal_target(domain.dimension, offset, stiffness);
    if (type == "standard_gaussian")
      return standard_gaussian_target(domain.dimension);
    throw ConfigError("unknown target type '" + type +
                      "' (expected gaussian_box, bimodal or standard_gaussian)");
  }();
  return t.with_beta(beta);
}

Eigen::Index ExperimentConfig::dimension() const { return domain.dimension; }

Vector ExperimentConfig::start_point() const {
  return initial_point.size() ? initial_point : Vector::Zero(dimension());
}

ExperimentConfig parse_config_text(const std::string &text,
                                   const std::string &source) {
  RawConfig raw = tokenize(text, source);
  ExperimentConfig cfg;

  for (const auto &[name, _] : raw.sections) {
    if (name != "experiment" && name != "domain" && name != "target" &&
        name.rfind("sampler.", 0) != 0)
      throw ConfigError(source + ": unknown section [" + name + "]");
  }

  const Section *exp_sec = raw.find("experiment");
  if (!exp_sec)
    throw ConfigError(source + ": missing [experiment] section");
  {
    SectionReader r(raw, "experiment", *exp_sec);
    cfg.id = r.str("id");
    if (!valid_name(cfg.id))
      r.fail("id", "must be non-empty and use only [A-Za-z0-9_.-]");
    cfg.chains = static_cast<int>(r.integer("chains"));
    cfg.iterations = r.integer("iterations", 0);
    cfg.warmup = r.integer("warmup", 0);
    cfg.thin = r.integer("thin", 1);
    cfg.time_horizon = r.real("time_horizon", 0.0);
    cfg.record_interval = r.real("record_interval", 0.0);
    cfg.master_seed = r.unsigned_integer("seed");
    cfg.output_dir = r.str("output_dir");
    const std::string init = r.str("initial_point", "origin");
    if (init != "origin")
      cfg.initial_point = r.vector("initial_point");
    const std::string gt = r.str("ground_truth", "");
    std::stringstream ss(gt);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!trim(item).empty())
        cfg.ground_truth.push_back(trim(item));
    r.finish();
  }

  const Section *dom_sec = raw.find("domain");
  if (!dom_sec)
    throw ConfigError(source + ": missing [domain] section");
  {
    SectionReader r(raw, "domain", *dom_sec);
    const std::string type = r.str("type");
    if (type == "box") {
      cfg.domain.type = DomainSpec::Type::box;
      cfg.domain.bounds = r.vector("bounds");
      if (!(cfg.domain.bounds.minCoeff() > 0.0))
        r.fail("bounds", "box bounds must be positive");
      cfg.domain.dimension = cfg.domain.bounds.size();
    } else if (type == "polytope") {
      cfg.domain.type = DomainSpec::Type::polytope;
      cfg.domain.rows = r.matrix("rows");
      cfg.domain.dimension = cfg.domain.rows.cols();
      if (r.has("interior_point"))
        cfg.domain.interior_point = r.vector("interior_point");
    } else if (type == "ball") {
      cfg.domain.type = DomainSpec::Type::ball;
      cfg.domain.dimension = r.integer("dimension");
      cfg.domain.radius = r.real("radius", 1.0);
      if (cfg.domain.dimension < 1)
        r.fail("dimension", "must be positive");
      if (!(cfg.domain.radius > 0.0))
        r.fail("radius", "must be positive");
    } else {
      r.fail("type", "expected box, polytope or ball, got '" + type + "'");
    }
    r.finish();
  }

  const Section *tgt_sec = raw.find("target");
  if (!tgt_sec)
    throw ConfigError(source + ": missing [target] section");
  {
    SectionReader r(raw, "target", *tgt_sec);
    cfg.target.type = r.str("type");
    cfg.target.beta = r.real("beta", 1.0);
    if (cfg.target.type == "bimodal") {
      cfg.target.offset = r.real("offset", 0.5);
      cfg.target.stiffness = r.real("stiffness", 3.0);
      cfg.target.well_threshold = r.real("well_threshold", 1e-3);
    }
    if (!(cfg.target.beta > 0.0))
      r.fail("beta", "must be positive");
    r.finish();
  }

  for (const auto &[name, section] : raw.sections) {
    if (name.rfind("sampler.", 0) != 0)
      continue;
    SectionReader r(raw, name, section);
    SamplerSpec s;
    s.name = name.substr(8);
    if (!valid_name(s.name))
      throw ConfigError(source + ": sampler name '" + s.name +
                        "' must use only [A-Za-z0-9_.-]");
    s.kernel.kind = kernel_kind_from_string(r.str("kernel"));
    const bool unadjusted = s.kernel.kind == KernelKind::unadjusted_dl;
    if (unadjusted) {
      s.kernel.h_max = r.real("dt");
      s.kernel.epsilon = r.real("epsilon", 0.0);
      s.kernel.randomize_step = false;
      try {
        s.kernel.divergence_mode =
            divergence_mode_from_string(r.str("divergence", "finite_difference"));
      } catch (const DomainError &e) {
        r.fail("divergence", e.what());
      }
    } else {
      s.kernel.h_max = r.real("h_max");
      s.kernel.epsilon = r.real("epsilon", 1e-5);
      s.kernel.randomize_step =
          r.boolean("randomize_step", s.kernel.kind == KernelKind::mdl);
      s.tune = r.boolean("tune", false);
      s.target_acceptance = r.real("target_acceptance", 0.6);
      s.tune_iterations = static_cast<int>(r.integer("tune_iterations", 5000));
    }
    if (r.has("iterations")) {
      s.iterations = r.integer("iterations");
      s.explicit_iterations = true;
    }
    if (r.has("warmup")) {
      s.warmup = r.integer("warmup");
      s.explicit_warmup = true;
    }
    if (r.has("thin")) {
      s.thin = r.integer("thin");
      s.explicit_thin = true;
    }
    r.finish();
    for (const auto &other : cfg.samplers)
      if (other.name == s.name)
        throw ConfigError(source + ": duplicate sampler '" + s.name + "'");
    cfg.samplers.push_back(std::move(s));
  }
  if (cfg.samplers.empty())
    throw ConfigError(source + ": no [sampler.<name>] sections");

  resolve(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

void resolve(ExperimentConfig &cfg) {
  if (cfg.chains < 1)
    throw ConfigError("chains must be at least 1");
  if (cfg.thin < 1)
    throw ConfigError("thin must be at least 1");
  if (cfg.warmup < 0)
    throw ConfigError("warmup must be non-negative");
  if (cfg.time_horizon < 0.0 || cfg.record_interval < 0.0)
    throw ConfigError("time_horizon and record_interval must be non-negative");
  if (cfg.initial_point.size() && cfg.initial_point.size() != cfg.dimension())
    throw ConfigError("initial_point has dimension " +
                      std::to_string(cfg.initial_point.size()) + ", domain has " +
                      std::to_string(cfg.dimension()));

  // Construction checks domain and target consistency.
  const auto barrier = cfg.domain.build();
  const Target target = cfg.target.build(cfg.domain);
  if (!barrier->contains(cfg.start_point()))
    throw ConfigError("initial point is not strictly inside the domain");

  for (auto &s : cfg.samplers) {
    const bool unadjusted = s.kernel.kind == KernelKind::unadjusted_dl;
    const double dt = s.kernel.h_max;
    if (!s.explicit_iterations) {
      if (unadjusted && cfg.time_horizon > 0.0)
        s.iterations = std::llround(cfg.time_horizon / dt);
      else
        s.iterations = cfg.iterations;
    }
    if (!s.explicit_warmup)
      s.warmup = cfg.warmup;
    if (!s.explicit_thin) {
      if (unadjusted && cfg.record_interval > 0.0)
        s.thin = std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::floor(cfg.record_interval / dt + 1e-9)));
      else
        s.thin = cfg.thin;
    }
    s.kernel.beta = cfg.target.beta;

    const std::string where = "sampler '" + s.name + "': ";
    if (s.iterations < 1)
      throw ConfigError(where + "iterations must be at least 1");
    if (s.warmup < 0 || s.warmup >= s.iterations)
      throw ConfigError(where + "warmup must satisfy 0 <= warmup < iterations");
    if (s.thin < 1)
      throw ConfigError(where + "thin must be at least 1");
    if (cfg.target.is_bimodal() && s.thin != 1)
      throw ConfigError(where + "transition counting needs thin = 1");
    if (s.tune && unadjusted)
      throw ConfigError(where + "unadjusted_dl cannot be tuned");
    if (s.tune && s.tune_iterations < 1000)
      throw ConfigError(where + "tune_iterations must be at least 1000");
    if (s.tune && !(s.target_acceptance > 0.0 && s.target_acceptance <= 1.0))
      throw ConfigError(where + "target_acceptance must lie in (0, 1]");
    if (unadjusted && s.kernel.divergence_mode == DivergenceMode::analytic &&
        !barrier->analytic_divergence(cfg.start_point(), s.kernel.epsilon))
      throw ConfigError(where + "analytic divergence is unavailable for a " +
                        cfg.domain.type_name() + " domain with epsilon = " +
                        std::to_string(s.kernel.epsilon));
    s.kernel.validate();
  }

  for (const auto &name : cfg.ground_truth) {
    if (name == "E_norm") {
      if (cfg.domain.type != DomainSpec::Type::ball || cfg.domain.radius != 1.0 ||
          cfg.target.type != "standard_gaussian" || cfg.target.beta != 1.0)
        throw OracleUnavailable(
            "E_norm has an oracle only for the standard Gaussian on the unit "
            "ball at beta = 1");
    } else if (name == "E_norm_sq") {
      if (cfg.domain.type != DomainSpec::Type::box ||
          cfg.target.type != "gaussian_box" || cfg.target.beta != 1.0)
        throw OracleUnavailable(
            "E_norm_sq has an oracle only for gaussian_box on its box at "
            "beta = 1");
    } else {
      throw OracleUnavailable("no oracle for functional '" + name + "'");
    }
  }
}

void apply_overrides(ExperimentConfig &cfg, const Overrides &o) {
  if (o.seed)
    cfg.master_seed = *o.seed;
  if (o.chains)
    cfg.chains = *o.chains;
  if (o.output_dir)
    cfg.output_dir = *o.output_dir;
  if (o.iterations) {
    if (*o.iterations < 1)
      throw ConfigError("--iters must be at least 1");
    const double old_iters = static_cast<double>(
        cfg.iterations > 0 ? cfg.iterations : *o.iterations);
    const double factor = static_cast<double>(*o.iterations) / old_iters;
    cfg.iterations = *o.iterations;
    cfg.warmup = std::llround(static_cast<double>(cfg.warmup) * factor);
    for (auto &s : cfg.samplers) {
      if (s.kernel.kind == KernelKind::unadjusted_dl)
        continue;
      if (s.explicit_iterations)
        s.iterations = std::llround(static_cast<double>(s.iterations) * factor);
      if (s.explicit_warmup)
        s.warmup = std::llround(static_cast<double>(s.warmup) * factor);
    }
  }
  if (o.time_horizon) {
    if (!(*o.time_horizon > 0.0))
      throw ConfigError("--time-horizon must be positive");
    cfg.time_horizon = *o.time_horizon;
    for (auto &s : cfg.samplers)
      if (s.kernel.kind == KernelKind::unadjusted_dl)
        s.explicit_iterations = false;
  }
  resolve(cfg);
}

} // namespace dikin::harness
