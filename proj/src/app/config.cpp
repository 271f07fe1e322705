#include "cpf/app/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cpf/rng.hpp"

namespace cpf::app {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) { return base + "/" + key; }

const json& member(const json& obj, const std::string& base, const std::string& key) {
  if (!obj.is_object()) throw ConfigError(base, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(join(base, key), "required field is missing");
  return *it;
}

double number(const json& obj, const std::string& base, const std::string& key) {
  const json& v = member(obj, base, key);
  if (!v.is_number()) throw ConfigError(join(base, key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(join(base, key), "must be finite");
  return d;
}

double positive(const json& obj, const std::string& base, const std::string& key) {
  const double d = number(obj, base, key);
  if (d <= 0.0) throw ConfigError(join(base, key), "must be > 0");
  return d;
}

double number_or(const json& obj, const std::string& base, const std::string& key, double fallback) {
  return obj.contains(key) ? number(obj, base, key) : fallback;
}

std::uint64_t unsigned_integer(const json& obj, const std::string& base, const std::string& key) {
  const json& v = member(obj, base, key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    throw ConfigError(join(base, key), "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string text(const json& obj, const std::string& base, const std::string& key) {
  const json& v = member(obj, base, key);
  if (!v.is_string()) throw ConfigError(join(base, key), "expected a string");
  return v.get<std::string>();
}

complex complex_value(const json& v, const std::string& field) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(field, "expected a number or a [re, im] pair");
}

Outcome outcome(const json& obj, const std::string& base, const std::string& key) {
  const json& v = member(obj, base, key);
  if (!v.is_number_integer() || (v.get<int>() != 1 && v.get<int>() != -1))
    throw ConfigError(join(base, key), "must be +1 or -1");
  return Outcome(v.get<int>());
}

GridSpec grid(const json& obj, const std::string& base, const std::string& key) {
  const std::string field = join(base, key);
  const json& g = member(obj, base, key);
  GridSpec spec{number(g, field, "start"), number(g, field, "stop"), static_cast<std::size_t>(unsigned_integer(g, field, "count"))};
  if (spec.count < 1) throw ConfigError(join(field, "count"), "must be >= 1");
  if (spec.start < 0.0) throw ConfigError(join(field, "start"), "times must be >= 0");
  if (spec.count > 1 && !(spec.stop > spec.start))
    throw ConfigError(field, "stop must exceed start for a grid with more than one point");
  return spec;
}

template <class Fn>
auto guarded(const std::string& field, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw ConfigError(field, e.what());
  }
}

std::pair<ModelSpec, std::string> model(const json& doc) {
  const std::string base = "/model";
  const json& m = member(doc, "", "model");
  const std::string type = text(m, base, "type");
  auto noise = [&](NoiseModel nm) -> std::pair<ModelSpec, std::string> {
    guarded(base, [&] {
      validate(nm);
      return 0;
    });
    return {nm, describe(nm)};
  };
  if (type == "white") return noise(White{positive(m, base, "gamma_w")});
  if (type == "exp_corr_gauss") return noise(ExpCorrGauss{positive(m, base, "g"), positive(m, base, "tau_c")});
  if (type == "static_gauss") return noise(StaticGauss{positive(m, base, "g")});
  if (type == "static_lorentz") return noise(StaticLorentz{positive(m, base, "gamma"), number_or(m, base, "omega", 0.0)});

  if (type == "spin_bath") {
    SpinBathSpec spec;
    const json& couplings = member(m, base, "couplings");
    const json& alphas = member(m, base, "alphas");
    const json& betas = member(m, base, "betas");
    if (!couplings.is_array() || !alphas.is_array() || !betas.is_array())
      throw ConfigError(base, "couplings, alphas and betas must be arrays");
    for (std::size_t k = 0; k < couplings.size(); ++k) {
      if (!couplings[k].is_number()) throw ConfigError(base + "/couplings/" + std::to_string(k), "expected a number");
      spec.couplings.push_back(couplings[k].get<double>());
    }
    for (std::size_t k = 0; k < alphas.size(); ++k)
      spec.alphas.push_back(complex_value(alphas[k], base + "/alphas/" + std::to_string(k)));
    for (std::size_t k = 0; k < betas.size(); ++k)
      spec.betas.push_back(complex_value(betas[k], base + "/betas/" + std::to_string(k)));
    guarded(base, [&] {
      spec.validate();
      return 0;
    });
    return {spec, "spin_bath(N=" + std::to_string(spec.n_spins()) + ")"};
  }
  if (type == "scaled_spin_bath") {
    const auto n = static_cast<std::size_t>(unsigned_integer(m, base, "n_spins"));
    const double g = positive(m, base, "g");
    const double omega = number_or(m, base, "omega", 0.0);
    SpinBathSpec spec = guarded(base, [&] { return spinbath::scaled_gaussian_bath(n, g, omega); });
    std::ostringstream tag;
    tag.precision(17);
    tag << "scaled_spin_bath(N=" << n << ";g=" << g << ";omega=" << omega << ")";
    return {spec, tag.str()};
  }
  if (type == "random_spin_bath") {
    const auto n = static_cast<std::size_t>(unsigned_integer(m, base, "n_spins"));
    if (n < 1) throw ConfigError(base + "/n_spins", "must be >= 1");
    const std::uint64_t seed = unsigned_integer(m, base, "seed");
    return {random_spin_bath(n, seed), "random_spin_bath(N=" + std::to_string(n) + ";seed=" + std::to_string(seed) + ")"};
  }
  if (type == "lorentz_coupling") {
    LorentzCouplingSpec spec;
    spec.gamma = positive(m, base, "gamma");
    spec.omega = number_or(m, base, "omega", 0.0);
    spec.n_spins = static_cast<std::size_t>(unsigned_integer(m, base, "n_spins"));
    if (m.contains("alpha")) spec.alpha = complex_value(m["alpha"], base + "/alpha");
    if (m.contains("beta")) spec.beta = complex_value(m["beta"], base + "/beta");
    guarded(base, [&] {
      spec.validate();
      return 0;
    });
    std::ostringstream tag;
    tag.precision(17);
    tag << "lorentz_coupling(N=" << spec.n_spins << ";gamma=" << spec.gamma << ";omega=" << spec.omega << ")";
    return {spec, tag.str()};
  }
  throw ConfigError(base + "/type", "unknown model type '" + type + "'");
}

Quantity quantity(const json& doc) {
  const std::string q = text(doc, "", "quantity");
  for (Quantity candidate : {Quantity::coherence, Quantity::conditional_coherence, Quantity::cpf, Quantity::cpf_surface,
                             Quantity::moments, Quantity::rate, Quantity::probability_table})
    if (q == to_string(candidate)) return candidate;
  throw ConfigError("/quantity", "unknown quantity '" + q + "'");
}

Method method(const json& doc) {
  if (!doc.contains("method")) return Method::analytic;
  const std::string m = text(doc, "", "method");
  for (Method candidate : {Method::analytic, Method::montecarlo, Method::sampling, Method::oracle})
    if (m == to_string(candidate)) return candidate;
  throw ConfigError("/method", "unknown method '" + m + "'");
}

void check_compatibility(const ExperimentConfig& cfg) {
  const bool noise = std::holds_alternative<NoiseModel>(cfg.model);
  const bool bath = std::holds_alternative<SpinBathSpec>(cfg.model);
  const Quantity q = cfg.quantity;
  auto reject = [&](const std::string& why) { throw ConfigError("/method", why); };

  if (q == Quantity::rate && !(noise && cfg.method == Method::analytic))
    reject("quantity 'rate' needs a noise model and method 'analytic'");
  switch (cfg.method) {
    case Method::analytic: break;
    case Method::montecarlo:
      if (bath) reject("method 'montecarlo' needs a noise model or a lorentz_coupling bath");
      break;
    case Method::sampling:
      if (!noise) reject("method 'sampling' needs a noise model");
      if (q != Quantity::cpf && q != Quantity::cpf_surface && q != Quantity::probability_table)
        reject("method 'sampling' supports cpf, cpf_surface and probability_table");
      break;
    case Method::oracle:
      if (!bath) reject("method 'oracle' needs a spin-bath model");
      if (q == Quantity::moments) reject("method 'oracle' does not produce moments");
      break;
  }
  if (q == Quantity::conditional_coherence && !cfg.yx) throw ConfigError("/yx", "conditional_coherence requires yx");
  if (q == Quantity::cpf_surface && !cfg.tau_grid) throw ConfigError("/tau_grid", "cpf_surface requires tau_grid");
  if (q == Quantity::cpf && cfg.tau_grid && cfg.tau_grid->count != cfg.t_grid.count)
    throw ConfigError("/tau_grid", "cpf pairs t_grid and tau_grid point by point; counts must match");
  if (q == Quantity::conditional_coherence && !cfg.tau_grid)
    throw ConfigError("/tau_grid", "conditional_coherence requires tau_grid");
}

}  // namespace

const char* to_string(Quantity q) noexcept {
  switch (q) {
    case Quantity::coherence: return "coherence";
    case Quantity::conditional_coherence: return "conditional_coherence";
    case Quantity::cpf: return "cpf";
    case Quantity::cpf_surface: return "cpf_surface";
    case Quantity::moments: return "moments";
    case Quantity::rate: return "rate";
    case Quantity::probability_table: return "probability_table";
  }
  return "unknown";
}

std::vector<double> GridSpec::points() const {
  std::vector<double> p(count);
  if (count == 1) {
    p[0] = start;
    return p;
  }
  const double step = (stop - start) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) p[i] = start + step * static_cast<double>(i);
  p[count - 1] = stop;
  return p;
}

SpinBathSpec random_spin_bath(std::size_t n_spins, std::uint64_t seed) {
  SpinBathSpec spec;
  CounterRng rng(seed, 0, CounterRng::Domain::test);
  for (std::size_t k = 0; k < n_spins; ++k) {
    spec.couplings.push_back(2.0 * rng.uniform_open() - 1.0);
    const double theta = std::acos(2.0 * rng.uniform_open() - 1.0);
    const double phi_a = 2.0 * std::numbers::pi * rng.uniform_open();
    const double phi_b = 2.0 * std::numbers::pi * rng.uniform_open();
    spec.alphas.push_back(std::polar(std::cos(0.5 * theta), phi_a));
    spec.betas.push_back(std::polar(std::sin(0.5 * theta), phi_b));
  }
  return spec;
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  ExperimentConfig cfg;
  std::tie(cfg.model, cfg.model_tag) = model(doc);
  cfg.quantity = quantity(doc);
  cfg.method = method(doc);
  cfg.t_grid = grid(doc, "", "t_grid");
  if (doc.contains("tau_grid")) cfg.tau_grid = grid(doc, "", "tau_grid");
  if (doc.contains("yx")) cfg.yx = outcome(doc, "", "yx");
  if (doc.contains("y_select")) cfg.y_select = outcome(doc, "", "y_select");

  if (doc.contains("system_init")) {
    const json& s = doc["system_init"];
    if (!s.is_object()) throw ConfigError("/system_init", "expected an object");
    cfg.system_init.a = complex_value(member(s, "/system_init", "a"), "/system_init/a");
    cfg.system_init.b = complex_value(member(s, "/system_init", "b"), "/system_init/b");
    guarded("/system_init", [&] {
      cfg.system_init.validate();
      return 0;
    });
    if (cfg.method != Method::oracle && std::abs(cfg.system_init.a - complex{1.0, 0.0}) > 1e-12)
      throw ConfigError("/system_init", "only the oracle accepts initial states other than |+>");
  }

  if (doc.contains("mc")) {
    const json& mc = doc["mc"];
    const std::string base = "/mc";
    if (!mc.is_object()) throw ConfigError(base, "expected an object");
    if (mc.contains("n_trajectories")) cfg.mc.n_trajectories = unsigned_integer(mc, base, "n_trajectories");
    if (mc.contains("seed")) cfg.mc.seed = unsigned_integer(mc, base, "seed");
    if (mc.contains("chunk_size")) cfg.mc.chunk_size = unsigned_integer(mc, base, "chunk_size");
    if (mc.contains("path_dt")) cfg.mc.path_dt = positive(mc, base, "path_dt");
  }
  cfg.mc.chunk_size = std::min(cfg.mc.chunk_size, cfg.mc.n_trajectories);
  guarded("/mc", [&] {
    cfg.mc.validate();
    return 0;
  });

  cfg.output_path = doc.contains("output") ? text(doc, "", "output")
                                           : std::string(to_string(cfg.quantity)) + "_" + to_string(cfg.method) + ".csv";
  check_compatibility(cfg);
  cfg.source = doc;
  return cfg;
}

json read_config_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON in '") + path + "': " + e.what());
  }
  if (doc.is_object() && doc.contains("config") && doc.contains("manifest_version")) return doc["config"];
  return doc;
}

}  // namespace cpf::app
