#include "cpf/app/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cpf/oracle.hpp"
#include "cpf/stochastic.hpp"

namespace cpf::app {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct Point {
  double t;
  std::optional<double> tau;
};

std::vector<Point> points_for(const ExperimentConfig& cfg) {
  const std::vector<double> ts = cfg.t_grid.points();
  std::vector<Point> out;
  switch (cfg.quantity) {
    case Quantity::coherence:
    case Quantity::rate:
      for (double t : ts) out.push_back({t, std::nullopt});
      break;
    case Quantity::cpf_surface:
    case Quantity::conditional_coherence: {
      const std::vector<double> taus = cfg.tau_grid->points();
      for (double t : ts)
        for (double tau : taus) out.push_back({t, tau});
      break;
    }
    case Quantity::cpf:
    case Quantity::moments:
    case Quantity::probability_table: {
      if (!cfg.tau_grid) {
        for (double t : ts) out.push_back({t, t});
      } else {
        const std::vector<double> taus = cfg.tau_grid->points();
        if (taus.size() != ts.size()) fail(ErrorCode::grid_mismatch, "t_grid and tau_grid must pair up");
        for (std::size_t i = 0; i < ts.size(); ++i) out.push_back({ts[i], taus[i]});
      }
      break;
    }
  }
  return out;
}

std::string table_label(Outcome z, Outcome x, Outcome y) {
  auto s = [](Outcome o) { return o.is_plus() ? std::string("+1") : std::string("-1"); };
  return "P(z=" + s(z) + ";x=" + s(x) + "|y=" + s(y) + ")";
}

// Collects rows for one grid point.
class Emitter {
 public:
  Emitter(const ExperimentConfig& cfg, std::vector<Row>& rows) : cfg_(cfg), rows_(rows) {}

  void point(Point p) { point_ = p; }

  void exact(const std::string& quantity, double value) {
    rows_.push_back({point_.t, point_.tau, value, std::nullopt, std::nullopt, quantity, cfg_.model_tag, to_string(cfg_.method)});
  }
  void estimate(const std::string& quantity, const Estimate& e) {
    rows_.push_back({point_.t, point_.tau, e.value, e.std_error, e.n_samples, quantity, cfg_.model_tag, to_string(cfg_.method)});
  }
  void complex_value(const std::string& quantity, complex c) {
    exact(quantity, c.real());
    exact(quantity + "_imag", c.imag());
  }
  void moments(const MomentSet& m) {
    exact("f_t", m.f_t);
    exact("f_tau", m.f_tau);
    exact("f_joint", m.f_joint);
  }
  void table(const CpfProbabilityTable& tbl, std::optional<std::uint64_t> n = std::nullopt) {
    const Outcome y = tbl.y_condition();
    for (Outcome z : kOutcomes)
      for (Outcome x : kOutcomes) {
        const double p = tbl.joint(z, x);
        if (n) {
          const double se = *n > 0 ? std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(*n)) : 0.0;
          estimate(table_label(z, x, y), {p, se, *n});
        } else {
          exact(table_label(z, x, y), p);
        }
      }
  }

 private:
  const ExperimentConfig& cfg_;
  std::vector<Row>& rows_;
  Point point_{};
};

const char* cpf_label = "cpf";

void evaluate_noise(const NoiseModel& model, const ExperimentConfig& cfg, Point p, Emitter& out) {
  const double tau = p.tau.value_or(0.0);
  switch (cfg.method) {
    case Method::analytic:
      switch (cfg.quantity) {
        case Quantity::coherence: return out.exact("coherence", analytic::first_moment(model, p.t));
        case Quantity::rate: return out.exact("rate", analytic::dephasing_rate(model, p.t));
        case Quantity::conditional_coherence:
          return out.exact("conditional_coherence", analytic::conditional_coherence(model, p.t, tau, *cfg.yx));
        case Quantity::cpf:
        case Quantity::cpf_surface: return out.exact(cpf_label, analytic::cpf(model, p.t, tau));
        case Quantity::moments: return out.moments(analytic::moments(model, p.t, tau));
        case Quantity::probability_table:
          return out.table(cpf_probability_table(analytic::moments(model, p.t, tau), cfg.y_select));
      }
      break;
    case Method::montecarlo:
      switch (cfg.quantity) {
        case Quantity::coherence: return out.estimate("coherence", stochastic::mc_moments(model, p.t, 0.0, cfg.mc).f_t);
        case Quantity::conditional_coherence:
          return out.estimate("conditional_coherence", stochastic::mc_conditional_coherence(model, p.t, tau, *cfg.yx, cfg.mc));
        case Quantity::cpf:
        case Quantity::cpf_surface: return out.estimate(cpf_label, stochastic::mc_cpf_semianalytic(model, p.t, tau, cfg.mc));
        case Quantity::moments: {
          const auto m = stochastic::mc_moments(model, p.t, tau, cfg.mc);
          out.estimate("f_t", m.f_t);
          out.estimate("f_tau", m.f_tau);
          out.estimate("f_joint", m.f_joint);
          return;
        }
        case Quantity::probability_table:
          return out.table(stochastic::mc_probability_table(model, p.t, tau, cfg.y_select, cfg.mc));
        case Quantity::rate: break;
      }
      break;
    case Method::sampling:
      if (cfg.quantity == Quantity::probability_table) {
        const auto counts = stochastic::sample_triples(model, p.t, tau, cfg.mc);
        return out.table(stochastic::empirical_table(counts, cfg.y_select), counts.kept(cfg.y_select));
      }
      return out.estimate(cpf_label, stochastic::mc_cpf_sampling(model, p.t, tau, cfg.y_select, cfg.mc));
    case Method::oracle: break;
  }
  fail(ErrorCode::invalid_argument, "unsupported quantity/method for a noise model");
}

void evaluate_bath(const SpinBathSpec& spec, const ExperimentConfig& cfg, Point p, Emitter& out) {
  const double tau = p.tau.value_or(0.0);
  if (cfg.method == Method::oracle) {
    switch (cfg.quantity) {
      case Quantity::coherence: return out.complex_value("coherence", oracle::coherence(spec, p.t));
      case Quantity::conditional_coherence:
        return out.complex_value("conditional_coherence", oracle::conditional_coherence(spec, p.t, tau, *cfg.yx));
      case Quantity::cpf:
      case Quantity::cpf_surface:
        return out.exact(cpf_label, cpf_from_table(oracle::protocol(spec, cfg.system_init, p.t, tau, cfg.y_select)));
      case Quantity::probability_table: return out.table(oracle::protocol(spec, cfg.system_init, p.t, tau, cfg.y_select));
      default: break;
    }
    fail(ErrorCode::invalid_argument, "unsupported quantity for the oracle");
  }
  switch (cfg.quantity) {
    case Quantity::coherence: return out.complex_value("coherence", spinbath::coherence(spec, p.t));
    case Quantity::conditional_coherence:
      return out.complex_value("conditional_coherence", spinbath::conditional_coherence(spec, p.t, tau, *cfg.yx));
    case Quantity::cpf:
    case Quantity::cpf_surface: return out.exact(cpf_label, spinbath::cpf(spec, p.t, tau));
    case Quantity::moments: return out.moments(spinbath::moments(spec, p.t, tau));
    case Quantity::probability_table: return out.table(spinbath::cpf_probability(spec, p.t, tau, cfg.y_select));
    case Quantity::rate: break;
  }
  fail(ErrorCode::invalid_argument, "unsupported quantity for a spin bath");
}

// Averaged moments from the closed-form ensemble coherence.
MomentSet lorentz_moments(const LorentzCouplingSpec& spec, double t, double tau) {
  const auto f = [&](double u) { return spinbath::lorentz_coherence(spec, std::abs(u)).real(); };
  return {f(t), f(tau), 0.5 * (f(t + tau) + f(t - tau))};
}

void evaluate_lorentz(const LorentzCouplingSpec& spec, const ExperimentConfig& cfg, Point p, Emitter& out) {
  const double tau = p.tau.value_or(0.0);
  if (cfg.method == Method::montecarlo) {
    const auto ens = spinbath::lorentz_ensemble(spec, p.t, tau, cfg.mc);
    switch (cfg.quantity) {
      case Quantity::coherence:
        out.estimate("coherence", ens.coherence_re);
        out.estimate("coherence_imag", ens.coherence_im);
        return;
      case Quantity::conditional_coherence:
        return out.estimate("conditional_coherence",
                            cfg.yx->is_plus() ? ens.conditional_coherence_plus : ens.conditional_coherence_minus);
      case Quantity::cpf:
      case Quantity::cpf_surface: return out.estimate(cpf_label, ens.cpf);
      case Quantity::moments:
        out.estimate("f_t", ens.f_t);
        out.estimate("f_tau", ens.f_tau);
        out.estimate("f_joint", ens.f_joint);
        return;
      case Quantity::probability_table: return out.table(cpf_probability_table(ens.mean_moments(), cfg.y_select));
      case Quantity::rate: break;
    }
    fail(ErrorCode::invalid_argument, "unsupported quantity for the coupling ensemble");
  }
  const MomentSet m = lorentz_moments(spec, p.t, tau);
  switch (cfg.quantity) {
    case Quantity::coherence: return out.complex_value("coherence", spinbath::lorentz_coherence(spec, p.t));
    case Quantity::conditional_coherence: {
      const double sign = cfg.yx->value();
      const double den = 1.0 + sign * m.f_t;
      if (std::abs(den) <= 1e-12) fail(ErrorCode::zero_probability_postselection, "1 + yx f(t) vanishes");
      return out.exact("conditional_coherence", (m.f_tau + sign * m.f_joint) / den);
    }
    case Quantity::cpf:
    case Quantity::cpf_surface: return out.exact(cpf_label, cpf_from_moments(m));
    case Quantity::moments: return out.moments(m);
    case Quantity::probability_table: return out.table(cpf_probability_table(m, cfg.y_select));
    case Quantity::rate: break;
  }
  fail(ErrorCode::invalid_argument, "unsupported quantity for the coupling ensemble");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

std::vector<Row> evaluate(const ExperimentConfig& cfg) {
  std::vector<Row> rows;
  Emitter out(cfg, rows);
  for (const Point& p : points_for(cfg)) {
    out.point(p);
    std::visit(overloaded{
                   [&](const NoiseModel& m) { evaluate_noise(m, cfg, p, out); },
                   [&](const SpinBathSpec& s) { evaluate_bath(s, cfg, p, out); },
                   [&](const LorentzCouplingSpec& s) { evaluate_lorentz(s, cfg, p, out); },
               },
               cfg.model);
  }
  return rows;
}

std::string to_csv(const std::vector<Row>& rows) {
  std::string text = std::string(kCsvHeader) + "\n";
  for (const Row& r : rows) {
    text += format_double(r.t) + ",";
    text += (r.tau ? format_double(*r.tau) : std::string()) + ",";
    text += format_double(r.value) + ",";
    text += (r.std_error ? format_double(*r.std_error) : std::string()) + ",";
    text += (r.n_samples ? std::to_string(*r.n_samples) : std::string()) + ",";
    text += r.quantity + "," + r.model + "," + r.method + "\n";
  }
  return text;
}

std::vector<Row> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) fail(ErrorCode::invalid_argument, "unexpected CSV header");
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 8) fail(ErrorCode::invalid_argument, "CSV row with " + std::to_string(f.size()) + " fields");
    Row r;
    r.t = std::stod(f[0]);
    if (!f[1].empty()) r.tau = std::stod(f[1]);
    r.value = std::stod(f[2]);
    if (!f[3].empty()) r.std_error = std::stod(f[3]);
    if (!f[4].empty()) r.n_samples = std::stoull(f[4]);
    r.quantity = f[5];
    r.model = f[6];
    r.method = f[7];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::ios_base::failure("write failed for '" + path + "'");
}

}  // namespace cpf::app
