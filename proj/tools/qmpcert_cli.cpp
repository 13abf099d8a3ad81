// qmpcert: batch front-end over the header library.
// Exit codes: 0 success or consistent, 1 certified violation, 2 usage/parse/input error, 3 resource budget.

#include "qmpcert/io.hpp"
#include "qmpcert/qmpcert.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace qmpcert;
using io::json;

namespace {

struct Config {
  int level = 1;
  double tol_psd = 1e-9;
  std::uint64_t seed = 20240601;
  double budget_perms = 5e5;
  std::size_t budget_dim = 300000;
  std::string out;
};

// Non-finite values become strings so every emitted JSON re-parses to the same value.
json num(double v) { return std::isfinite(v) ? json(v) : json(io::fmt(v)); }

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw io::ParseError("not a number: '" + item + "'");
    }
  }
  if (v.empty()) throw io::ParseError("empty list");
  return v;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw ArgumentError("cannot write '" + path + "'");
    }
  }
  std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  void json_out(const json& j) { os() << j.dump(2) << '\n'; }

 private:
  std::ofstream file_;
};

HierarchyOptions hierarchy_options(const Config& c) {
  HierarchyOptions o;
  o.tol.psd = c.tol_psd;
  o.budget.max_perms_free = c.budget_perms;
  o.budget.max_dim_free = c.budget_dim;
  o.iterative.seed = c.seed;
  return o;
}

int verdict_code(const RealizabilityCertificate& c) { return c.verdict == Verdict::Violated ? 1 : 0; }

CMatrix read_matrix(const std::string& path) { return io::operator_from_json(io::read_json_file(path)).mat; }

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  CLI::App app{"quantum marginal compatibility certificates and related estimators"};
  app.require_subcommand(0, 1);
  app.add_option("--level", cfg.level, "hierarchy level n")->envname("QMPCERT_LEVEL")->check(CLI::PositiveNumber);
  app.add_option("--tol-psd", cfg.tol_psd, "PSD tolerance")->envname("QMPCERT_TOL_PSD")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "master RNG seed")->envname("QMPCERT_SEED");
  app.add_option("--budget-perms", cfg.budget_perms, "max permutations enumerated")
      ->envname("QMPCERT_BUDGET_PERMS")
      ->check(CLI::PositiveNumber);
  app.add_option("--budget-dim", cfg.budget_dim, "max operator dimension")
      ->envname("QMPCERT_BUDGET_DIM")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.out, "output path (default stdout)")->envname("QMPCERT_OUT");
  bool show_config = false;
  app.add_flag("--show-config", show_config, "print effective configuration and exit");

  std::function<int()> action;

  auto* qmp = app.add_subcommand("qmp", "marginal compatibility checks");
  qmp->require_subcommand(1);
  std::string bundle_path, second_path;
  int ortho_v = 0;

  auto* check = qmp->add_subcommand("check", "hierarchy check at --level");
  check->add_option("bundle", bundle_path, "scenario bundle JSON")->required();
  check->callback([&] {
    action = [&] {
      auto b = io::bundle_from_json(io::read_json_file(bundle_path));
      auto cert = hierarchy_check(b.scenario, b.state, cfg.level, hierarchy_options(cfg));
      Output(cfg.out).json_out(io::certificate_to_json(cert));
      return verdict_code(cert);
    };
  });

  auto* w3 = qmp->add_subcommand("witness3", "three-qubit (AB,AC,BC) witness value");
  w3->add_option("bundle", bundle_path, "bundle with contexts AB, AC, BC")->required();
  w3->callback([&] {
    action = [&] {
      auto b = io::bundle_from_json(io::read_json_file(bundle_path));
      if (b.scenario.m() != 3 || b.scenario.joint().dims() != std::vector<int>{2, 2, 2})
        throw ArgumentError("witness3 needs three qubits and three contexts");
      const auto& ms = b.state.marginals;
      const double v = three_qubit_witness(ms[0].mat(), ms[1].mat(), ms[2].mat());
      Output(cfg.out).os() << io::fmt(v) << '\n';
      // zero on every realizable triple
      return std::abs(v) > 1e-10 ? 1 : 0;
    };
  });

  auto* bip = qmp->add_subcommand("bipartite", "spectra test, rate and LR inequalities");
  bip->add_option("rho_a", bundle_path, "operator JSON")->required();
  bip->add_option("rho_b", second_path, "operator JSON")->required();
  bip->callback([&] {
    action = [&] {
      const CMatrix a = read_matrix(bundle_path), b = read_matrix(second_path);
      auto r = bipartite_check(a, b);
      bool lr_ok = true;
      for (int n = 1; n <= cfg.level; ++n)
        for (const auto& e : lr_inequality_check(a, b, n)) lr_ok = lr_ok && e.ok;
      json j{{"realizable", r.realizable}, {"omega", num(r.omega)},   {"pinsker_lower", r.pinsker_lower},
             {"s_a", r.s_a},               {"s_b", r.s_b},            {"minimizer", r.minimizer},
             {"lr_level", cfg.level},      {"lr_ok", lr_ok}};
      Output(cfg.out).json_out(j);
      return r.realizable ? 0 : 1;
    };
  });

  auto* ortho = qmp->add_subcommand("ortho", "bounded-rank isotypic inequality");
  ortho->add_option("bundle", bundle_path, "scenario bundle JSON")->required();
  ortho->add_option("--v", ortho_v, "rank bound v")->required();
  ortho->callback([&] {
    action = [&] {
      auto b = io::bundle_from_json(io::read_json_file(bundle_path));
      auto cert = ortho_bound_check(b.scenario, b.state, ortho_v, cfg.level, hierarchy_options(cfg));
      Output(cfg.out).json_out(io::certificate_to_json(cert));
      return verdict_code(cert);
    };
  });

  auto* sub = qmp->add_subcommand("subspace", "hierarchy restricted to a subspace");
  sub->add_option("bundle", bundle_path, "scenario bundle JSON")->required();
  sub->add_option("projector", second_path, "operator JSON of P_V on the joint space")->required();
  sub->callback([&] {
    action = [&] {
      auto b = io::bundle_from_json(io::read_json_file(bundle_path));
      auto pv = io::operator_from_json(io::read_json_file(second_path));
      auto cert = subspace_hierarchy_check(b.scenario, b.state, pv, cfg.level, hierarchy_options(cfg));
      Output(cfg.out).json_out(io::certificate_to_json(cert));
      return verdict_code(cert);
    };
  });

  auto* keyl = app.add_subcommand("keyl", "Keyl divergence K(rho||sigma)");
  keyl->add_option("rho", bundle_path, "operator JSON")->required();
  keyl->add_option("sigma", second_path, "operator JSON")->required();
  keyl->callback([&] {
    action = [&] {
      const CMatrix r = read_matrix(bundle_path), s = read_matrix(second_path);
      const double k = keyl_divergence(r, s), q = quantum_relative_entropy(r, s);
      const double kl = kl_divergence(sorted_spectrum(r), sorted_spectrum(s));
      const bool ok = std::isinf(q) || k <= q + 1e-10;
      Output(cfg.out).json_out({{"keyl", num(k)}, {"kl_spectra", num(kl)}, {"qre", num(q)}, {"qre_bound_ok", ok}});
      return 0;
    };
  });

  std::string q_list, spec_list, rho_path, eig_list;
  int n_val = 10, points = 201, trials = 1000, bins = 10, m_shots = 4, m_max = 20;
  bool bounds_only = false;

  auto* sanov = app.add_subcommand("sanov", "multinomial type probabilities against their bounds");
  sanov->add_option("--q", q_list, "distribution, comma separated")->required();
  sanov->add_option("--n", n_val, "sample size")->check(CLI::NonNegativeNumber);
  sanov->callback([&] {
    action = [&] {
      const auto q = parse_list(q_list);
      Output out(cfg.out);
      std::vector<std::string> head;
      for (std::size_t i = 0; i < q.size(); ++i) head.push_back("lambda" + std::to_string(i + 1));
      for (auto h : {"prob", "lower", "upper", "ok"}) head.push_back(h);
      io::CsvWriter csv(out.os(), head);
      bool all = true;
      for (const auto& l : compositions(n_val, static_cast<int>(q.size()))) {
        auto c = sanov_bounds_check(q, l, n_val);
        all = all && c.ok;
        std::vector<std::string> row;
        for (int x : l) row.push_back(std::to_string(x));
        for (double x : {c.value, c.lower, c.upper}) row.push_back(io::fmt(x));
        row.push_back(c.ok ? "1" : "0");
        csv.row(row);
      }
      return all ? 0 : 1;
    };
  });

  auto* sd = app.add_subcommand("spectral-dist", "distribution of the estimated Young diagram");
  auto* sd_spec = sd->add_option("--spectrum", spec_list, "spectrum, comma separated");
  sd->add_option("--rho", rho_path, "operator JSON")->excludes(sd_spec);
  sd->add_option("--n", n_val, "number of copies")->check(CLI::PositiveNumber);
  sd->callback([&] {
    action = [&] {
      TypeDistribution t = rho_path.empty() ? spectral_dist(Spectrum::sorted(parse_list(spec_list)), n_val)
                                            : spectral_dist(read_matrix(rho_path), n_val);
      Output out(cfg.out);
      std::vector<std::string> head;
      for (int i = 0; i < t.d; ++i) head.push_back("lambda" + std::to_string(i + 1));
      head.push_back("prob");
      io::CsvWriter csv(out.os(), head);
      for (const auto& [l, p] : t.support) {
        std::vector<std::string> row;
        for (int x : l) row.push_back(std::to_string(x));
        row.push_back(io::fmt(p));
        csv.row(row);
      }
      return 0;
    };
  });

  auto* dens = app.add_subcommand("density", "density of <psi|X|psi> for Haar psi");
  dens->add_option("--eigenvalues", eig_list, "eigenvalues of X, comma separated (repeats allowed)")->required();
  dens->add_option("--points", points, "grid points")->check(CLI::Range(2, 1000000));
  dens->callback([&] {
    action = [&] {
      auto ev = parse_list(eig_list);
      std::sort(ev.begin(), ev.end());
      std::vector<Eigenvalue> groups;
      for (double x : ev) {
        if (!groups.empty() && std::abs(groups.back().value - x) <= 1e-12) ++groups.back().multiplicity;
        else groups.push_back({x, 1});
      }
      const bool degenerate = groups.size() < ev.size();
      Output out(cfg.out);
      io::CsvWriter csv(out.os(), {"x", "value"});
      const double lo = ev.front(), hi = ev.back();
      for (int i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * i / (points - 1);
        const double f = degenerate ? density_degenerate(groups, x) : density_nondegenerate(ev, x);
        csv.row({io::fmt(x), io::fmt(f)});
      }
      return 0;
    };
  });

  auto* toy = app.add_subcommand("toy-xz", "X/Z estimation simulator and exact bounds");
  toy->add_option("--m", m_shots, "shots per basis")->check(CLI::PositiveNumber);
  toy->add_option("--trials", trials, "simulated trials")->check(CLI::PositiveNumber);
  toy->add_option("--bins", bins, "histogram bins per axis")->check(CLI::PositiveNumber);
  toy->add_flag("--bounds", bounds_only, "emit the quadrature bound table for m = 1..--m-max");
  toy->add_option("--m-max", m_max, "largest m in the bound table")->check(CLI::PositiveNumber);
  toy->callback([&] {
    action = [&] {
      Output out(cfg.out);
      if (bounds_only) {
        io::CsvWriter csv(out.os(), {"m", "corner_prob", "corner_bound", "corner_ok", "balanced_prob",
                                     "balanced_bound", "balanced_ok"});
        for (int m = 1; m <= m_max; ++m) {
          auto b = toy_xz_exact_bounds(m);
          csv.row({std::to_string(m), io::fmt(b.corner_prob), io::fmt(b.corner_bound), b.corner_ok ? "1" : "0",
                   io::fmt(b.balanced_prob), io::fmt(b.balanced_bound),
                   b.balanced_checked ? (b.balanced_ok ? "1" : "0") : "skipped"});
        }
        return 0;
      }
      std::vector<long long> hist(static_cast<std::size_t>(bins) * bins, 0);
      auto bin = [&](double v) { return std::min(bins - 1, static_cast<int>((v + 1) / 2 * bins)); };
      for (const auto& s : toy_xz_simulate(m_shots, trials, cfg.seed)) ++hist[bin(s.x_est) * bins + bin(s.z_est)];
      io::CsvWriter csv(out.os(), {"x_lo", "x_hi", "z_lo", "z_hi", "count"});
      for (int i = 0; i < bins; ++i)
        for (int j = 0; j < bins; ++j)
          csv.row({io::fmt(-1 + 2.0 * i / bins), io::fmt(-1 + 2.0 * (i + 1) / bins), io::fmt(-1 + 2.0 * j / bins),
                   io::fmt(-1 + 2.0 * (j + 1) / bins), std::to_string(hist[i * bins + j])});
      return 0;
    };
  });

  int n_max = 10;
  auto* born = app.add_subcommand("born-ratio", "Tr(Q⊗Π_sym) ratio against n");
  born->add_option("--P", bundle_path, "projector operator JSON")->required();
  born->add_option("--Q", second_path, "operator JSON")->required();
  born->add_option("--n-max", n_max, "largest n")->check(CLI::NonNegativeNumber);
  born->callback([&] {
    action = [&] {
      const CMatrix P = read_matrix(bundle_path), Q = read_matrix(second_path);
      Output out(cfg.out);
      io::CsvWriter csv(out.os(), {"n", "ratio"});
      for (int n = 0; n <= n_max; ++n) csv.row({std::to_string(n), io::fmt(born_ratio(P, Q, n))});
      return 0;
    };
  });

  std::vector<std::string> inputs;
  int d_val = 2;
  bool symmetrize = false;
  auto* bir = app.add_subcommand("biriffle", "double-coset expansion of the riffle trace");
  bir->add_option("inputs", inputs, "operator JSON per factor X_i on (C^d)^{⊗n}")->required();
  bir->add_option("--d", d_val, "local dimension")->check(CLI::PositiveNumber);
  bir->add_option("--n", n_val, "copies per factor")->check(CLI::PositiveNumber);
  bir->add_flag("--symmetrize", symmetrize, "conjugate inputs by the symmetric projector first");
  bir->callback([&] {
    action = [&] {
      std::vector<CMatrix> xs;
      for (const auto& p : inputs) xs.push_back(read_matrix(p));
      auto r = biriffle_terms(xs, d_val, n_val, symmetrize);
      const std::size_t k = xs.size();
      Output out(cfg.out);
      std::vector<std::string> head;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) head.push_back("l" + std::to_string(i) + std::to_string(j));
      for (auto h : {"cardinality", "representative", "coupling_re", "coupling_im", "running_sum"}) head.push_back(h);
      io::CsvWriter csv(out.os(), head);
      const double pref = static_cast<double>(factorial(d_val - 1)) /
                          static_cast<double>(factorial(n_val * static_cast<int>(k) + d_val - 1));
      double running = 0;
      for (const auto& t : r.terms) {
        std::vector<std::string> row;
        for (const auto& line : t.coset.l)
          for (int x : line) row.push_back(std::to_string(x));
        row.push_back(t.coset.cardinality.str());
        std::string rep;
        for (std::size_t i = 0; i < t.coset.representative.size(); ++i)
          rep += (i ? " " : "") + std::to_string(t.coset.representative[i]);
        row.push_back(rep);
        running += pref * static_cast<double>(t.coset.cardinality) * t.coupling.real();
        for (double x : {t.coupling.real(), t.coupling.imag(), running}) row.push_back(io::fmt(x));
        csv.row(row);
      }
      return 0;
    };
  });

  std::string probe_list;
  auto* cap = app.add_subcommand("capacity", "torus capacity, moment map and occasionality probe");
  cap->add_option("rep", bundle_path, "torus rep JSON {rank, weights, amplitudes}")->required();
  cap->add_option("--probe", probe_list, "comma-separated n values for the occasionality probe");
  cap->callback([&] {
    action = [&] {
      auto t = io::torus_from_json(io::read_json_file(bundle_path));
      json j = io::capacity_to_json(capacity(t.rep, t.v));
      if (!probe_list.empty()) {
        std::vector<int> ns;
        for (double x : parse_list(probe_list)) {
          if (x < 1 || x != std::round(x)) throw ArgumentError("--probe values must be positive integers");
          ns.push_back(static_cast<int>(x));
        }
        auto p = occasionality_probe(t.rep, t.v, ns);
        json rows = json::array();
        for (const auto& r : p.rows) rows.push_back({{"n", r.n}, {"p", r.p}, {"scaled", r.scaled}});
        j["occasionality"] = {{"regime", p.regime == OccasionalityRegime::Occasional ? "occasional" : "exponential_decay"},
                              {"c", p.c},
                              {"rows", rows}};
      }
      Output(cfg.out).json_out(j);
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (show_config) {
    std::cout << json{{"level", cfg.level},
                      {"tol_psd", cfg.tol_psd},
                      {"seed", cfg.seed},
                      {"budget_perms", cfg.budget_perms},
                      {"budget_dim", cfg.budget_dim},
                      {"out", cfg.out},
                      {"env_prefix", "QMPCERT_"}}
                     .dump(2)
              << '\n';
    return 0;
  }
  if (!action) {
    std::cerr << app.help();
    return 2;
  }
  try {
    return action();
  } catch (const ResourceError& e) {
    std::cerr << "resource budget exceeded: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
