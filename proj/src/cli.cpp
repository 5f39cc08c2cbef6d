// Copyright 2026 The noisysum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "noisysum/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "noisysum/estimators.hpp"
#include "noisysum/exact_oracle.hpp"
#include "noisysum/experiments.hpp"
#include "noisysum/identities.hpp"
#include "noisysum/io.hpp"
#include "noisysum/model.hpp"
#include "noisysum/moment_matched.hpp"

namespace noisysum {
namespace {

// Raised for flag combinations CLI11 cannot express on its own.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Common {
  std::string output;
  std::string format = "json";
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct EstimateOpts {
  std::string input;
  std::string samples;
  std::optional<double> gamma, eps1, eps2, w;
  std::optional<unsigned> k;
  std::optional<std::uint64_t> m, t;
  double c_m = kDefaultCm;
  double c_t = kDefaultCt;
};

struct SimulateOpts {
  std::string experiment;
  std::string input;
  std::uint64_t n = 0;
  double ones = 0.5;
  std::optional<double> gamma;
  std::optional<double> eps, eps1, eps2, budget;
  double w = 0.0;
  std::optional<unsigned> k;
  std::optional<std::uint64_t> m, t;
  double c_m = kDefaultCm;
  double c_t = kDefaultCt;
  std::uint64_t trials = 1000;
  std::string functional = "abs_vs_mu";
  unsigned kmin = 1;
  unsigned kmax = 6;
  unsigned lb_k = 1;
  std::string lb_gamma = "1/2";
  std::uint64_t n0 = 0;
  std::vector<std::uint64_t> m_list;
  unsigned order = 0;
  bool null_run = false;
};

struct OracleOpts {
  std::string input;
  std::vector<double> x, p, q, deviations;
  std::optional<std::uint64_t> n;
  std::uint64_t m = 1;
  unsigned k = 1;
  std::optional<unsigned> h;
  double w = 0.0;
};

struct IdentityOpts {
  unsigned kmax = 20;
};

struct LowerBoundOpts {
  unsigned k = 1;
  std::string gamma;
  std::uint64_t n0 = 0;
};

unsigned resolve_threads(unsigned flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("NOISYSUM_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 1024) return static_cast<unsigned>(v);
    throw UsageError(std::string("NOISYSUM_THREADS must be a positive integer, got '") + env +
                     "'");
  }
  return 1;
}

void add_common(CLI::App* cmd, Common& c, bool with_seed) {
  cmd->add_option("--output,-o", c.output, "Write results to this file instead of stdout");
  cmd->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  if (with_seed) cmd->add_option("--seed", c.seed, "Seed for all randomness")->capture_default_str();
  cmd->add_option("--threads", c.threads, "Worker threads (default: NOISYSUM_THREADS or 1)")
      ->check(CLI::Range(1u, 1024u));
}

// Pair (P, Q) from explicit distributions; gamma defaults to the realized max ratio deviation.
PerturbedPair pair_from(const Distribution& nominal, const Distribution& truth,
                        std::optional<double> gamma) {
  if (nominal.size() != truth.size()) throw UsageError("p and q differ in length");
  std::vector<double> dev(nominal.size());
  double max_dev = 0.0;
  for (std::size_t i = 0; i < dev.size(); ++i) {
    if (!(nominal[i] > 0.0)) throw UsageError("nominal probabilities must be positive");
    dev[i] = truth[i] / nominal[i] - 1.0;
    max_dev = std::max(max_dev, std::abs(dev[i]));
  }
  return make_perturbed(nominal, std::move(dev), gamma.value_or(max_dev));
}

std::string render_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string render_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << "\n";
  }
  return out.str();
}

std::string cell(double v) { return format_double(v); }
std::string cell(std::uint64_t v) { return std::to_string(v); }

// ---- estimate ----

std::string cmd_estimate(const EstimateOpts& o, const Common& c) {
  const PopulationFile file = read_population_file(o.input);
  const auto& pop = file.population;
  const auto& nominal = file.nominal;

  std::optional<std::vector<std::size_t>> offline;
  if (!o.samples.empty()) offline = read_sample_indices(o.samples, pop.size());
  if (!file.true_dist && !offline) {
    throw InfeasibleError(
        "no sampling source: add a q column to --input (simulation mode) or pass --samples "
        "(offline mode)");
  }

  PlanParameters plan;
  if (o.k && o.m) {
    plan.k = *o.k;
    plan.m = *o.m;
    plan.t = o.t.value_or(1);
    plan.gamma = o.gamma.value_or(0.0);
    plan.c_m = o.c_m;
    plan.c_t = o.c_t;
  } else if (o.gamma && o.eps1 && o.eps2) {
    const PopulationStats stats = population_stats(pop, nominal);
    plan = plan_parameters(*o.gamma, *o.eps1, *o.eps2, stats.n_tilde, stats.var_hh, o.c_m, o.c_t);
    if (o.k) plan.k = *o.k;
    if (o.m) plan.m = *o.m;
    if (o.t) plan.t = *o.t;
  } else {
    throw UsageError("estimate needs either --k and --m, or all of --gamma, --eps1, --eps2");
  }

  EstimatorReport report;
  if (plan.t == 0) {
    // Single stage at a caller-supplied center.
    if (!o.w) throw UsageError("--t 0 requires --w");
    if (offline) {
      if (offline->size() < plan.m) {
        throw InfeasibleError("sample file holds " + std::to_string(offline->size()) +
                              " indices but the plan needs m = " + std::to_string(plan.m));
      }
      report = estimate_sum(frequency_vector(std::span<const std::size_t>(*offline).first(plan.m),
                                             pop.size()),
                            plan.k, *o.w, pop, nominal);
    } else {
      report = estimate_sum(draw_samples(*file.true_dist, plan.m, c.seed), plan.k, *o.w, pop,
                            nominal);
      report.seed = c.seed;
    }
  } else if (offline) {
    report = improved_estimate_sum(*offline, plan, pop, nominal);
  } else {
    report = improved_estimate_sum(AliasSampler(*file.true_dist), plan, pop, nominal, c.seed);
  }

  if (c.format == "json") return render_json(to_json(report));
  std::vector<std::string> header = {"estimate", "k", "m", "t", "pilot_W", "seed"};
  std::vector<std::string> row = {cell(report.estimate), cell(std::uint64_t{report.k}),
                                  cell(report.m), cell(report.t), cell(report.pilot_w),
                                  cell(report.seed)};
  for (std::size_t h = 0; h < report.xi_values.size(); ++h) {
    header.push_back("xi_" + std::to_string(h + 1));
    row.push_back(cell(report.xi_values[h]));
  }
  return render_csv(header, {row});
}

// ---- simulate ----

std::string trial_output(const TrialCsvRow& row, const Common& c) {
  if (c.format == "json") return render_json(to_json(row));
  return std::string(kTrialCsvHeader) + "\n" + to_csv_line(row) + "\n";
}

std::string simulate_zero_one(const SimulateOpts& o, const Common& c, unsigned threads) {
  if (o.n == 0) throw UsageError("zero-one needs --n");
  if (!o.gamma || !o.eps) throw UsageError("zero-one needs --gamma and --eps");
  const ZeroOneResult r =
      zero_one_experiment(o.n, o.ones, *o.gamma, *o.eps, o.trials, o.c_m, o.c_t, c.seed, threads);
  TrialCsvRow row{"zero-one", r.n, *o.gamma, *o.eps, *o.eps, r.plan, c.seed, r.stats};
  return trial_output(row, c);
}

std::string simulate_trials(const SimulateOpts& o, const Common& c, unsigned threads) {
  if (o.input.empty()) throw UsageError("trials needs --input");
  const PopulationFile file = read_population_file(o.input);
  PerturbedPair pair = [&] {
    if (file.true_dist) return pair_from(file.nominal, *file.true_dist, o.gamma);
    if (!o.gamma) throw UsageError("trials needs a q column in --input or --gamma");
    const auto split = find_balanced_split(file.nominal);
    if (!split) throw InfeasibleError("no balanced split of the nominal distribution exists");
    return worst_case_pair(file.nominal, *o.gamma, *split);
  }();
  if (!o.k || !o.m) throw UsageError("trials needs --k and --m");

  TrialConfig config{file.population, pair, {}, o.w, o.trials, c.seed,
                     parse_error_functional(o.functional)};
  config.plan.k = *o.k;
  config.plan.m = *o.m;
  config.plan.t = o.t.value_or(0);
  config.plan.gamma = pair.gamma_bound;
  config.abs_budget = o.budget.value_or(0.0);
  config.eps1 = o.eps1.value_or(0.0);
  config.eps2 = o.eps2.value_or(0.0);
  config.eps = o.eps.value_or(0.0);
  config.threads = threads;
  const TrialStats stats = run_trials(config);
  TrialCsvRow row{"trials",    file.population.size(), pair.gamma_bound, config.eps1,
                  config.eps2, config.plan,            c.seed,           stats};
  return trial_output(row, c);
}

std::string simulate_bias_decay(const SimulateOpts& o, const Common& c) {
  if (!o.gamma) throw UsageError("bias-decay needs --gamma");
  std::vector<BiasDecayRow> rows;
  if (o.input.empty()) {
    // Default: two points, deviations (gamma, -gamma), values signed per k so the bound is tight.
    const std::vector<std::size_t> split = {0};
    const PerturbedPair pair = worst_case_pair(Distribution::uniform(2), *o.gamma, split);
    if (o.kmin == 0 || o.kmin > o.kmax) throw UsageError("need 1 <= kmin <= kmax");
    for (unsigned k = o.kmin; k <= o.kmax; ++k) {
      rows.push_back(bias_decay_sweep(saturating_population(pair, k), pair, k, k).front());
    }
  } else {
    const PopulationFile file = read_population_file(o.input);
    if (file.true_dist) {
      rows = bias_decay_sweep(file.population, pair_from(file.nominal, *file.true_dist, o.gamma),
                              o.kmin, o.kmax);
    } else {
      rows = bias_decay_sweep(file.population, file.nominal, *o.gamma, o.kmin, o.kmax);
    }
  }
  if (c.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      arr.push_back({{"k", r.k}, {"exact_bias", r.exact_bias}, {"bound", r.bound},
                     {"ratio", r.ratio}});
    }
    return render_json(arr);
  }
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({cell(std::uint64_t{r.k}), cell(r.exact_bias), cell(r.bound), cell(r.ratio)});
  }
  return render_csv({"k", "exact_bias", "bound", "ratio"}, cells);
}

std::string simulate_distinguish(const SimulateOpts& o, const Common& c, unsigned threads) {
  if (o.n0 == 0) throw UsageError("distinguish needs --n0");
  if (o.m_list.empty()) throw UsageError("distinguish needs --m-list");
  const MomentMatchedPair exact = construct_pair(o.lb_k, parse_rational(o.lb_gamma), o.n0);
  const RealizedPair pair = realize_integer_counts(exact);
  DistinguishConfig config;
  config.m_values = o.m_list;
  config.trials = o.trials;
  config.seed = c.seed;
  config.order = o.order;
  if (o.null_run) config.arm_b = config.arm_a;
  config.threads = threads;
  const auto rows = distinguishability_experiment(pair, config);
  if (c.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      arr.push_back({{"m", r.m},
                     {"mean_a", r.mean_a},
                     {"mean_b", r.mean_b},
                     {"var_a", r.var_a},
                     {"var_b", r.var_b},
                     {"separation_z", r.separation_z}});
    }
    return render_json(arr);
  }
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({cell(r.m), cell(r.mean_a), cell(r.mean_b), cell(r.var_a), cell(r.var_b),
                     cell(r.separation_z)});
  }
  return render_csv({"m", "mean_a", "mean_b", "var_a", "var_b", "separation_z"}, cells);
}

std::string cmd_simulate(const SimulateOpts& o, const Common& c) {
  const unsigned threads = resolve_threads(c.threads);
  if (o.experiment == "zero-one") return simulate_zero_one(o, c, threads);
  if (o.experiment == "trials") return simulate_trials(o, c, threads);
  if (o.experiment == "bias-decay") return simulate_bias_decay(o, c);
  return simulate_distinguish(o, c, threads);
}

// ---- oracle ----

std::string cmd_oracle(const OracleOpts& o, const Common& c) {
  const unsigned threads = resolve_threads(c.threads);
  std::optional<Population> pop;
  std::optional<Distribution> nominal;
  std::optional<Distribution> truth;
  if (!o.input.empty()) {
    PopulationFile file = read_population_file(o.input);
    pop = file.population;
    nominal = file.nominal;
    truth = file.true_dist;
  } else {
    if (o.x.empty()) throw UsageError("oracle needs --input or --x");
    pop = Population(o.x);
    nominal = o.p.empty() ? Distribution::uniform(o.x.size()) : Distribution(o.p);
    if (!o.q.empty()) truth = Distribution(o.q);
  }
  if (o.n && *o.n != pop->size()) {
    throw UsageError("--n " + std::to_string(*o.n) + " does not match population size " +
                     std::to_string(pop->size()));
  }
  PerturbedPair pair = [&] {
    if (!o.deviations.empty()) {
      double g = 0.0;
      for (double d : o.deviations) g = std::max(g, std::abs(d));
      return make_perturbed(*nominal, o.deviations, g);
    }
    if (truth) return pair_from(*nominal, *truth, std::nullopt);
    return make_perturbed(*nominal, std::vector<double>(nominal->size(), 0.0), 0.0);
  }();
  const ExactMoments moments = o.h ? exact_xi_moments(*pop, pair, o.m, *o.h, o.w, threads)
                                   : exact_estimator_moments(*pop, pair, o.m, o.k, o.w, threads);
  if (c.format == "json") return render_json(to_json(moments));
  return render_csv({"expectation", "variance", "outcome_count", "total_prob"},
                    {{cell(moments.expectation), cell(moments.variance),
                      cell(moments.outcome_count), cell(moments.total_prob)}});
}

// ---- identities ----

std::string cmd_identities(const IdentityOpts& o, const Common& c, bool& violated) {
  const IdentitySuiteReport r = run_identity_suite(o.kmax, c.seed);
  violated = !r.passed();
  if (c.format == "json") {
    return render_json({{"binomial_cases", r.binomial_cases},
                        {"binomial_mismatches", r.binomial_mismatches},
                        {"bias_cases", r.bias_cases},
                        {"bias_max_residual", r.bias_max_residual},
                        {"prod_cases", r.prod_cases},
                        {"prod_max_residual", r.prod_max_residual},
                        {"expression_cases", r.expression_cases},
                        {"expression_max_residual", r.expression_max_residual},
                        {"max_residual", r.max_residual()},
                        {"tolerance", kIdentityTolerance},
                        {"passed", r.passed()}});
  }
  return render_csv({"suite", "cases", "max_residual"},
                    {{"binomial", cell(r.binomial_cases), cell(double(r.binomial_mismatches))},
                     {"bias", cell(r.bias_cases), cell(r.bias_max_residual)},
                     {"prod", cell(r.prod_cases), cell(r.prod_max_residual)},
                     {"expression", cell(r.expression_cases), cell(r.expression_max_residual)}});
}

// ---- lowerbound ----

std::string cmd_lowerbound(const LowerBoundOpts& o, const Common& c, bool& violated) {
  const MomentMatchedPair pair = construct_pair(o.k, parse_rational(o.gamma), o.n0);
  struct MomentRow {
    unsigned ell;
    Rational f1, f2;
  };
  std::vector<MomentRow> moments;
  for (unsigned ell = 1; ell <= o.k + 1; ++ell) {
    moments.push_back({ell, frequency_moment(pair.d1, ell), frequency_moment(pair.d2, ell)});
  }
  for (const auto& row : moments) {
    if (row.ell <= o.k && row.f1 != row.f2) violated = true;
  }
  if (c.format == "json") {
    nlohmann::json table = nlohmann::json::array();
    for (const auto& row : moments) {
      table.push_back({{"ell", row.ell},
                       {"d1", to_string(row.f1)},
                       {"d2", to_string(row.f2)},
                       {"equal", row.f1 == row.f2}});
    }
    return render_json({{"k", pair.k},
                        {"gamma", to_string(pair.gamma)},
                        {"n0", o.n0},
                        {"n1", to_string(pair.n1)},
                        {"n2", to_string(pair.n2)},
                        {"gap", to_string(pair.gap)},
                        {"d1", spectrum_to_json(pair.d1)},
                        {"d2", spectrum_to_json(pair.d2)},
                        {"moments", table}});
  }
  std::vector<std::vector<std::string>> cells;
  for (const auto& row : moments) {
    cells.push_back({std::to_string(row.ell), to_string(row.f1), to_string(row.f2),
                     row.f1 == row.f2 ? "1" : "0"});
  }
  return render_csv({"ell", "d1", "d2", "equal"}, cells);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bias-reducing sum estimation under noisy weighted sampling", "noisysum"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "noisysum 1.0.0");

  Common common;

  EstimateOpts est;
  auto* estimate = app.add_subcommand("estimate", "Estimate the population sum from samples");
  add_common(estimate, common, true);
  estimate->add_option("--input,-i", est.input, "Population file (CSV or JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  estimate->add_option("--samples", est.samples, "Pre-drawn 1-based sample indices")
      ->check(CLI::ExistingFile);
  estimate->add_option("--gamma", est.gamma, "Pointwise closeness bound");
  estimate->add_option("--eps1", est.eps1, "Relative error target");
  estimate->add_option("--eps2", est.eps2, "Additive error target");
  estimate->add_option("--k", est.k, "Estimator order")->check(CLI::Range(1u, kMaxOrder));
  estimate->add_option("--m", est.m, "Second-stage sample count")->check(CLI::PositiveNumber);
  estimate->add_option("--t", est.t, "Pilot sample count (0: single stage at --w)");
  estimate->add_option("--w", est.w, "Center for the single-stage estimator");
  estimate->add_option("--cm", est.c_m, "Constant in m")->check(CLI::PositiveNumber);
  estimate->add_option("--ct", est.c_t, "Constant in t")->check(CLI::PositiveNumber);

  SimulateOpts sim;
  auto* simulate = app.add_subcommand("simulate", "Run a Monte-Carlo experiment");
  add_common(simulate, common, true);
  simulate->add_option("--experiment", sim.experiment, "Experiment to run")
      ->required()
      ->check(CLI::IsMember({"zero-one", "trials", "bias-decay", "distinguish"}));
  simulate->add_option("--input,-i", sim.input, "Population file (trials, bias-decay)")
      ->check(CLI::ExistingFile);
  simulate->add_option("--n", sim.n, "Population size (zero-one)");
  simulate->add_option("--ones", sim.ones, "Fraction of ones (zero-one)")
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--gamma", sim.gamma, "Closeness bound");
  simulate->add_option("--eps", sim.eps, "Error parameter (zero-one, corollary functional)");
  simulate->add_option("--eps1", sim.eps1, "Relative error target (thm21 functional)");
  simulate->add_option("--eps2", sim.eps2, "Additive error target (thm21 functional)");
  simulate->add_option("--budget", sim.budget, "Absolute error budget (abs_vs_mu functional)");
  simulate->add_option("--k", sim.k, "Estimator order (trials)")->check(CLI::Range(1u, kMaxOrder));
  simulate->add_option("--m", sim.m, "Second-stage samples (trials)")->check(CLI::PositiveNumber);
  simulate->add_option("--t", sim.t, "Pilot samples; 0 runs single stage at --w (trials)");
  simulate->add_option("--w", sim.w, "Fixed center when --t is 0");
  simulate->add_option("--cm", sim.c_m, "Constant in m")->check(CLI::PositiveNumber);
  simulate->add_option("--ct", sim.c_t, "Constant in t")->check(CLI::PositiveNumber);
  simulate->add_option("--trials", sim.trials, "Number of trials")->check(CLI::PositiveNumber);
  simulate->add_option("--functional", sim.functional, "Error functional (trials)")
      ->check(CLI::IsMember({"abs_vs_mu", "thm21", "corollary"}));
  simulate->add_option("--kmin", sim.kmin, "Smallest order (bias-decay)")
      ->check(CLI::Range(1u, kMaxOrder));
  simulate->add_option("--kmax", sim.kmax, "Largest order (bias-decay)")
      ->check(CLI::Range(1u, kMaxOrder));
  simulate->add_option("--lb-k", sim.lb_k, "Matched moments of the instance (distinguish)")
      ->check(CLI::Range(1u, 16u));
  simulate->add_option("--lb-gamma", sim.lb_gamma, "Rational gamma of the instance (distinguish)");
  simulate->add_option("--n0", sim.n0, "Scale of the instance (distinguish)");
  simulate->add_option("--m-list", sim.m_list, "Comma-separated sample sizes (distinguish)")
      ->delimiter(',');
  simulate->add_option("--order", sim.order, "Estimator order; 0 picks lb-k + 1 (distinguish)");
  simulate->add_flag("--null", sim.null_run, "Feed the same scenario to both arms (distinguish)");

  OracleOpts orc;
  auto* oracle = app.add_subcommand("oracle", "Exact moments by full enumeration");
  oracle->set_help_flag("--help", "Print this help message and exit");
  add_common(oracle, common, false);
  oracle->add_option("--input,-i", orc.input, "Population file")->check(CLI::ExistingFile);
  oracle->add_option("--x", orc.x, "Comma-separated values")->delimiter(',');
  oracle->add_option("--p", orc.p, "Comma-separated nominal probabilities")->delimiter(',');
  oracle->add_option("--q", orc.q, "Comma-separated true probabilities")->delimiter(',');
  oracle->add_option("--deviations", orc.deviations, "Comma-separated deviations Q/P - 1")
      ->delimiter(',');
  oracle->add_option("--n", orc.n, "Expected population size");
  oracle->add_option("--m", orc.m, "Sample count")->required()->check(CLI::PositiveNumber);
  oracle->add_option("--k", orc.k, "Estimator order")->check(CLI::Range(1u, kMaxOrder));
  oracle->add_option("--h", orc.h, "Report moments of the single collision term xi_h instead")
      ->check(CLI::PositiveNumber);
  oracle->add_option("--w", orc.w, "Center W");

  IdentityOpts ids;
  auto* identities = app.add_subcommand("identities", "Run the identity validators");
  add_common(identities, common, true);
  identities->add_option("--kmax", ids.kmax, "Largest order for the bias identity")
      ->check(CLI::Range(1u, 32u))
      ->capture_default_str();

  LowerBoundOpts lb;
  auto* lowerbound = app.add_subcommand("lowerbound", "Build a moment-matched pair");
  add_common(lowerbound, common, false);
  lowerbound->add_option("--k", lb.k, "Matched moments")->required()->check(CLI::Range(1u, 16u));
  lowerbound->add_option("--gamma", lb.gamma, "Rational closeness, e.g. 1/2 or 0.25")->required();
  lowerbound->add_option("--n0", lb.n0, "Scale")->required()->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help_out;
    std::ostringstream help_err;
    const int code = app.exit(e, help_out, help_err);
    out << help_out.str();
    err << help_err.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    bool violated = false;
    std::string text;
    if (estimate->parsed()) {
      text = cmd_estimate(est, common);
    } else if (simulate->parsed()) {
      text = cmd_simulate(sim, common);
    } else if (oracle->parsed()) {
      text = cmd_oracle(orc, common);
    } else if (identities->parsed()) {
      text = cmd_identities(ids, common, violated);
    } else {
      text = cmd_lowerbound(lb, common, violated);
    }
    if (common.output.empty()) {
      out << text;
    } else {
      write_file_atomically(common.output, text);
    }
    if (violated) {
      err << "error: property check failed\n";
      return kExitPropertyViolation;
    }
    return kExitOk;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitPropertyViolation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInfeasible;
  }
}

}  // namespace noisysum
