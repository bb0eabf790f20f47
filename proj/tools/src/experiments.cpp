#include "streamdist_tools/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "streamdist/errors.hpp"
#include "streamdist/monte_carlo.hpp"
#include "streamdist/parallel.hpp"
#include "streamdist/reductions.hpp"
#include "streamdist/robp.hpp"
#include "streamdist/spectral.hpp"

namespace streamdist::tools {

namespace {

// Keys that describe the source rather than the distinguisher.
const std::set<std::string> kSourceKeys = {"source", "n", "k", "predicate", "stream_len", "axis", "key", "grid"};

double parse_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw UsageError("parameter " + key + " is not a number: " + text);
  return v;
}

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

Predicate resolve_predicate(const std::string& name, std::optional<std::size_t> k) {
  if (std::filesystem::exists(name)) return load_predicate(name);
  if (!k) throw UsageError("builtin predicate " + name + " needs an arity (k)");
  try {
    return builtin_predicate(name, *k);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

SourceSpec source_from(const RunConfig& cfg, const std::string& default_family) {
  Family family;
  try {
    family = parse_family(cfg.text("source", default_family));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const std::size_t n = cfg.count("n", 16);
  switch (family) {
    case Family::subspace:
      return SourceSpec::subspace(n, cfg.count("k", 4));
    case Family::sparse_parity:
      return SourceSpec::sparse_parity(n, cfg.count("k", 4));
    case Family::local_prg:
      return SourceSpec::local_prg(n, resolve_predicate(cfg.text("predicate", "xor"), cfg.count("k", 2)));
  }
  throw UsageError("unknown source family");
}

ParamMap distinguisher_params(const RunConfig& cfg) {
  ParamMap out;
  for (const auto& [key, value] : cfg.params) {
    if (!kSourceKeys.count(key)) out[key] = parse_number(key, value);
  }
  return out;
}

std::string default_family_for(const std::string& name) {
  if (name == "sparse_sat" || name == "sparse_fixed_query") return "sparse_parity";
  if (name == "local_prefix") return "local_prg";
  return "subspace";
}

DistinguisherFactory factory_for(const std::string& name, const ParamMap& params, const SourceSpec& spec) {
  try {
    return distinguisher_factory(name, params, spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::optional<std::size_t> stream_len(const RunConfig& cfg) {
  if (!cfg.has("stream_len")) return std::nullopt;
  return cfg.count("stream_len", 0);
}

std::string point_label(std::initializer_list<std::pair<const char*, std::string>> parts) {
  std::string out;
  for (const auto& [k, v] : parts) {
    if (!out.empty()) out += ';';
    out += k;
    out += '=';
    out += v;
  }
  return out;
}

std::string num(double v) { return format_double(v); }
std::string num(std::size_t v) { return std::to_string(v); }

// --- verify ---------------------------------------------------------------

struct VerifyTable {
  CommandResult result;

  VerifyTable() {
    result.table.columns = {"check", "point", "quantity", "kind", "value", "ci_low", "ci_high", "bound", "pass"};
  }

  void add(const std::string& check, const std::string& point, const std::string& quantity, const std::string& kind,
           double value, double ci_low, double ci_high, double bound, bool pass) {
    result.table.add({check, point, quantity, kind, value, ci_low, ci_high, bound, pass});
    result.pass = result.pass && pass;
  }
  void exact(const std::string& check, const std::string& point, const std::string& quantity, double value,
             double bound, bool pass) {
    add(check, point, quantity, "exact", value, value, value, bound, pass);
  }
  void skipped(const std::string& check, const std::string& point, const std::string& quantity,
               const std::string& reason) {
    const double nan = std::nan("");
    result.table.add({check, point, quantity, "skipped: " + reason, nan, nan, nan, nan, true});
  }
};

CommandResult verify_bias_set(const RunConfig& cfg) {
  VerifyTable out;
  const auto ns = cfg.list("n", {32, 48, 64});
  const auto ls = cfg.list("l", {2, 3, 4});
  const std::size_t points = cfg.count("points", 20);
  for (double nd : ns) {
    for (double ld : ls) {
      const auto n = static_cast<std::size_t>(nd);
      const auto l = static_cast<std::size_t>(ld);
      for (const auto& c : check_bias_set_bound(n, l, points)) {
        out.exact("bias_set", point_label({{"n", num(n)}, {"l", num(l)}, {"delta", num(c.delta)}}), "bias_set_size",
                  c.size.convert_to<double>(), c.bound, c.pass);
      }
    }
  }
  return out.result;
}

SeedDistribution random_distribution(std::size_t n, std::size_t index, Rng& rng) {
  // Alternate flat distributions on random supports with random integer weights.
  static constexpr std::size_t kSupports[] = {16, 64, 256, 1024};
  if (index % 2 == 0) return SeedDistribution::random_subset(n, kSupports[(index / 2) % 4], rng);
  return SeedDistribution::random_weights(n, 1000, rng);
}

CommandResult verify_shell(const RunConfig& cfg) {
  VerifyTable out;
  const std::size_t n = cfg.count("n", 14);
  const auto ls = cfg.list("l", {2, 3, 4});
  const std::size_t count = cfg.count("count", 50);
  const double eps = cfg.number("eps", 0.5);
  for (std::size_t d = 0; d < count; ++d) {
    Rng rng(derive_seed(cfg.seed, d));
    const SeedDistribution dist = random_distribution(n, d, rng);
    for (double ld : ls) {
      const auto l = static_cast<std::size_t>(ld);
      const std::string point = point_label({{"n", num(n)}, {"l", num(l)}, {"dist", num(d)}});
      const ShellBiasCheck check = check_shell_bias(dist, l, eps);
      out.exact("shell_bias", point, "shell_bias_sq_vs_chain", check.measured, check.chain_bound, check.chain_pass);
      if (check.entropy_bound) {
        out.exact("shell_bias", point, "shell_bias_sq_vs_entropy_bound", check.measured, *check.entropy_bound,
                  check.entropy_pass.value_or(false));
      } else {
        out.skipped("shell_bias", point, "shell_bias_sq_vs_entropy_bound", check.skip_reason);
      }
      // The XOR predicate on an ordered tuple sees exactly the shell character.
      const Rational shell = squared_shell_bias_exact(dist, l);
      const Rational via_xor = predicate_source_bias(dist, builtin_predicate("xor", l)).mean_square_exact;
      out.exact("shell_bias", point, "xor_bias_equals_shell_bias", via_xor.convert_to<double>(),
                shell.convert_to<double>(), via_xor == shell);
    }
  }
  return out.result;
}

CommandResult verify_predicate_bias(const RunConfig& cfg) {
  VerifyTable out;
  const std::size_t n = cfg.count("n", 12);
  const std::size_t count = cfg.count("count", 10);
  const double eps = cfg.number("eps", 0.5);
  const Predicate p = resolve_predicate(cfg.text("predicate", "tsa"), cfg.count("k", 5));
  const Spectrum spec = walsh_hadamard(p);
  const std::size_t t = resilience(spec);
  // Number of nonzero Fourier coefficients at each level.
  std::vector<std::size_t> level_count(p.arity() + 1, 0);
  for (std::uint32_t alpha = 0; alpha < spec.numerators.size(); ++alpha) {
    if (spec.numerators[alpha] != 0) ++level_count[static_cast<std::size_t>(std::popcount(alpha))];
  }
  for (std::size_t d = 0; d < count; ++d) {
    Rng rng(derive_seed(cfg.seed, d));
    const SeedDistribution dist = random_distribution(n, d, rng);
    const std::string point = point_label({{"n", num(n)}, {"t", num(t)}, {"dist", num(d)}});
    const PredicateBias bias = predicate_source_bias(dist, p);
    // Cauchy-Schwarz with Parseval: the mean square bias is at most the sum
    // of squared shell biases over the predicate's Fourier support.
    Rational bound = level_count[0];
    for (std::size_t j = 1; j <= p.arity(); ++j) {
      if (level_count[j]) bound += Rational(level_count[j]) * squared_shell_bias_exact(dist, j);
    }
    out.exact("predicate_bias", point, "mean_square_bias_vs_fourier_sum", bias.mean_square, bound.convert_to<double>(),
              bias.mean_square_exact <= bound);
    // The constants in the tail bound are unspecified, so these ratios are reported only.
    if (t >= 1) {
      const double ms_scale = predicate_bias_scale(n, t, eps);
      out.add("predicate_bias", point, "mean_square_bias_over_scale", "ratio", bias.mean_square / ms_scale,
              std::nan(""), std::nan(""), std::nan(""), true);
      out.add("predicate_bias", point, "tail_constant_needed", "ratio",
              predicate_bias_constant(bias, predicate_bias_tail_scale(n, t, eps)), std::nan(""), std::nan(""),
              std::nan(""), true);
    }
  }
  return out.result;
}

CommandResult verify_min_entropy(const RunConfig& cfg) {
  VerifyTable out;
  const std::size_t n = cfg.count("n", 10);
  const Predicate p = resolve_predicate(cfg.text("predicate", "xor"), cfg.count("k", 1));
  const auto prob = FiniteDistinguishingProblem::local_prg(n, p);
  const std::size_t count = cfg.count("count", 20);
  const std::size_t width = cfg.count("width", 8);
  const std::size_t length = cfg.count("length", 4);
  const double d_t = cfg.number("d_t", static_cast<double>(n));
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(cfg.seed, i));
    const Robp prog = random_robp(prob.alphabet, length, width, rng);
    const MinEntropyReport r = check_min_entropy(prog, prob, d_t);
    const std::string point = point_label({{"n", num(n)}, {"program", num(i)}});
    out.exact("min_entropy", point, "violations", static_cast<double>(r.violations), 0.0, r.violations == 0);
    out.exact("min_entropy", point, "worst_ratio", r.worst_ratio, 1.0, r.worst_ratio <= 1.0);
    out.exact("min_entropy", point, "probability_residual", r.total_probability_residual, std::ldexp(1.0, -30),
              r.total_probability_residual <= std::ldexp(1.0, -30));
  }
  return out.result;
}

CommandResult verify_telescope(const RunConfig& cfg) {
  VerifyTable out;
  const std::size_t n = cfg.count("n", 16);
  const std::size_t m = cfg.count("m", 20);
  const Predicate p = resolve_predicate(cfg.text("predicate", "xor"), cfg.count("k", 2));
  ParamMap params{{"w", cfg.number("w", 12)}, {"count", cfg.number("count", 14)}};
  const auto make = factory_for("local_prefix", params, SourceSpec::local_prg(n, p));
  const HybridReport rep = hybrid_deltas(make, p, n, m, cfg.trials, cfg.seed, cfg.threads);
  for (std::size_t j = 0; j < rep.q.size(); ++j) {
    const auto& q = rep.q[j];
    out.add("telescope", point_label({{"j", num(j)}}), "q", "estimate", q.point, q.ci_low, q.ci_high, std::nan(""),
            true);
  }
  for (std::size_t j = 0; j < rep.deltas.size(); ++j) {
    const auto& d = rep.deltas[j];
    out.add("telescope", point_label({{"j", num(j + 1)}}), "delta", "estimate", d.point, d.ci_low, d.ci_high,
            std::nan(""), true);
  }
  const auto& g = rep.direct_gap;
  out.add("telescope", "all", "direct_gap", "estimate", g.point, g.ci_low, g.ci_high, std::nan(""), true);
  out.add("telescope", "all", "telescoped_sum", "estimate", rep.telescoped, rep.telescoped, rep.telescoped,
          std::nan(""), true);
  out.add("telescope", "all", "residual", "estimate", rep.residual, -rep.combined_half_width, rep.combined_half_width,
          rep.combined_half_width, rep.consistent);
  return out.result;
}

// --- reduce ---------------------------------------------------------------

struct TrialOutcome {
  bool recovered = false;
  bool halted = false;
  std::size_t samples = 0;
  std::size_t votes = 0;
  std::size_t votes_correct = 0;
  std::vector<std::pair<std::size_t, std::size_t>> counts;
  std::vector<bool> truth;
  std::vector<bool> estimate;
};

struct ReduceSetup {
  std::string kind;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t inner_m = 0;
  std::size_t feed_budget = 0;
  DistinguisherFactory make;
};

ReduceSetup reduce_setup(const RunConfig& cfg) {
  ReduceSetup s;
  s.kind = cfg.subject.empty() ? "parity" : cfg.subject;
  if (s.kind == "parity") {
    s.n = cfg.count("n", 12);
    s.k = cfg.count("k", 6);
    if (s.k < 1 || s.k > s.n) throw UsageError("reduce parity: need 1 <= k <= n");
    s.inner_m = cfg.count("inner_m", 8 * s.k);
    const ParamMap params{{"r", static_cast<double>(s.k - 1)},
                          {"window", static_cast<double>(s.inner_m)},
                          {"n_eff", static_cast<double>(s.n)}};
    s.make = factory_for("rank_threshold", params, SourceSpec::subspace(s.n, s.k));
  } else if (s.kind == "sparse") {
    s.n = cfg.count("n", 16);
    s.k = cfg.count("k", 4);
    if (s.k < 1 || 2 * s.k > s.n) throw UsageError("reduce sparse: need 1 <= k and 2k <= n");
    s.inner_m = cfg.count("inner_m", 4 * s.n);
    s.feed_budget = cfg.count("feed_budget", default_feed_budget(s.n, s.k, s.inner_m));
    const ParamMap params{{"m0", static_cast<double>(s.inner_m)}};
    s.make = factory_for("sparse_sat", params, SourceSpec::sparse_parity(s.n, s.k));
  } else {
    throw UsageError("reduce: kind must be parity or sparse");
  }
  return s;
}

TrialOutcome reduce_trial(const ReduceSetup& s, std::size_t reps, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0));
  TrialOutcome o;
  const std::size_t bits = s.kind == "parity" ? s.k : s.n + 1;
  const BitString x = uniform_bitstring(bits, rng);
  const LearnerReport rep = [&] {
    if (s.kind == "parity") {
      ParityOracle oracle(x, derive_seed(seed, 1));
      return learn_parity(s.make, s.n, s.k, reps, s.inner_m, oracle, rng);
    }
    SparseEquationOracle oracle(x, static_cast<double>(s.k) / static_cast<double>(s.n), derive_seed(seed, 1));
    return learn_sparse_parity(s.make, s.n, s.k, reps, s.inner_m, s.feed_budget, oracle, rng);
  }();
  o.recovered = rep.estimate == x;
  for (std::size_t i = 0; i < x.size(); ++i) o.truth.push_back(x.test(i));
  o.halted = rep.halted;
  o.samples = rep.samples_consumed;
  o.counts = rep.votes;
  for (std::size_t i = 0; i < rep.estimate.size(); ++i) o.estimate.push_back(rep.estimate.test(i));
  for (const auto& v : rep.log) {
    ++o.votes;
    if (v.credited == o.truth[v.bit]) ++o.votes_correct;
  }
  return o;
}

std::size_t auto_reps(const RunConfig& cfg, const ReduceSetup& s) {
  // Pilot: single-vote runs estimate the per-vote accuracy q.
  const std::size_t pilot = cfg.count("pilot_trials", 20);
  std::vector<TrialOutcome> outcomes(pilot);
  const std::uint64_t pilot_seed = derive_seed(cfg.seed, 0xA11CE);
  parallel_for(pilot, cfg.threads,
               [&](std::size_t t) { outcomes[t] = reduce_trial(s, 1, derive_seed(pilot_seed, t)); });
  std::size_t votes = 0;
  std::size_t correct = 0;
  for (const auto& o : outcomes) {
    votes += o.votes;
    correct += o.votes_correct;
  }
  const AdvantageEstimate q = wilson(correct, votes);
  if (q.ci_low <= 0.5) throw BudgetExceeded("reduce: pilot found no per-vote advantage; refusing to pick reps");
  const double bits = static_cast<double>(s.kind == "parity" ? s.k : s.n + 1);
  std::size_t reps = chernoff_reps(q.ci_low - 0.5, cfg.number("failure", 0.01) / bits);
  if (reps % 2 == 0) ++reps;
  if (reps > 100001) throw BudgetExceeded("reduce: automatic reps exceeds 100001");
  return reps;
}

}  // namespace

std::string RunConfig::text(const std::string& key, const std::string& fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

double RunConfig::number(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : parse_number(key, it->second);
}

std::size_t RunConfig::count(const std::string& key, std::size_t fallback) const {
  const double v = number(key, static_cast<double>(fallback));
  if (!(v >= 0) || v != std::floor(v) || v > 9.0e15) throw UsageError(key + " must be a nonnegative integer");
  return static_cast<std::size_t>(v);
}

std::vector<double> RunConfig::list(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  std::vector<double> out;
  std::stringstream in(it->second);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(parse_number(key, item));
  }
  return out;
}

CommandResult cmd_predicate(const RunConfig& cfg) {
  if (cfg.subject.empty()) throw UsageError("predicate: name or file required");
  std::optional<std::size_t> k;
  if (cfg.has("k")) k = cfg.count("k", 0);
  const Predicate p = resolve_predicate(cfg.subject, k);
  const Spectrum s = walsh_hadamard(p);
  const auto t = resilience(s);
  CommandResult out;
  out.table.columns = {"predicate",   "arity", "table_size", "table",      "resilience",
                       "alpha",       "level", "numerator",  "coefficient"};
  for (std::uint32_t alpha = 0; alpha < s.numerators.size(); ++alpha) {
    std::string mask(p.arity(), '0');
    for (std::size_t i = 0; i < p.arity(); ++i) {
      if ((alpha >> (p.arity() - 1 - i)) & 1U) mask[i] = '1';
    }
    out.table.add({cfg.subject, as_int(p.arity()), as_int(p.truth_table().size()), p.table_string(), as_int(t), mask,
                   static_cast<std::int64_t>(std::popcount(alpha)), s.numerators[alpha], s.coefficient(alpha)});
  }
  return out;
}

CommandResult cmd_distinguish(const RunConfig& cfg) {
  const std::string name = cfg.subject;
  if (name.empty()) throw UsageError("distinguish: distinguisher name required");
  const SourceSpec spec = source_from(cfg, default_family_for(name));
  const auto make = factory_for(name, distinguisher_params(cfg), spec);
  const SuccessEstimate est = estimate_success(make, spec, stream_len(cfg), cfg.trials, cfg.seed, cfg.threads);
  CommandResult out;
  out.table.columns = {"distinguisher", "source",       "n",         "k",          "trials",
                       "success",       "ci_low",       "ci_high",   "null_correct", "planted_correct",
                       "mean_samples",  "data_bits",    "declared_bound", "program_bits", "target",
                       "pass"};
  const bool pass = !cfg.target || est.success.ci_low >= *cfg.target;
  out.table.add({name, std::string(family_name(spec.family)), as_int(spec.n), as_int(spec.k), as_int(cfg.trials),
                 est.success.point, est.success.ci_low, est.success.ci_high, est.null_correct.point,
                 est.planted_correct.point, est.mean_samples, as_int(est.memory.data_bits),
                 as_int(est.memory.declared_bound), as_int(est.memory.program_bits),
                 cfg.target ? *cfg.target : std::nan(""), pass});
  out.pass = pass;
  return out;
}

CommandResult cmd_sweep(const RunConfig& cfg) {
  const std::string name = cfg.subject;
  if (name.empty()) throw UsageError("sweep: distinguisher name required");
  const std::string axis = cfg.text("axis", "memory");
  if (axis != "memory" && axis != "samples") throw UsageError("sweep: axis must be memory or samples");
  static const std::map<std::string, std::string> kMemoryKey = {
      {"subspace_rank", "window"}, {"orthogonal_tester", "iterations"}, {"rank_threshold", "window"},
      {"sparse_sat", "m0"},        {"sparse_fixed_query", "quota"},     {"local_prefix", "count"}};
  std::string key = cfg.text("key", "");
  if (axis == "memory" && key.empty()) {
    const auto it = kMemoryKey.find(name);
    if (it == kMemoryKey.end()) throw UsageError("sweep: no memory parameter for " + name + "; pass --key");
    key = it->second;
  }
  if (axis == "samples") key = "trials";
  const auto grid = cfg.list("grid", {});
  const SourceSpec spec = source_from(cfg, default_family_for(name));

  CommandResult out;
  out.table.columns = {"distinguisher", "axis",     "key",       "value",          "trials",
                       "success",       "ci_low",   "ci_high",   "ci_width",       "data_bits",
                       "declared_bound", "sanity"};
  std::optional<AdvantageEstimate> prev;
  std::size_t prev_trials = 0;
  for (double value : grid) {
    ParamMap params = distinguisher_params(cfg);
    std::size_t trials = cfg.trials;
    if (axis == "memory") {
      params[key] = value;
    } else {
      if (!(value >= 1) || value != std::floor(value)) throw UsageError("sweep: trial counts must be positive");
      trials = static_cast<std::size_t>(value);
    }
    const auto make = factory_for(name, params, spec);
    const SuccessEstimate est = estimate_success(make, spec, stream_len(cfg), trials, cfg.seed, cfg.threads);
    const double width = est.success.ci_high - est.success.ci_low;
    std::string sanity = "first";
    if (prev) {
      if (axis == "memory") {
        // More memory should not make the tester measurably worse.
        sanity = est.success.ci_high >= prev->ci_low ? "monotone" : "decreasing";
      } else {
        // Interval width should shrink roughly as trials^{-1/2}.
        const double expected = (prev->ci_high - prev->ci_low) *
                                std::sqrt(static_cast<double>(prev_trials) / static_cast<double>(trials));
        sanity = (width <= 2 * expected + 1e-12 && width >= expected / 2 - 1e-12) ? "scaling_ok" : "scaling_off";
      }
    }
    out.table.add({name, axis, key, value, as_int(trials), est.success.point, est.success.ci_low, est.success.ci_high,
                   width, as_int(est.memory.data_bits), as_int(est.memory.declared_bound), sanity});
    prev = est.success;
    prev_trials = trials;
  }
  return out;
}

CommandResult cmd_verify(const RunConfig& cfg) {
  const std::string& check = cfg.subject;
  if (check == "bias_set") return verify_bias_set(cfg);
  if (check == "shell_bias") return verify_shell(cfg);
  if (check == "predicate_bias") return verify_predicate_bias(cfg);
  if (check == "min_entropy") return verify_min_entropy(cfg);
  if (check == "telescope") return verify_telescope(cfg);
  throw UsageError("verify: unknown check '" + check +
                   "' (expected bias_set, shell_bias, predicate_bias, min_entropy, telescope)");
}

CommandResult cmd_reduce(const RunConfig& cfg) {
  const ReduceSetup s = reduce_setup(cfg);
  const std::string reps_text = cfg.text("reps", "51");
  const std::size_t reps = reps_text == "auto" ? auto_reps(cfg, s) : cfg.count("reps", 51);
  if (reps == 0) throw UsageError("reduce: reps must be positive");

  std::vector<TrialOutcome> outcomes(cfg.trials);
  parallel_for(cfg.trials, cfg.threads,
               [&](std::size_t t) { outcomes[t] = reduce_trial(s, reps, derive_seed(cfg.seed, t)); });

  std::size_t recovered = 0, halted = 0, votes = 0, correct = 0;
  std::size_t min_margin = SIZE_MAX;
  double samples = 0;
  CommandResult out;
  Table detail;
  detail.columns = {"trial", "bit", "count0", "count1", "truth", "estimate"};
  for (std::size_t t = 0; t < outcomes.size(); ++t) {
    const auto& o = outcomes[t];
    recovered += o.recovered;
    halted += o.halted;
    votes += o.votes;
    correct += o.votes_correct;
    samples += static_cast<double>(o.samples);
    for (std::size_t b = 0; b < o.counts.size(); ++b) {
      const auto [c0, c1] = o.counts[b];
      min_margin = std::min(min_margin, c0 > c1 ? c0 - c1 : c1 - c0);
      detail.add({as_int(t), as_int(b), as_int(c0), as_int(c1), static_cast<bool>(o.truth[b]),
                  static_cast<bool>(o.estimate[b])});
    }
  }
  const AdvantageEstimate rate = wilson(recovered, cfg.trials);
  const AdvantageEstimate vote = votes ? wilson(correct, votes) : AdvantageEstimate{};
  const std::size_t bits = s.kind == "parity" ? s.k : s.n + 1;
  const double predicted = votes ? std::pow(majority_success_probability(vote.point, reps), static_cast<double>(bits))
                                 : std::nan("");
  const bool pass = !cfg.target || rate.ci_low >= *cfg.target;
  out.table.columns = {"kind",       "n",       "k",          "reps",         "inner_m",    "feed_budget",
                       "trials",     "recovered", "recovery_rate", "ci_low",   "ci_high",    "vote_accuracy",
                       "vote_ci_low", "vote_ci_high", "predicted_recovery", "min_margin", "halted",
                       "mean_samples", "pass"};
  out.table.add({s.kind, as_int(s.n), as_int(s.k), as_int(reps), as_int(s.inner_m), as_int(s.feed_budget),
                 as_int(cfg.trials), as_int(recovered), rate.point, rate.ci_low, rate.ci_high, vote.point,
                 vote.ci_low, vote.ci_high, predicted, min_margin == SIZE_MAX ? std::int64_t{-1} : as_int(min_margin),
                 as_int(halted), cfg.trials ? samples / static_cast<double>(cfg.trials) : 0.0, pass});
  out.pass = pass;
  out.detail = std::move(detail);
  return out;
}

CommandResult run_command(const RunConfig& cfg) {
  if (cfg.format != "csv" && cfg.format != "json") throw UsageError("format must be csv or json");
  if (cfg.threads == 0) throw UsageError("threads must be at least 1");
  if (cfg.command == "predicate") return cmd_predicate(cfg);
  if (cfg.command == "distinguish") return cmd_distinguish(cfg);
  if (cfg.command == "sweep") return cmd_sweep(cfg);
  if (cfg.command == "verify") return cmd_verify(cfg);
  if (cfg.command == "reduce") return cmd_reduce(cfg);
  throw UsageError("unknown command: " + cfg.command);
}

}  // namespace streamdist::tools
