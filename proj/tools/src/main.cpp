#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "streamdist/errors.hpp"
#include "streamdist_tools/experiments.hpp"

namespace {

using streamdist::tools::RunConfig;

constexpr int kExitPass = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAssertion = 2;
constexpr int kExitBudget = 3;

struct Flags {
  std::string subject;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<unsigned> threads;
  std::optional<std::string> format;
  std::optional<std::string> out;
  std::optional<double> target;
  std::optional<std::string> votes_out;
  std::vector<std::string> params;
  // Shorthands that land in params.
  std::optional<std::string> source, axis, key, grid;
};

std::string json_scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (const auto& e : v) out += (out.empty() ? "" : ",") + json_scalar_text(e);
    return out;
  }
  return v.dump();
}

// Config file first, then explicit flags on top.
RunConfig build_config(const std::string& command, const Flags& f) {
  RunConfig cfg;
  cfg.command = command;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw streamdist::tools::UsageError("cannot open config " + f.config_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw streamdist::tools::UsageError(std::string("bad config: ") + e.what());
    }
    if (!j.is_object()) throw streamdist::tools::UsageError("config must be a JSON object");
    for (const auto& [k, v] : j.items()) {
      if (k == "subject") cfg.subject = v.get<std::string>();
      else if (k == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (k == "trials") cfg.trials = v.get<std::size_t>();
      else if (k == "threads") cfg.threads = v.get<unsigned>();
      else if (k == "format") cfg.format = v.get<std::string>();
      else if (k == "out") cfg.output_path = v.get<std::string>();
      else if (k == "target") cfg.target = v.get<double>();
      else if (k == "params") {
        for (const auto& [pk, pv] : v.items()) cfg.params[pk] = json_scalar_text(pv);
      } else {
        throw streamdist::tools::UsageError("unknown config key: " + k);
      }
    }
  }
  if (!f.subject.empty()) cfg.subject = f.subject;
  if (f.seed) cfg.seed = *f.seed;
  if (f.trials) cfg.trials = *f.trials;
  if (f.threads) cfg.threads = *f.threads;
  if (f.format) cfg.format = *f.format;
  if (f.out) cfg.output_path = *f.out;
  if (f.target) cfg.target = *f.target;
  for (const auto& kv : f.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw streamdist::tools::UsageError("--param expects key=value: " + kv);
    cfg.params[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  if (f.source) cfg.params["source"] = *f.source;
  if (f.axis) cfg.params["axis"] = *f.axis;
  if (f.key) cfg.params["key"] = *f.key;
  if (f.grid) cfg.params["grid"] = *f.grid;
  return cfg;
}

void write_table(const RunConfig& cfg, const streamdist::tools::Table& table, std::ostream& out) {
  if (cfg.format == "json") {
    streamdist::tools::write_json(out, cfg, table);
  } else {
    streamdist::tools::write_csv(out, cfg, table);
  }
}

void emit(const RunConfig& cfg, const streamdist::tools::Table& table, const std::string& path) {
  if (path.empty() || path == "-") {
    write_table(cfg, table, std::cout);
    return;
  }
  // Binary mode keeps LF line endings on every platform.
  std::ofstream file(path, std::ios::binary);
  if (!file) throw streamdist::tools::UsageError("cannot write " + path);
  write_table(cfg, table, file);
}

void add_common(CLI::App* sub, Flags& f, const std::string& subject_help) {
  sub->add_option("subject", f.subject, subject_help);
  sub->add_option("--config", f.config_path, "JSON config; explicit flags override it")->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "Master seed");
  sub->add_option("--trials", f.trials, "Monte Carlo trials");
  sub->add_option("--threads", f.threads, "Worker threads (output does not depend on this)");
  sub->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", f.out, "Output file (default stdout)");
  sub->add_option("--param,-p", f.params, "key=value, repeatable");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments on streaming distinguishers for planted GF(2) structure"};
  app.set_version_flag("--version", streamdist::tools::version_string());
  app.require_subcommand(1);
  Flags f;

  auto* predicate = app.add_subcommand("predicate", "Truth table, Walsh-Hadamard spectrum and resilience");
  add_common(predicate, f, "Builtin name (xor, and, maj, tsa, const0, const1) or predicate file");

  auto* distinguish = app.add_subcommand("distinguish", "Estimate a tester's success probability");
  add_common(distinguish, f, "Distinguisher name");
  distinguish->add_option("--source", f.source, "subspace, sparse_parity or local_prg");
  distinguish->add_option("--target", f.target, "Exit 2 unless the lower CI bound reaches this");

  auto* sweep = app.add_subcommand("sweep", "Success over a grid of memory parameters or trial counts");
  add_common(sweep, f, "Distinguisher name");
  sweep->add_option("--source", f.source, "subspace, sparse_parity or local_prg");
  sweep->add_option("--axis", f.axis, "memory or samples");
  sweep->add_option("--key", f.key, "Parameter varied on the memory axis");
  sweep->add_option("--grid", f.grid, "Comma-separated grid values");

  auto* verify = app.add_subcommand("verify", "Check a bound numerically");
  add_common(verify, f, "bias_set, shell_bias, predicate_bias, min_entropy or telescope");

  auto* reduce = app.add_subcommand("reduce", "Learn a parity secret through a distinguisher");
  add_common(reduce, f, "parity or sparse");
  reduce->add_option("--target", f.target, "Exit 2 unless the lower CI bound on recovery reaches this");
  reduce->add_option("--votes-out", f.votes_out, "Write per-bit vote counts here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  const auto* chosen = app.get_subcommands().front();
  try {
    const RunConfig cfg = build_config(chosen->get_name(), f);
    const auto result = streamdist::tools::run_command(cfg);
    emit(cfg, result.table, cfg.output_path);
    if (f.votes_out && result.detail) emit(cfg, *result.detail, *f.votes_out);
    return result.pass ? kExitPass : kExitAssertion;
  } catch (const streamdist::BudgetExceeded& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kExitBudget;
  } catch (const streamdist::tools::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "usage error: config: " << e.what() << '\n';
    return kExitUsage;
  } catch (const streamdist::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
