// Copyright 2026 The Manna Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// manna: generate, solve, verify and explain mixed-manna allocation
// instances.
//
// Exit codes: 0 pass, 1 verification failure or broken invariant, 2 input
// error, 3 size guard exceeded, 4 subdivision unresolved, 5 degeneracy
// retries exhausted.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "manna/manna.hpp"

namespace {

using manna::io::Json;

void emit(const Json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw manna::InputError("cannot write " + path);
  out << text;
}

std::vector<manna::Rat> parse_rat_list(const std::string& text) {
  std::vector<manna::Rat> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(manna::parse_rat(part));
  return out;
}

struct Common {
  std::uint64_t seed = 1;
  std::string mode = "enumerate";
  std::string strategy = "exact";
  std::uint64_t guard = manna::oracles::kDefaultGuard;
  std::uint64_t max_denominator = std::uint64_t{1} << 32;
  int depth = 4;
  int threads = 0;

  void add(CLI::App* app) {
    app->add_option("--seed", seed, "perturbation seed");
    app->add_option("--mode", mode, "enumerate | augment")->check(CLI::IsMember({"enumerate", "augment"}));
    app->add_option("--strategy", strategy, "exact | subdivision")->check(CLI::IsMember({"exact", "subdivision"}));
    app->add_option("--guard", guard, "enumeration guard");
    app->add_option("--max-denominator", max_denominator, "perturbation grid resolution")->check(CLI::PositiveNumber);
    app->add_option("--depth", depth, "subdivision depth limit")->check(CLI::NonNegativeNumber);
    app->add_option("--threads", threads, "worker threads (default: MANNA_THREADS or all cores)");
  }

  manna::SolveOptions options() const {
    manna::SolveOptions o;
    o.seed = seed;
    o.mode = manna::parse_mode(mode);
    o.strategy = manna::parse_strategy(strategy);
    o.guard = guard;
    o.resolution = max_denominator;
    o.depth_limit = depth;
    o.threads = threads > 0 ? threads : manna::default_worker_count();
    return o;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"IEF1 + PO allocations for mixed manna, with certificates"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "write a random instance");
  std::uint64_t gen_seed = 1;
  int gen_agents = 2, gen_items = 3, gen_range = 10;
  std::string gen_profile = "mixed", gen_out;
  gen->add_option("--seed", gen_seed);
  gen->add_option("-n,--agents", gen_agents)->check(CLI::Range(2, 64));
  gen->add_option("-m,--items", gen_items)->check(CLI::Range(2, 64));
  gen->add_option("--range", gen_range, "values lie in [-range, range]")->check(CLI::Range(1, 1000000));
  gen->add_option("--profile", gen_profile, "goods | chores | mixed | zero-mixed")
      ->check(CLI::IsMember({"goods", "chores", "mixed", "zero-mixed"}));
  gen->add_option("-o,--output", gen_out);

  auto* solve = app.add_subcommand("solve", "solve an instance and write a certificate");
  Common solve_opts;
  std::string solve_in, solve_out;
  bool all_witnesses = false, solve_trace = false;
  solve->add_option("instance", solve_in)->required();
  solve_opts.add(solve);
  solve->add_flag("--all-witnesses", all_witnesses, "also list every IEF1+PO allocation by enumeration");
  solve->add_flag("--trace", solve_trace, "include the augmenting trace");
  solve->add_option("-o,--output", solve_out);

  auto* verify = app.add_subcommand("verify", "check a certificate against its instance");
  std::string verify_in, verify_cert;
  std::uint64_t verify_guard = manna::oracles::kDefaultGuard;
  verify->add_option("instance", verify_in)->required();
  verify->add_option("certificate", verify_cert)->required();
  verify->add_option("--guard", verify_guard);

  auto* explain = app.add_subcommand("explain", "dump prices, tie graph and cell membership");
  Common explain_opts;
  std::string explain_in, explain_w, explain_lambda;
  bool explain_trace = false;
  explain->add_option("instance", explain_in)->required();
  explain_opts.add(explain);
  explain->add_option("--w", explain_w, "weight vector, e.g. 1/2,1/2 (default: w*)");
  explain->add_option("--as-perturbed", explain_lambda, "read the instance as already perturbed with this lambda");
  explain->add_flag("--trace", explain_trace);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (gen->parsed()) {
    const auto inst = manna::gen::random_instance(gen_seed, gen_agents, gen_items, gen_range,
                                                  manna::gen::parse_profile(gen_profile));
    emit(manna::io::instance_json(inst), gen_out);
    return 0;
  }
  if (solve->parsed()) {
    const auto inst = manna::io::load_instance(solve_in);
    auto opts = solve_opts.options();
    opts.all_witnesses = all_witnesses;
    const auto result = manna::solve(inst, opts);
    Json j = manna::result_json(result);
    if (solve_trace && result.augment) {
      Json tr = Json::array();
      for (const auto& r : result.augment->runs)
        for (const auto& e : r.trace) tr.push_back(e.describe());
      j["augment_trace"] = std::move(tr);
    }
    emit(j, solve_out);
    if (!result.report.overall()) std::cerr << "verification failed: " << result.report.first_failure() << "\n";
    return result.report.overall() ? 0 : 1;
  }
  if (verify->parsed()) {
    const auto inst = manna::io::load_instance(verify_in);
    const auto cert = manna::io::load_certificate(verify_cert);
    const auto report = manna::oracles::verify_certificate(inst, cert, verify_guard);
    const manna::Item aux = cert.trivial ? -1 : cert.perturbed.items() - 1;
    emit(manna::io::report_json(report, aux), "");
    if (!report.overall()) std::cerr << "verification failed: " << report.first_failure() << "\n";
    return report.overall() ? 0 : 1;
  }
  if (explain->parsed()) {
    const auto inst = manna::io::load_instance(explain_in);
    manna::ExplainOptions eo;
    if (!explain_w.empty()) eo.w = manna::Weight(parse_rat_list(explain_w));
    if (!explain_lambda.empty()) eo.as_perturbed_lambda = manna::parse_rat(explain_lambda);
    eo.trace = explain_trace;
    emit(manna::explain(inst, explain_opts.options(), eo), "");
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const manna::UnresolvedError& e) {
    std::cerr << "error: " << e.what() << "\nbest simplex: " << e.best_simplex() << "\n";
    return e.exit_code();
  } catch (const manna::DegeneracyError& e) {
    std::cerr << "error: " << e.what() << "\ncycle:";
    for (const auto& s : e.cycle()) std::cerr << " item " << s.item + 1 << " -> agent " << s.agent + 1 << ";";
    std::cerr << "\n";
    return e.exit_code();
  } catch (const manna::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
