// Copyright 2026 The qdist Authors
//
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

// qdist: controllability, distance to uncontrollability and speed limits.
//
// Exit codes: 0 ok, 1 malformed input, 2 uncontrollable verdict,
// 3 size guard, 4 numerical failure.

#include <CLI11.hpp>

#include <functional>
#include <iostream>

#include "commands.hpp"

namespace {

using namespace qdist;
using namespace qdist::cli;

void add_common_flags(CLI::App* sub, ToleranceFlags& t, bool& pretty) {
  sub->add_flag("--pretty", pretty, "human-readable output instead of JSON");
  sub->add_option("--config", t.config, "JSON file with tolerance overrides");
  sub->add_option("--hermiticity-tol", t.hermiticity_tol);
  sub->add_option("--trace-tol", t.trace_tol);
  sub->add_option("--rank-tol", t.rank_rel_tol, "relative SVD rank cutoff (also QDIST_TOL_RANK)");
  sub->add_option("--commute-tol", t.commute_tol);
  sub->add_option("--degeneracy-tol", t.degeneracy_tol);
}

std::string render_table(const Json& report) {
  std::ostringstream os;
  os << std::left << std::setw(44) << "row" << std::setw(24) << "computed" << std::setw(24) << "reference"
     << "status\n";
  for (const auto& r : report["rows"]) {
    os << std::left << std::setw(44) << r["row"].get<std::string>() << std::setw(24) << r["computed"].dump()
       << std::setw(24) << r["reference"].dump() << r["status"].get<std::string>() << "  "
       << r["note"].get<std::string>() << '\n';
  }
  os << (report["all_pass"].get<bool>() ? "all rows PASS\n" : "some rows FAIL\n");
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qdist: quantum controllability, distance to uncontrollability and speed limits"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  bool pretty = false;
  app.add_flag("--pretty", pretty, "human-readable output instead of JSON");

  ToleranceFlags tflags;
  std::string system_path;
  std::string out_path;
  std::function<CommandResult()> action;
  bool table = false;

  auto with_system = [&](CLI::App* sub) {
    sub->add_option("--system", system_path, "system JSON file")->required();
    add_common_flags(sub, tflags, pretty);
  };
  auto load = [&] {
    const auto tol = resolve_tolerances(tflags);
    return std::make_pair(load_system(system_path, tol), tol);
  };

  ModelArgs margs;
  auto* model = app.add_subcommand("model", "build a standard model and emit its system JSON");
  model->add_option("--name", margs.name, "two_qubit_ising | global_control_chain | hopping_chain | cross_kerr")
      ->required();
  model->add_option("--param", margs.params, "key=value (repeatable)");
  model->add_option("--out", out_path, "write to this file instead of stdout");
  model->add_flag("--reference", margs.reference, "include closed-form reference values");
  model->add_flag("--pretty", pretty, "human-readable output instead of JSON");
  model->callback([&] { action = [&] { return cmd_model(margs); }; });

  auto* lie = app.add_subcommand("lie", "dimension of the dynamical Lie algebra");
  with_system(lie);
  lie->callback([&] {
    action = [&] {
      auto [s, tol] = load();
      return cmd_lie(s, tol);
    };
  });

  CommutantArgs cargs;
  auto* com = app.add_subcommand("commutant", "nullity of the doubled-space commutant");
  with_system(com);
  com->add_flag("--force", cargs.force, "allow d > 6");
  com->add_option("--emit-symmetries", cargs.emit_symmetries, "write the commutant basis to this JSON file");
  com->callback([&] {
    action = [&] {
      auto [s, tol] = load();
      return cmd_commutant(s, cargs, tol);
    };
  });

  DistanceArgs dargs;
  auto* dist = app.add_subcommand("distance", "bounds on the distance to uncontrollability");
  with_system(dist);
  dist->add_option("--perturb", dargs.perturb, "drift | control:<k> | all");
  dist->add_option("--methods", dargs.methods, "subset of gap,cut,block,removal");
  dist->callback([&] {
    action = [&] {
      auto [s, tol] = load();
      return cmd_distance(s, dargs, tol);
    };
  });

  QslArgs qargs;
  auto* qsl = app.add_subcommand("qsl", "minimum-time lower bound");
  with_system(qsl);
  qsl->add_option("--cert", qargs.cert, "certificate JSON (otherwise the best estimate is used)");
  qsl->add_option("--perturb", qargs.perturb, "drift | control:<k> | all");
  qsl->callback([&] {
    action = [&] {
      auto [s, tol] = load();
      return cmd_qsl(s, qargs, tol);
    };
  });

  AnalyzeArgs aargs;
  auto* ana = app.add_subcommand("analyze", "full pipeline report");
  with_system(ana);
  ana->add_flag("--skip-commutant", aargs.skip_commutant, "use the Lie closure only");
  ana->add_flag("--force", aargs.force, "run the commutant test beyond the size guard");
  ana->add_option("--perturb", aargs.perturb, "drift | control:<k> | all");
  ana->add_option("--seed", aargs.seed, "recorded in the provenance block");
  ana->callback([&] {
    action = [&] {
      auto [s, tol] = load();
      return cmd_analyze(s, aargs, tol);
    };
  });

  VerifyArgs vargs;
  auto* ver = app.add_subcommand("verify-ineq", "check the perturbation propagation bound on a pulse");
  with_system(ver);
  ver->add_option("--pulse", vargs.pulse, "pulse JSON file")->required();
  ver->add_option("--cert", vargs.cert, "certificate JSON (otherwise the best estimate is used)");
  ver->callback([&] {
    action = [&] {
      auto [s, tol] = load();
      return cmd_verify_ineq(s, vargs, tol);
    };
  });

  auto* rep = app.add_subcommand("reproduce-paper", "reference table for the worked models");
  add_common_flags(rep, tflags, pretty);
  rep->callback([&] {
    table = true;
    action = [&] { return cmd_reproduce(resolve_tolerances(tflags)); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    const CommandResult r = action();
    const std::string text = pretty && table ? render_table(r.report) : render(r.report, pretty);
    if (!out_path.empty()) {
      write_json_file(out_path, r.report);
    } else {
      std::cout << text;
    }
    return r.exit_code;
  } catch (const InputError& e) {
    std::cerr << "qdist: input error: " << e.what() << '\n';
    return kInput;
  } catch (const VerdictError& e) {
    std::cerr << "qdist: " << e.what() << '\n';
    return kVerdict;
  } catch (const GuardError& e) {
    std::cerr << "qdist: size guard: " << e.what() << '\n';
    return kGuard;
  } catch (const Json::exception& e) {
    std::cerr << "qdist: input error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "qdist: numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
}
