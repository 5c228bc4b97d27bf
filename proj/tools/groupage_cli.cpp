// Copyright 2026 The groupage Authors
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

// groupage: experiment harness for group updating.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "groupage/groupage.hpp"

namespace ex = groupage::experiments;

namespace {

struct Options {
  std::string n = "120";
  std::string p_list = "0.01,0.1,0.2,0.4";
  double p = 0.1;
  std::int64_t k = 4;
  std::int64_t cycles = 100000;
  std::string seeds = "1";
  std::string out;
};

// Renders into memory first so a failed command never leaves a partial file.
int emit(const Options& opt, const std::function<void(std::ostream&)>& body) {
  std::ostringstream buffer;
  body(buffer);
  if (opt.out.empty()) {
    std::cout << buffer.str();
    return std::cout ? ex::kOk : ex::kIoError;
  }
  std::ofstream file(opt.out, std::ios::binary | std::ios::trunc);
  if (!file) {
    std::cerr << "error: cannot open '" << opt.out << "' for writing\n";
    return ex::kIoError;
  }
  file << buffer.str();
  file.close();
  if (!file) {
    std::cerr << "error: failed writing '" << opt.out << "'\n";
    return ex::kIoError;
  }
  return ex::kOk;
}

std::int64_t single_n(const std::string& text) {
  const auto ns = ex::parse_n_range(text);
  if (ns.size() != 1) throw ex::UsageError("--n takes a single value for this command");
  return ns.front();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group updating: average age, optimal group sizes, and simulation"};
  app.require_subcommand(1);
  Options opt;

  auto* age_vs_k = app.add_subcommand("age-vs-k", "Average age for every divisor k of n");
  age_vs_k->add_option("--n", opt.n, "Number of sources")->capture_default_str();
  age_vs_k->add_option("--p-list", opt.p_list, "p values (a,b,c or start:stop:step)")
      ->capture_default_str();
  age_vs_k->add_option("--out", opt.out, "Output CSV (default: stdout)");

  auto* age_vs_n = app.add_subcommand("age-vs-n", "Minimum average age versus n");
  age_vs_n->add_option("--n", opt.n, "n values (a,b,c or start:stop:step)")
      ->default_val("60:1200:60");
  age_vs_n->add_option("--p-list", opt.p_list, "p values")->capture_default_str();
  age_vs_n->add_option("--out", opt.out, "Output CSV (default: stdout)");

  auto* compare = app.add_subcommand("compare-metrics", "Age and expected updates per k");
  compare->add_option("--n", opt.n, "Number of sources")->default_val("48");
  compare->add_option("--p-list", opt.p_list, "p values")->default_val("0.05,0.15");
  compare->add_option("--out", opt.out, "Output CSV (default: stdout)");

  auto* kstar = app.add_subcommand("kstar-vs-p", "Optimal group sizes under both metrics");
  kstar->add_option("--n", opt.n, "Number of sources")->capture_default_str();
  kstar->add_option("--p-list", opt.p_list, "p values")->default_val("0.01:0.25:0.01");
  kstar->add_option("--out", opt.out, "Output CSV (default: stdout)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo age estimate per seed");
  auto* validate = app.add_subcommand("validate", "Closed form vs oracles vs simulation");
  for (auto* sub : {simulate, validate}) {
    sub->add_option("--n", opt.n, "Number of sources")->capture_default_str();
    sub->add_option("--p", opt.p, "Positive-status probability")->capture_default_str();
    sub->add_option("--k", opt.k, "Group size (must divide n)")->capture_default_str();
    sub->add_option("--cycles", opt.cycles, "Update cycles per seed")->capture_default_str();
    sub->add_option("--seeds", opt.seeds, "Seeds (a,b,c or start:stop:step)")
        ->capture_default_str();
  }
  simulate->add_option("--out", opt.out, "Output CSV (default: stdout)");
  validate->add_option("--out", opt.out, "Report file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ex::kOk : ex::kUsage;
  }

  try {
    if (age_vs_k->parsed()) {
      const auto n = single_n(opt.n);
      const auto ps = ex::parse_p_list(opt.p_list);
      return emit(opt, [&](std::ostream& os) { ex::write_age_vs_k(os, n, ps); });
    }
    if (age_vs_n->parsed()) {
      const auto ns = ex::parse_n_range(opt.n);
      const auto ps = ex::parse_p_list(opt.p_list);
      return emit(opt, [&](std::ostream& os) { ex::write_age_vs_n(os, ns, ps); });
    }
    if (compare->parsed()) {
      const auto n = single_n(opt.n);
      const auto ps = ex::parse_p_list(opt.p_list);
      return emit(opt, [&](std::ostream& os) { ex::write_compare_metrics(os, n, ps); });
    }
    if (kstar->parsed()) {
      const auto n = single_n(opt.n);
      const auto ps = ex::parse_p_list(opt.p_list);
      return emit(opt, [&](std::ostream& os) { ex::write_kstar_vs_p(os, n, ps); });
    }
    const auto config = groupage::validate_config(single_n(opt.n), opt.p, opt.k);
    const auto seeds = ex::parse_seeds(opt.seeds);
    if (simulate->parsed()) {
      return emit(opt, [&](std::ostream& os) { ex::write_simulate(os, config, opt.cycles, seeds); });
    }
    int verdict = ex::kOk;
    const int io = emit(opt, [&](std::ostream& os) {
      verdict = ex::run_validate(os, config, opt.cycles, seeds);
    });
    return io != ex::kOk ? io : verdict;
  } catch (const ex::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return ex::kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return ex::kUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return ex::kUsage;
  }
}
