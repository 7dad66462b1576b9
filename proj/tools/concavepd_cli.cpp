// Command line front end: instance generation, solving, verification,
// benchmarking and trace export for the concave-cost primal-dual solvers.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "concavepd/runner.hpp"

using namespace concavepd;

namespace {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text << "\n";
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CONCAVE_PD_SEED")) return std::strtoull(env, nullptr, 10);
  return 1;
}

struct CommonFlags {
  std::string backend = "rational";
  std::string alg;
  std::string trace_path;
  long long limit = 10'000'000;
};

template <class Fn>
int with_backend(const std::string& backend, Fn&& fn) {
  if (backend == "rational") return fn(Rational{});
  if (backend == "float") return fn(double{});
  std::cerr << "unknown backend: " << backend << "\n";
  return 2;
}

int cmd_generate(const GeneratorSpec& spec, const std::string& backend, const std::string& out) {
  return with_backend(backend, [&](auto num) {
    using Num = decltype(num);
    write_text(out, run_generate<Num>(spec).dump(2));
    return 0;
  });
}

int cmd_solve(const CommonFlags& flags, const std::string& instance_path, const std::string& out) {
  return with_backend(flags.backend, [&](auto num) {
    using Num = decltype(num);
    json instance = read_json_file(instance_path);
    auto summary = run_solve<Num>(flags.alg, instance, !flags.trace_path.empty());
    if (!out.empty()) write_text(out, summary.solution.dump(2));
    if (!flags.trace_path.empty()) write_text(flags.trace_path, summary.solution.at("trace").dump(2));
    std::ostringstream line;
    line << summary.kind << " " << summary.algorithm << " " << summary.primal << " " << summary.dual
         << " " << summary.ratio << " " << summary.time_ms;
    std::cout << line.str() << "\n";
    return summary.certificate_pass ? 0 : 1;
  });
}

int cmd_verify(const std::string& backend, const std::string& instance_path, const std::string& solution_path,
               const std::string& out) {
  return with_backend(backend, [&](auto num) {
    using Num = decltype(num);
    json report = run_verify<Num>(read_json_file(instance_path), read_json_file(solution_path));
    write_text(out, report.dump(2));
    return report.at("pass").get<bool>() ? 0 : 1;
  });
}

int cmd_bench(const std::string& backend, const std::string& kind, const std::string& alg,
              const std::vector<int>& sizes, int seeds, const std::string& out) {
  return with_backend(backend, [&](auto num) {
    using Num = decltype(num);
    std::ostringstream csv;
    csv << "kind,alg,m,n,K,seed,primal,dual,ratio,time_ms\n";
    bool all_pass = true;
    for (int size : sizes) {
      for (int seed = 1; seed <= seeds; ++seed) {
        GeneratorSpec spec;
        spec.kind = kind;
        spec.seed = static_cast<std::uint64_t>(seed);
        spec.K = 2;
        if (kind == "facility_location") {
          spec.m = size;
          spec.n = std::max(1, size / 2);
        } else {
          spec.n = size;
          spec.m = 0;
        }
        if (kind != "facility_location") spec.m = 0;
        json instance = run_generate<Num>(spec);
        auto summary = run_solve<Num>(alg, instance, false);
        all_pass = all_pass && summary.certificate_pass;
        csv << kind << "," << alg << "," << spec.m << "," << spec.n << "," << (kind == "jrp" ? spec.K : 0)
            << "," << seed << "," << summary.primal << "," << summary.dual << "," << summary.ratio << ","
            << summary.time_ms << "\n";
      }
    }
    std::string text = csv.str();
    if (!text.empty() && text.back() == '\n') text.pop_back();
    write_text(out, text);
    return all_pass ? 0 : 1;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"primal-dual solvers for concave-cost facility location, lot-sizing and joint replenishment"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a random instance as JSON");
  GeneratorSpec spec;
  spec.seed = default_seed();
  std::string gen_backend = "rational", gen_out;
  gen->add_option("--kind", spec.kind, "facility_location | lot_sizing | jrp");
  gen->add_option("--m", spec.m, "customers (facility location)");
  gen->add_option("--n", spec.n, "facilities / periods");
  gen->add_option("--K", spec.K, "items (jrp)");
  gen->add_option("--seed", spec.seed, "random seed (env CONCAVE_PD_SEED overrides the default)");
  gen->add_option("--cost-mix", spec.cost_mix, "fixed | affine | pwl | mixed | power");
  gen->add_option("--demand-max", spec.demand_max, "demand upper bound");
  gen->add_option("--backend", gen_backend, "rational | float");
  gen->add_option("--out,-o", gen_out, "output file (stdout by default)");

  // solve / trace
  CommonFlags flags;
  std::string instance_path, solve_out;
  auto* solve = app.add_subcommand("solve", "run a solver on an instance file");
  solve->add_option("--alg", flags.alg, "flpd | concave-flpd | lspd | concave-lspd | jrppd | concave-jrppd")
      ->required();
  solve->add_option("--backend", flags.backend, "rational | float");
  solve->add_option("--trace", flags.trace_path, "write the event trace to this file");
  solve->add_option("--limit", flags.limit, "enumeration limit for oracle-backed commands");
  solve->add_option("--out,-o", solve_out, "write the solution JSON to this file");
  solve->add_option("instance", instance_path, "instance JSON file")->required();

  auto* trace = app.add_subcommand("trace", "solve and export the event trace");
  std::string trace_alg, trace_instance, trace_backend = "rational", trace_out = "-";
  trace->add_option("--alg", trace_alg, "algorithm")->required();
  trace->add_option("--backend", trace_backend, "rational | float");
  trace->add_option("--out,-o", trace_out, "trace output file");
  trace->add_option("instance", trace_instance, "instance JSON file")->required();

  // verify
  auto* verify = app.add_subcommand("verify", "check a solution certificate");
  std::string verify_backend = "rational", verify_instance, verify_solution, verify_out;
  verify->add_option("--backend", verify_backend, "rational | float");
  verify->add_option("--out,-o", verify_out, "report output file (stdout by default)");
  verify->add_option("instance", verify_instance, "instance JSON file")->required();
  verify->add_option("solution", verify_solution, "solution JSON file")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "run a benchmark suite and emit CSV");
  std::string bench_backend = "float", bench_kind = "lot_sizing", bench_alg = "concave-lspd", bench_out;
  std::vector<int> bench_sizes;
  int bench_seeds = 3;
  bench->add_option("--backend", bench_backend, "rational | float");
  bench->add_option("--kind", bench_kind, "instance kind");
  bench->add_option("--alg", bench_alg, "algorithm");
  bench->add_option("--sizes", bench_sizes, "sizes to run")->delimiter(',');
  bench->add_option("--seeds", bench_seeds, "seeds per size");
  bench->add_option("--out,-o", bench_out, "CSV output file (stdout by default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_name() == "CallForHelp" ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      if (spec.kind == "facility_location" && (spec.m <= 0 || spec.n <= 0)) {
        std::cerr << "refusing empty instance (m, n must be >= 1)\n";
        return 2;
      }
      if (spec.kind != "facility_location" && spec.n <= 0) {
        std::cerr << "refusing empty instance (n must be >= 1)\n";
        return 2;
      }
      return cmd_generate(spec, gen_backend, gen_out);
    }
    if (solve->parsed()) return cmd_solve(flags, instance_path, solve_out);
    if (trace->parsed()) {
      CommonFlags tf;
      tf.alg = trace_alg;
      tf.backend = trace_backend;
      tf.trace_path = trace_out;
      return cmd_solve(tf, trace_instance, "");
    }
    if (verify->parsed()) return cmd_verify(verify_backend, verify_instance, verify_solution, verify_out);
    if (bench->parsed()) return cmd_bench(bench_backend, bench_kind, bench_alg, bench_sizes, bench_seeds, bench_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
