// Command-line front end: validate, solve, oracle, gap, localsearch,
// export-milp, gen, ldd, bench.
//
// Exit codes: 0 success, 1 domain error, 2 I/O error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hetsched/hetsched.hpp"

namespace fs = std::filesystem;
using namespace hetsched;

namespace {

// Reported values are rounded to 12 significant digits so that float noise
// (0.7999999999999998) does not leak into output.
double round12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::string format12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) std::cout << text;
  else write_text(out_path, text);
}

void emit_json(const Json& j, const std::string& out_path) { emit(j.dump(2) + "\n", out_path); }

Json schedule_output(const Instance& inst, const Schedule& x) {
  const auto verdict = check_schedule(inst, x);
  if (!verdict.feasible())
    throw DomainError(ErrorKind::InfeasibleSchedule, "produced schedule is infeasible: " + verdict.violations.front().detail);
  Json j = schedule_to_json(inst, x);
  j["makespan"] = round12(makespan(inst, x));
  return j;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw DomainError(ErrorKind::ParameterRange, "bad seed '" + item + "'");
    }
  }
  return out;
}

Profile resolve_profile(const std::string& name) {
  if (name == "tpch") return tpch_profile();
  if (name == "compgraph") return computation_graph_profile();
  return profile_from_json(load_json(name));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous DAG scheduling toolkit"};
  app.require_subcommand(1);

  std::string instance_path, out_path;

  auto* validate = app.add_subcommand("validate", "Check an instance against its invariants");
  validate->add_option("instance", instance_path, "Instance JSON")->required();

  std::string method, order_path, scores_path, mode = "greedy";
  std::uint64_t seed = 0;
  auto* solve = app.add_subcommand("solve", "Build a schedule with one method");
  solve->add_option("instance", instance_path, "Instance JSON")->required();
  solve->add_option("--method", method,
                    "list:<sft|mopnr|cp|tetris>:<eft|tetris|balance>, sft|mopnr|cp|tetris, heft, peft, ippts, sgs, skip")
      ->required();
  solve->add_option("--order", order_path, "ScheduleOrder JSON (sgs)");
  solve->add_option("--scores", scores_path, "ScoreTable JSON (skip)");
  solve->add_option("--mode", mode, "greedy or sample (skip)")->check(CLI::IsMember({"greedy", "sample"}));
  solve->add_option("--seed", seed, "Sampling seed (skip)");
  solve->add_option("--out", out_path, "Write schedule here instead of stdout");

  std::size_t max_tasks = 8;
  auto* oracle = app.add_subcommand("oracle", "Brute-force optimum over all feasible orders");
  oracle->add_option("instance", instance_path, "Instance JSON")->required();
  oracle->add_option("--max-tasks", max_tasks, "Enumeration cap");
  oracle->add_option("--out", out_path, "Write schedule here instead of stdout");

  std::string map_name = "list";
  auto* gap = app.add_subcommand("gap", "Optimality gap of a generation map");
  gap->add_option("instance", instance_path, "Instance JSON")->required();
  gap->add_option("--map", map_name, "list, sgs or skip")->check(CLI::IsMember({"list", "sgs", "skip"}));
  gap->add_option("--max-tasks", max_tasks, "Enumeration cap");

  std::string init_path;
  std::size_t steps = 20;
  auto* ls = app.add_subcommand("localsearch", "Insertion local search evaluated with SGS");
  ls->add_option("instance", instance_path, "Instance JSON")->required();
  ls->add_option("--init", init_path, "Initial schedule JSON (default: best CP list schedule)");
  ls->add_option("--steps", steps, "Maximum number of moves");
  ls->add_option("--out", out_path, "Write schedule here instead of stdout");

  std::string milp_mode = "het";
  double eps = 1e-6;
  auto* milp = app.add_subcommand("export-milp", "Write the MILP model in LP format");
  milp->add_option("instance", instance_path, "Instance JSON")->required();
  milp->add_option("--mode", milp_mode, "hom or het")->check(CLI::IsMember({"hom", "het"}));
  milp->add_option("--eps", eps, "Margin used for strict inequalities")->check(CLI::PositiveNumber);
  milp->add_option("--out", out_path, "Write LP here instead of stdout");

  std::string kind = "er", profile_name = "tpch";
  std::size_t n = 50;
  double p = 0.05, p_in = 0.3, p_out = 0.005, sigma_n = 0.75, rho_e = 0.2, rho_s = 0.14;
  std::size_t blocks = 4;
  auto* gen = app.add_subcommand("gen", "Generate a random heterogeneous instance");
  gen->add_option("--kind", kind, "er, sbm or layered")->check(CLI::IsMember({"er", "sbm", "layered"}));
  gen->add_option("--n", n, "Number of tasks");
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--profile", profile_name, "tpch, compgraph or a profile JSON path");
  gen->add_option("--p", p, "Edge probability (er)");
  gen->add_option("--p-in", p_in, "Within-block edge probability (sbm)");
  gen->add_option("--p-out", p_out, "Between-block edge probability (sbm)");
  gen->add_option("--blocks", blocks, "Number of blocks (sbm)");
  gen->add_option("--sigma-n", sigma_n, "Layer size variation (layered)");
  gen->add_option("--rho-e", rho_e, "Adjacent-layer edge density (layered)");
  gen->add_option("--rho-s", rho_s, "Skip-layer edge density (layered)");
  gen->add_option("--out", out_path, "Write instance here instead of stdout");

  int dmax = 500;
  std::string format = "json";
  auto* ldd = app.add_subcommand("ldd", "Folded longest-directed-distance matrix");
  ldd->add_option("instance", instance_path, "Instance JSON")->required();
  ldd->add_option("--dmax", dmax, "Folding bound");
  ldd->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  ldd->add_option("--out", out_path, "Write matrix here instead of stdout");

  std::string instances_dir, methods_text = "sft,mopnr,cp,tetris,heft,peft,ippts", seeds_text = "0", csv_path;
  std::size_t samples = 64;
  bool timing = false;
  auto* bench = app.add_subcommand("bench", "Run methods over a directory of instances");
  bench->add_option("--instances", instances_dir, "Directory of instance JSON files")->required();
  bench->add_option("--methods", methods_text, "Comma-separated method names");
  bench->add_option("--samples", samples, "Rollouts per seed for skip-sample");
  bench->add_option("--seeds", seeds_text, "Comma-separated seeds for skip-sample");
  bench->add_option("--steps", steps, "Moves for local-search");
  bench->add_option("--max-tasks", max_tasks, "Enumeration cap for sgs-oracle");
  bench->add_option("--out", out_path, "Write report JSON here instead of stdout");
  bench->add_option("--csv", csv_path, "Also write a CSV table");
  bench->add_flag("--timing", timing, "Include wall time per method (output no longer byte-stable)");

  CLI11_PARSE(app, argc, argv);

  try {
    const EnumerationLimits limits{max_tasks, std::max<std::size_t>(40, max_tasks * 5)};

    if (*validate) {
      const auto inst = load_instance(instance_path);
      const auto report = validate_instance(inst);
      if (report.ok()) {
        std::cout << "ok\n";
        return 0;
      }
      for (const auto& issue : report.issues) std::cout << issue << "\n";
      return 1;
    }

    if (*solve) {
      const auto inst = load_instance(instance_path);
      if (!validate_instance(inst).ok()) throw DomainError(ErrorKind::InvalidInstance, "instance is invalid; run validate");
      Schedule x;
      if (auto list = parse_list_method(method)) {
        x = run_list_heuristic(inst, list->first, list->second);
      } else if (auto pr = parse_priority_rule(method)) {
        x = best_list_heuristic(inst, *pr);
      } else if (auto iv = parse_insertion_variant(method)) {
        x = run_insertion_heuristic(inst, *iv);
      } else if (method == "sgs") {
        if (order_path.empty()) throw DomainError(ErrorKind::InfeasibleOrder, "sgs needs --order");
        x = sgs(inst, order_from_json(inst, load_json(order_path)));
      } else if (method == "skip") {
        const ScoreTable table =
            scores_path.empty() ? default_scores(inst) : score_table_from_json(inst, load_json(scores_path));
        const PolicyConfig cfg{mode == "sample" ? PolicyMode::Sampling : PolicyMode::Greedy, seed};
        x = rollout_skip_extended(inst, table, cfg).first;
      } else {
        throw DomainError(ErrorKind::UnknownMethod, "unknown method '" + method + "'");
      }
      emit_json(schedule_output(inst, x), out_path);
      return 0;
    }

    if (*oracle) {
      const auto inst = load_instance(instance_path);
      if (!validate_instance(inst).ok()) throw DomainError(ErrorKind::InvalidInstance, "instance is invalid; run validate");
      const auto best = brute_force_optimum(inst, limits);
      emit_json(schedule_output(inst, best.schedule), out_path);
      return 0;
    }

    if (*gap) {
      const auto inst = load_instance(instance_path);
      if (!validate_instance(inst).ok()) throw DomainError(ErrorKind::InvalidInstance, "instance is invalid; run validate");
      const GapMap map = map_name == "list" ? GapMap::List : map_name == "sgs" ? GapMap::SGS : GapMap::SkipExtended;
      std::cout << format12(optimality_gap(inst, map, limits)) << "\n";
      return 0;
    }

    if (*ls) {
      const auto inst = load_instance(instance_path);
      if (!validate_instance(inst).ok()) throw DomainError(ErrorKind::InvalidInstance, "instance is invalid; run validate");
      const Schedule x0 = init_path.empty() ? best_list_heuristic(inst, PriorityRule::CP) : load_schedule(inst, init_path);
      emit_json(schedule_output(inst, local_search(inst, x0, steps).schedule), out_path);
      return 0;
    }

    if (*milp) {
      const auto inst = load_instance(instance_path);
      emit(export_milp(inst, milp_mode == "hom" ? MilpMode::Homogeneous : MilpMode::Heterogeneous, eps), out_path);
      return 0;
    }

    if (*gen) {
      DagKind dag_kind;
      if (kind == "er") dag_kind = ErdosRenyiParams{p};
      else if (kind == "sbm") dag_kind = StochasticBlockParams{p_in, p_out, blocks};
      else dag_kind = LayeredParams{sigma_n, rho_e, rho_s};
      const auto profile = resolve_profile(profile_name);
      // Independent streams for structure, durations and features.
      const auto edges = gen_dag(dag_kind, n, seed);
      const auto durations = gen_durations_gmm(n, sample_seed(seed, 1));
      const auto inst = augment_heterogeneous(edges, durations, profile, sample_seed(seed, 2));
      emit_json(instance_to_json(inst), out_path);
      return 0;
    }

    if (*ldd) {
      const auto inst = load_instance(instance_path);
      const auto m = ldd_matrix(inst, dmax);
      if (format == "json") {
        emit(Json(m).dump() + "\n", out_path);
      } else {
        std::string text;
        for (const auto& row : m) {
          for (std::size_t k = 0; k < row.size(); ++k) text += (k ? "," : "") + std::to_string(row[k]);
          text += "\n";
        }
        emit(text, out_path);
      }
      return 0;
    }

    if (*bench) {
      if (!fs::is_directory(instances_dir)) throw IoError("not a directory: " + instances_dir);
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(instances_dir)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && entry.path().extension() == ".json" &&
            name.find(".scores.json") == std::string::npos)
          files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      std::vector<NamedInstance> items;
      for (const auto& f : files) {
        NamedInstance item{f.stem().string(), load_instance(f.string()), std::nullopt};
        if (!validate_instance(item.instance).ok())
          throw DomainError(ErrorKind::InvalidInstance, "instance " + f.string() + " is invalid");
        const auto scores = f.parent_path() / (f.stem().string() + ".scores.json");
        if (fs::exists(scores)) item.scores = score_table_from_json(item.instance, load_json(scores.string()));
        items.push_back(std::move(item));
      }
      std::vector<std::string> methods;
      std::stringstream ss(methods_text);
      for (std::string m; std::getline(ss, m, ',');)
        if (!m.empty()) methods.push_back(m);
      BenchOptions opt;
      opt.samples = samples;
      opt.seeds = parse_seeds(seeds_text);
      opt.local_search_steps = steps;
      opt.timing = timing;
      opt.limits = limits;
      const auto report = run_benchmark(items, methods, opt);
      emit_json(report_to_json(report), out_path);
      if (!csv_path.empty()) write_text(csv_path, report_to_csv(report));
      return 0;
    }
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
