// trlse: run level set estimation experiments and calibrate thresholds.
//
//   trlse run --problem levy --dim 10 --method trlse,random --reps 5 --out results/levy10
//   trlse calibrate --problem mishra03 --dim 2 --cache thresholds.txt

#include "trlse/trlse.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

struct RunArgs {
  std::string problem = "levy";
  long dim = 10;
  std::string methods = "trlse";
  std::optional<double> fraction;
  std::optional<long> budget;
  std::optional<int> regions;
  std::optional<double> v_init, v_max;
  double beta = trlse::kDefaultBeta;
  std::string kernel = "matern52";
  std::string acq_global = "straddle", acq_local = "straddle";
  std::string s_fn = "sigmoid";
  std::uint64_t seed = 0;
  int reps = 1;
  long test_size = 100'000;
  long eval_every = 0;
  double noise = 0.01;
  long calibration_samples = 1'000'000;
  std::optional<int> candidates;
  std::string out = "results";
  std::optional<std::string> cache;
  bool random_reinit = false, single_gp = false, constant_s = false;
};

trlse::ExperimentSpec to_spec(const RunArgs& a) {
  trlse::ExperimentSpec spec;
  spec.problem.name = a.problem;
  spec.problem.dim = a.dim;
  spec.problem.fraction = a.fraction;
  spec.problem.noise_level = a.noise;
  spec.problem.calibration_samples = a.calibration_samples;
  if (a.cache) spec.problem.cache_path = *a.cache;

  spec.methods.clear();
  for (const auto& m : split_list(a.methods)) spec.methods.push_back(trlse::parse_method(m));

  auto& c = spec.config;
  c = trlse::default_config_for(a.problem, a.dim);
  if (a.budget) c.budget = *a.budget;
  if (a.regions) c.num_regions = *a.regions;
  if (a.v_init) c.v_init = *a.v_init;
  if (a.v_max) c.v_max = *a.v_max;
  if (a.candidates) c.candidate_budget = *a.candidates;
  c.beta = a.beta;
  c.kernel = trlse::parse_kernel_family(a.kernel);
  c.global_acquisition = trlse::parse_acquisition_kind(a.acq_global);
  c.local_acquisition = trlse::parse_acquisition_kind(a.acq_local);
  switch (trlse::parse_s_form(a.s_fn)) {
    case trlse::SFunction::Form::Sigmoid: c.s_function = trlse::SFunction::sigmoid(); break;
    case trlse::SFunction::Form::Linear: c.s_function = trlse::SFunction::linear(); break;
    case trlse::SFunction::Form::Constant: c.s_function = trlse::SFunction::constant(); break;
  }
  c.ablation = {a.random_reinit, a.single_gp, a.constant_s};
  if (a.constant_s) c.s_function = trlse::SFunction::constant();

  spec.base_seed = a.seed;
  spec.repetitions = a.reps;
  spec.test_set_size = a.test_size;
  spec.eval_every = a.eval_every;
  spec.output_dir = a.out;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust-region level set estimation experiments"};
  app.set_config("--config", "", "TOML/INI file setting any flag; the command line wins");
  app.require_subcommand(1);

  RunArgs a;
  auto* run = app.add_subcommand("run", "Run seeded repetitions and write metrics CSVs");
  run->add_option("--problem", a.problem, "levy | ackley | rosenbrock | trid | mishra03")->capture_default_str();
  run->add_option("--dim", a.dim, "Input dimension")->capture_default_str();
  run->add_option("--method", a.methods, "Comma-separated: trlse, random, straddle")->capture_default_str();
  run->add_option("--fraction", a.fraction, "Superlevel fraction used to calibrate h");
  run->add_option("--budget", a.budget, "Evaluation budget");
  run->add_option("--regions", a.regions, "Number of trust regions");
  run->add_option("--v-init", a.v_init, "Initial region volume");
  run->add_option("--v-max", a.v_max, "Maximum region volume");
  run->add_option("--beta", a.beta, "Confidence multiplier")->capture_default_str();
  run->add_option("--kernel", a.kernel, "matern52 | rbf | rq")->capture_default_str();
  run->add_option("--acq-global", a.acq_global, "straddle | thompson")->capture_default_str();
  run->add_option("--acq-local", a.acq_local, "straddle | thompson")->capture_default_str();
  run->add_option("--s-fn", a.s_fn, "sigmoid | linear | constant")->capture_default_str();
  run->add_option("--seed", a.seed, "Base seed; repetition r uses seed + r")->capture_default_str();
  run->add_option("--reps", a.reps, "Repetitions")->capture_default_str();
  run->add_option("--test-size", a.test_size, "Test points per snapshot")->capture_default_str();
  run->add_option("--eval-every", a.eval_every, "Iterations between snapshots (0: by dimension)");
  run->add_option("--noise", a.noise, "Noise std as a multiple of the function spread")->capture_default_str();
  run->add_option("--calibration-samples", a.calibration_samples)->capture_default_str();
  run->add_option("--candidates", a.candidates, "Candidates per box search");
  run->add_option("--out", a.out, "Output directory")->capture_default_str();
  run->add_option("--cache", a.cache, "Threshold cache file (default: <out>/thresholds.txt)");
  run->add_flag("--random-reinit", a.random_reinit, "Re-initialize regions uniformly at random");
  run->add_flag("--single-gp", a.single_gp, "Use the global GP inside every region");
  run->add_flag("--constant-s", a.constant_s, "Keep region volumes constant");

  trlse::ProblemOptions cal;
  std::optional<std::string> cal_cache;
  auto* calibrate = app.add_subcommand("calibrate", "Compute (and cache) the threshold for a problem");
  calibrate->add_option("--problem", cal.name)->capture_default_str();
  calibrate->add_option("--dim", cal.dim)->capture_default_str();
  calibrate->add_option("--fraction", cal.fraction);
  calibrate->add_option("--samples", cal.calibration_samples)->capture_default_str();
  calibrate->add_option("--seed", cal.calibration_seed)->capture_default_str();
  calibrate->add_option("--cache", cal_cache);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) {
      const auto result = trlse::run_experiment(to_spec(a));
      std::cout << "problem=" << result.problem.name << " dim=" << result.problem.dim
                << " threshold=" << trlse::format_double(result.problem.threshold) << '\n';
      for (const auto& r : result.runs) {
        const auto& last = r.rows.back();
        std::cout << trlse::to_string(r.method) << " seed=" << r.seed << " evaluations=" << last.evaluations
                  << " f1=" << trlse::format_double(last.counts.f1()) << '\n';
      }
      std::cout << "summary: " << result.summary_path.string() << '\n';
    } else if (*calibrate) {
      if (cal_cache) cal.cache_path = *cal_cache;
      const auto p = trlse::make_problem(cal);
      std::cout << p.name << ',' << p.dim << ',' << trlse::format_double(p.superlevel_fraction) << ','
                << trlse::format_double(p.threshold) << '\n';
    }
  } catch (const trlse::Error& e) {
    std::cerr << "error (" << trlse::to_string(e.code()) << "): " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
