#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "segpost/decode.hpp"
#include "segpost/emissions.hpp"
#include "segpost/engine.hpp"
#include "segpost/errors.hpp"
#include "segpost/io.hpp"
#include "segpost/model_select.hpp"
#include "segpost/prior.hpp"
#include "segpost/rng.hpp"
#include "segpost/sampler.hpp"
#include "segpost/simulate.hpp"

namespace segpost::cli {

namespace {

struct ModelInputs {
  std::vector<std::string> data;
  std::string seg;
  std::string family = "gaussian-homoscedastic";
  std::string logdens;
  bool logdens_header = false;
  std::string prior;
  bool prior_header = false;
  double eta = 0.5;
  unsigned jobs = 1;
};

struct Problem {
  std::optional<ObservationSequence> data;
  EmissionModel model;
  LogDensityTable table;
  std::optional<TransitionPrior> prior;
  std::vector<std::size_t> reference;
};

void add_model_options(CLI::App& cmd, ModelInputs& in, bool batch) {
  auto* data = cmd.add_option("--data", in.data, "Observation file(s): one value per line, optional label column");
  if (!batch) data->expected(1);
  cmd.add_option("--seg", in.seg, "Initial change-points, 1-based last index of each segment: 68,96");
  cmd.add_option("--family", in.family,
                 "gaussian-homoscedastic | gaussian-heteroscedastic | poisson");
  cmd.add_option("--logdens", in.logdens, "n x K tab-separated table of log-densities to use instead of a family");
  cmd.add_flag("--logdens-header", in.logdens_header, "The --logdens file starts with a header row");
  cmd.add_option("--prior", in.prior, "K x n tab-separated table of jump probabilities");
  cmd.add_flag("--prior-header", in.prior_header, "The --prior file starts with a header row");
  cmd.add_option("--eta", in.eta, "Homogeneous jump probability (uniform prior)");
  if (batch) cmd.add_option("--jobs", in.jobs, "Worker threads for multi-file batches")->check(CLI::PositiveNumber);
}

Problem resolve(const ModelInputs& in, const std::string* data_path) {
  Problem p;
  if (data_path) p.data = io::read_observations(*data_path);
  const auto seg = io::parse_index_list(in.seg);

  if (!in.logdens.empty()) {
    p.table = LogDensityTable(io::read_grid(in.logdens, in.logdens_header));
    if (p.data && p.data->size() != p.table.length()) {
      throw InputError("--logdens has " + std::to_string(p.table.length()) + " rows but --data has " +
                       std::to_string(p.data->size()) + " observations");
    }
    if (!seg.empty()) {
      if (seg.size() + 1 != p.table.segments()) {
        throw InputError("--seg lists " + std::to_string(seg.size()) + " change-points but --logdens has " +
                         std::to_string(p.table.segments()) + " columns");
      }
      p.reference = ChangePoints(seg, p.table.length()).positions();
    }
    p.model = EmissionModel::external(p.table);
  } else {
    if (!p.data) throw InputError("--data is required unless --logdens is given");
    if (in.seg.empty()) throw InputError("--seg is required to fit segment parameters");
    const ChangePoints cps(seg, p.data->size());
    // With K = n the only segmentation is forced and the posterior does not
    // depend on the fitted parameters, so a zero scale is harmless there.
    const auto policy = cps.segments() == cps.length() ? DegeneracyPolicy::Floor : DegeneracyPolicy::Throw;
    p.model = fit_mle(*p.data, cps, parse_family(in.family), policy);
    p.table = log_density_table(*p.data, p.model);
    p.reference = cps.positions();
  }

  const std::size_t n = p.table.length();
  const std::size_t K = p.table.segments();
  if (!in.prior.empty()) {
    auto prior = TransitionPrior::tabulated(io::read_grid(in.prior, in.prior_header));
    if (prior.segments() != K || prior.length() != n) {
      throw InputError("--prior is " + std::to_string(prior.segments()) + "x" + std::to_string(prior.length()) +
                       " but the model needs " + std::to_string(K) + "x" + std::to_string(n));
    }
    p.prior = std::move(prior);
  } else {
    p.prior = TransitionPrior::homogeneous(K, n, in.eta);
  }
  return p;
}

// Runs `task` for every input in parallel and returns outputs in input order.
// The first failure (by input order) is rethrown after all workers finish.
std::vector<std::string> run_batch(const std::vector<std::string>& inputs, unsigned jobs,
                                   const std::function<std::string(const std::string&)>& task) {
  std::vector<std::string> outputs(inputs.size());
  std::vector<std::exception_ptr> errors(inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < inputs.size(); j = next++) {
      try {
        outputs[j] = task(inputs[j]);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  const unsigned count = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(inputs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return outputs;
}

std::vector<std::string> data_or_none(const ModelInputs& in) {
  return in.data.empty() ? std::vector<std::string>{""} : in.data;
}

const std::string* path_or_null(const std::string& s) { return s.empty() ? nullptr : &s; }

int cmd_posterior(const ModelInputs& in, const std::string& ci, const std::string& tracks, bool with_viterbi,
                  std::ostream& out) {
  const auto levels = io::parse_number_list(ci);
  const auto inputs = data_or_none(in);
  if (!tracks.empty() && inputs.size() > 1) throw InputError("--tracks needs a single --data file");
  const auto results = run_batch(inputs, in.jobs, [&](const std::string& path) {
    const auto p = resolve(in, path_or_null(path));
    const auto report = build_report(p.table, *p.prior, p.model, levels, p.reference);
    auto j = io::to_json(report, p.model);
    if (with_viterbi) j["viterbi"] = io::to_json(viterbi(p.table, *p.prior));
    if (inputs.size() > 1) j["source"] = path;
    if (!tracks.empty()) {
      std::ofstream f(tracks);
      if (!f) throw InputError("cannot write --tracks file '" + tracks + "'");
      io::write_tracks(f, report, p.data ? &*p.data : nullptr);
    }
    return j.dump(2);
  });
  if (results.size() == 1) {
    out << results.front() << '\n';
  } else {
    out << "[\n";
    for (std::size_t j = 0; j < results.size(); ++j) out << results[j] << (j + 1 < results.size() ? ",\n" : "\n");
    out << "]\n";
  }
  return kOk;
}

int cmd_viterbi(const ModelInputs& in, std::ostream& out) {
  const auto inputs = data_or_none(in);
  const auto results = run_batch(inputs, in.jobs, [&](const std::string& path) {
    const auto p = resolve(in, path_or_null(path));
    auto j = io::to_json(viterbi(p.table, *p.prior));
    if (inputs.size() > 1) j["source"] = path;
    return j.dump();
  });
  for (const auto& r : results) out << r << '\n';
  return kOk;
}

int cmd_sample(const ModelInputs& in, std::size_t count, std::uint64_t seed, const std::string& bootstrap,
               std::ostream& out) {
  const auto p = resolve(in, in.data.empty() ? nullptr : &in.data.front());
  const auto state = forward_backward(p.table, *p.prior);
  const auto samples = sample_segmentations(state, p.table, *p.prior, count, seed);
  io::write_samples(out, samples);
  if (!bootstrap.empty()) {
    std::ofstream f(bootstrap);
    if (!f) throw InputError("cannot write --bootstrap file '" + bootstrap + "'");
    const CounterRng streams(seed ^ 0xb0075742aULL);
    std::vector<ObservationSequence> draws;
    for (std::size_t s = 0; s < samples.size(); ++s) {
      draws.push_back(parametric_bootstrap(samples[s], p.model, p.table.length(), streams.split(s)()));
    }
    for (std::size_t i = 0; i < p.table.length(); ++i) {
      for (std::size_t s = 0; s < draws.size(); ++s) f << (s ? "\t" : "") << io::format_number(draws[s][i]);
      f << '\n';
    }
  }
  return kOk;
}

int cmd_select(const ModelInputs& in, std::size_t kmax, std::ostream& out) {
  if (in.data.empty()) throw InputError("--data is required");
  const auto results = run_batch(in.data, in.jobs, [&](const std::string& path) {
    const auto data = io::read_observations(path);
    const auto sel = select_segments(data, std::min(kmax, data.size()), parse_family(in.family));
    std::ostringstream os;
    if (in.data.size() > 1) os << "# source: " << path << '\n';
    io::write_scores(os, sel.scores);
    os << "# selected K: " << sel.segments << '\n';
    os << "# changepoints:";
    for (std::size_t j = 0; j < sel.changepoints.positions().size(); ++j) {
      os << (j ? "," : " ") << sel.changepoints.positions()[j];
    }
    os << '\n';
    return os.str();
  });
  for (const auto& r : results) out << r;
  return kOk;
}

std::vector<double> default_theta1(Family family) {
  if (family == Family::Poisson) return {2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  return {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5};
}

int cmd_simulate(const std::string& family_name, const std::string& theta1_text, std::size_t replicates,
                 std::uint64_t seed, const std::string& size_name, std::size_t kmax, unsigned jobs,
                 std::ostream& out) {
  const Family family = parse_family(family_name);
  if (family != Family::GaussianHomoscedastic && family != Family::Poisson) {
    throw InputError("--family must be gaussian-homoscedastic or poisson for simulations");
  }
  if (size_name != "standard" && size_name != "large") throw InputError("--size must be standard or large");
  const DesignSize size = size_name == "large" ? DesignSize::Large : DesignSize::Standard;
  const auto thetas = theta1_text.empty() ? default_theta1(family) : io::parse_number_list(theta1_text);
  const bool gaussian = family == Family::GaussianHomoscedastic;

  std::vector<std::string> keys;
  for (std::size_t j = 0; j < thetas.size(); ++j) keys.push_back(std::to_string(j));
  const auto rows = run_batch(keys, jobs, [&](const std::string& key) {
    const double theta1 = thetas[std::stoul(key)];
    std::ostringstream os;
    os << io::format_number(gaussian ? 0.0 : 1.0) << '\t' << io::format_number(theta1) << '\t'
       << (gaussian ? "MSE" : "MAE(mean)");
    for (Pipeline pipe : {Pipeline::GreedyBic, Pipeline::Truth}) {
      const auto r = run_replicates(size, family, theta1, pipe, replicates, seed, kmax);
      os << '\t' << io::format_number(gaussian ? r.mse : r.mae);
      if (pipe == Pipeline::GreedyBic) os << '\t' << io::format_number(r.correct_segments_fraction);
    }
    os << '\n';
    return os.str();
  });
  out << "theta0\ttheta1\tmetric\t" << to_string(Pipeline::GreedyBic) << "\tcorrect_K_fraction\t"
      << to_string(Pipeline::Truth) << '\n';
  for (const auto& r : rows) out << r;
  return kOk;
}

int cmd_bench(std::size_t n, std::size_t K, std::size_t reps, std::uint64_t seed, std::ostream& out) {
  if (K < 1 || K > n) throw InputError("bench needs 1 <= K <= n");
  if (reps < 1) throw InputError("--reps must be at least 1");
  std::vector<std::size_t> cps;
  for (std::size_t k = 1; k < K; ++k) cps.push_back(k * n / K);
  const ChangePoints truth(cps, n);
  std::vector<double> means(K);
  for (std::size_t k = 0; k < K; ++k) means[k] = k % 2 ? 1.0 : 0.0;
  const auto model = EmissionModel::gaussian_homoscedastic(means, 1.0);
  const auto data = parametric_bootstrap(truth, model, n, seed);
  const auto fitted = fit_mle(data, truth, Family::GaussianHomoscedastic);
  const auto table = log_density_table(data, fitted);
  const auto prior = TransitionPrior::homogeneous(K, n);

  std::vector<double> times;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto state = forward_backward(table, prior);
    const auto post = state_posterior(state);
    const auto mean = posterior_mean_track(post, fitted.locations());
    for (std::size_t rank = 1; rank < K; ++rank) (void)changepoint_marginal(state, table, prior, rank);
    const auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  std::sort(times.begin(), times.end());
  out << "n\tK\treps\tmin_seconds\tmedian_seconds\n"
      << n << '\t' << K << '\t' << reps << '\t' << io::format_number(times.front()) << '\t'
      << io::format_number(times[times.size() / 2]) << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact change-point posteriors under a constrained hidden Markov model", "segpost"};
  app.require_subcommand(1);

  ModelInputs post_in;
  std::string ci = "0.95";
  std::string tracks;
  bool with_viterbi = false;
  auto* posterior = app.add_subcommand("posterior", "Change-point posteriors, confidence intervals and tracks");
  add_model_options(*posterior, post_in, true);
  posterior->add_option("--ci", ci, "Confidence levels, comma-separated");
  posterior->add_option("--tracks", tracks, "Write per-position posterior tracks (TSV) to this file");
  posterior->add_flag("--viterbi", with_viterbi, "Include the MAP segmentation in the report");

  ModelInputs vit_in;
  auto* vit = app.add_subcommand("viterbi", "MAP change-points as JSON");
  add_model_options(*vit, vit_in, true);

  ModelInputs sample_in;
  std::size_t nsamples = 100;
  std::uint64_t sample_seed = 1;
  std::string bootstrap;
  auto* sample = app.add_subcommand("sample", "Exact joint samples of change-point sets (CSV)");
  add_model_options(*sample, sample_in, false);
  sample->add_option("--nsamples", nsamples, "Number of samples");
  sample->add_option("--seed", sample_seed, "Random seed");
  sample->add_option("--bootstrap", bootstrap, "Also write one bootstrap sequence per sample (TSV columns)");

  ModelInputs select_in;
  std::size_t kmax = 20;
  auto* select = app.add_subcommand("select", "BIC score table over K = 1..kmax (TSV)");
  select->add_option("--data", select_in.data, "Observation file(s)")->required();
  select->add_option("--family", select_in.family, "gaussian-homoscedastic | gaussian-heteroscedastic | poisson");
  select->add_option("--kmax", kmax, "Largest number of segments")->check(CLI::PositiveNumber);
  select->add_option("--jobs", select_in.jobs, "Worker threads for multi-file batches")->check(CLI::PositiveNumber);

  std::string sim_family = "gaussian-homoscedastic";
  std::string sim_theta1;
  std::size_t sim_replicates = 200;
  std::uint64_t sim_seed = 1;
  std::string sim_size = "standard";
  std::size_t sim_kmax = 20;
  unsigned sim_jobs = 1;
  auto* simulate = app.add_subcommand("simulate", "Loss table of posterior means on alternating-mean designs");
  simulate->add_option("--family", sim_family, "gaussian-homoscedastic | poisson");
  simulate->add_option("--theta1", sim_theta1, "Even-segment means, comma-separated");
  simulate->add_option("--replicates", sim_replicates, "Replicates per row");
  simulate->add_option("--seed", sim_seed, "Random seed");
  simulate->add_option("--size", sim_size, "standard (n=500) | large (n=10000)");
  simulate->add_option("--kmax", sim_kmax, "Largest K considered by BIC");
  simulate->add_option("--jobs", sim_jobs, "Worker threads over rows")->check(CLI::PositiveNumber);

  std::size_t bench_n = 14241;
  std::size_t bench_k = 11;
  std::size_t bench_reps = 5;
  std::uint64_t bench_seed = 1;
  auto* bench = app.add_subcommand("bench", "Time forward-backward and all posteriors on synthetic data");
  bench->add_option("--n", bench_n, "Sequence length");
  bench->add_option("--k", bench_k, "Number of segments");
  bench->add_option("--reps", bench_reps, "Repetitions (minimum and median reported)");
  bench->add_option("--seed", bench_seed, "Random seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (posterior->parsed()) return cmd_posterior(post_in, ci, tracks, with_viterbi, out);
    if (vit->parsed()) return cmd_viterbi(vit_in, out);
    if (sample->parsed()) return cmd_sample(sample_in, nsamples, sample_seed, bootstrap, out);
    if (select->parsed()) return cmd_select(select_in, kmax, out);
    if (simulate->parsed()) {
      return cmd_simulate(sim_family, sim_theta1, sim_replicates, sim_seed, sim_size, sim_kmax, sim_jobs, out);
    }
    if (bench->parsed()) return cmd_bench(bench_n, bench_k, bench_reps, bench_seed, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const DegenerateError& e) {
    err << "numerical degeneracy: " << e.what() << '\n';
    return kDegenerate;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInputError;
}

}  // namespace segpost::cli
