#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "segpost/decode.hpp"
#include "segpost/emissions.hpp"
#include "segpost/engine.hpp"
#include "segpost/errors.hpp"
#include "segpost/model_select.hpp"
#include "segpost/prior.hpp"
#include "segpost/sampler.hpp"
#include "segpost/simulate.hpp"

namespace py = pybind11;
using namespace segpost;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Grid to_grid(const Array& a) {
  if (a.ndim() != 2) throw InputError("expected a 2-d array");
  Grid g(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < a.shape(0); ++i)
    for (py::ssize_t j = 0; j < a.shape(1); ++j) g(i, j) = r(i, j);
  return g;
}

Array to_array(const Grid& g) {
  Array a({g.rows(), g.cols()});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) w(i, j) = g(i, j);
  return a;
}

Array to_array(const std::vector<double>& v) {
  Array a(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
  auto w = a.mutable_unchecked<1>();
  for (std::size_t i = 0; i < v.size(); ++i) w(i) = v[i];
  return a;
}

ObservationSequence to_sequence(const std::vector<double>& values) { return ObservationSequence(values); }

LogDensityTable to_table(const Array& a) { return LogDensityTable(to_grid(a)); }

py::dict interval_dict(const ConfidenceInterval& ci) {
  py::dict d;
  d["level"] = ci.level;
  d["lower"] = ci.lower;
  d["upper"] = ci.upper;
  d["achieved"] = ci.achieved;
  return d;
}

}  // namespace

PYBIND11_MODULE(_segpost, m) {
  m.doc() = "Exact change-point posteriors under a constrained hidden Markov model";

  static py::exception<InputError> input_error(m, "InputError", PyExc_ValueError);
  static py::exception<DegenerateError> degenerate_error(m, "DegenerateError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InputError& e) {
      input_error(e.what());
    } catch (const DegenerateError& e) {
      degenerate_error(e.what());
    }
  });

  py::class_<EmissionModel>(m, "EmissionModel")
      .def_property_readonly("family", [](const EmissionModel& e) { return std::string(to_string(e.family())); })
      .def_property_readonly("locations", &EmissionModel::locations)
      .def_property_readonly("shared_scale", &EmissionModel::shared_scale)
      .def_property_readonly("scales",
                             [](const EmissionModel& e) {
                               std::vector<double> out;
                               for (const auto& p : e.params())
                                 if (p.scale) out.push_back(*p.scale);
                               return out;
                             })
      .def_property_readonly("degenerate", &EmissionModel::degenerate)
      .def_property_readonly("segments", &EmissionModel::segments);

  py::class_<TransitionPrior>(m, "TransitionPrior")
      .def_property_readonly("segments", &TransitionPrior::segments)
      .def_property_readonly("length", &TransitionPrior::length)
      .def("log_stay", &TransitionPrior::checked_log_stay, py::arg("k"), py::arg("i"))
      .def("log_jump", &TransitionPrior::checked_log_jump, py::arg("k"), py::arg("i"));

  m.def("homogeneous_prior", &TransitionPrior::homogeneous, py::arg("K"), py::arg("n"), py::arg("eta") = 0.5,
        "Uniform prior over K-segmentations of n points.");
  m.def(
      "tabulated_prior", [](const Array& eta) { return TransitionPrior::tabulated(to_grid(eta)); },
      py::arg("eta"), "Prior from a K x n table of jump probabilities (0-based positions, column 0 unused).");

  m.def(
      "fit_mle",
      [](const std::vector<double>& values, std::vector<std::size_t> cps, const std::string& family) {
        const auto data = to_sequence(values);
        return fit_mle(data, ChangePoints(std::move(cps), data.size()), parse_family(family));
      },
      py::arg("values"), py::arg("changepoints"), py::arg("family") = "gaussian-homoscedastic");

  m.def(
      "log_density_table",
      [](const std::vector<double>& values, const EmissionModel& model) {
        return to_array(log_density_table(to_sequence(values), model).grid());
      },
      py::arg("values"), py::arg("model"));

  m.def(
      "forward_backward",
      [](const Array& logdens, const TransitionPrior& prior) {
        const auto state = forward_backward(to_table(logdens), prior);
        py::dict d;
        Grid f(state.length(), state.segments());
        Grid b(state.length(), state.segments());
        for (std::size_t i = 0; i < state.length(); ++i) {
          for (std::size_t k = 0; k < state.segments(); ++k) {
            f(i, k) = state.log_forward(i, k);
            b(i, k) = state.log_backward(i, k);
          }
        }
        d["log_forward"] = to_array(f);
        d["log_backward"] = to_array(b);
        d["log_evidence"] = state.log_evidence;
        d["state_posterior"] = to_array(state_posterior(state));
        return d;
      },
      py::arg("logdens"), py::arg("prior"));

  m.def(
      "changepoint_marginal",
      [](const Array& logdens, const TransitionPrior& prior, std::size_t rank) {
        const auto table = to_table(logdens);
        const auto state = forward_backward(table, prior);
        const auto dist = changepoint_marginal(state, table, prior, rank);
        return py::make_tuple(dist.first, to_array(dist.probs));
      },
      py::arg("logdens"), py::arg("prior"), py::arg("rank"),
      "Returns (first position, probabilities) for the rank-th change-point.");

  m.def(
      "confidence_interval",
      [](std::size_t first, const std::vector<double>& probs, double level) {
        ChangePointDistribution dist{0, first, probs};
        return interval_dict(confidence_interval(dist, level));
      },
      py::arg("first"), py::arg("probs"), py::arg("level"));

  m.def(
      "posterior",
      [](const std::vector<double>& values, std::vector<std::size_t> cps, const std::string& family,
         const std::vector<double>& ci, double eta) {
        const auto data = to_sequence(values);
        const ChangePoints seg(std::move(cps), data.size());
        const auto model = fit_mle(data, seg, parse_family(family));
        const auto table = log_density_table(data, model);
        const auto prior = TransitionPrior::homogeneous(seg.segments(), data.size(), eta);
        const auto report = build_report(table, prior, model, ci, seg.positions());
        py::dict d;
        d["log_evidence"] = report.log_evidence;
        d["state_posterior"] = to_array(report.state_posterior);
        d["posterior_mean"] = to_array(report.posterior_mean);
        py::list cpl;
        for (const auto& s : report.changepoints) {
          py::dict c;
          c["rank"] = s.distribution.rank;
          c["first"] = s.distribution.first;
          c["probs"] = to_array(s.distribution.probs);
          c["mode"] = s.mode;
          c["mode_probability"] = s.mode_probability;
          c["initial"] = s.reference;
          c["probability_at_initial"] = s.reference_probability;
          py::list cis;
          for (const auto& i : s.intervals) cis.append(interval_dict(i));
          c["intervals"] = cis;
          cpl.append(c);
        }
        d["changepoints"] = cpl;
        d["locations"] = model.locations();
        return d;
      },
      py::arg("values"), py::arg("changepoints"), py::arg("family") = "gaussian-homoscedastic",
      py::arg("ci") = std::vector<double>{0.95}, py::arg("eta") = 0.5,
      "Fits the model at the given segmentation and returns the full posterior report.");

  m.def(
      "viterbi",
      [](const Array& logdens, const TransitionPrior& prior) {
        const auto r = viterbi(to_table(logdens), prior);
        return py::make_tuple(r.changepoints.positions(), r.log_posterior);
      },
      py::arg("logdens"), py::arg("prior"));

  m.def(
      "sample_segmentations",
      [](const Array& logdens, const TransitionPrior& prior, std::size_t count, std::uint64_t seed) {
        const auto table = to_table(logdens);
        const auto state = forward_backward(table, prior);
        const auto samples = sample_segmentations(state, table, prior, count, seed);
        const std::size_t width = table.segments() - 1;
        py::array_t<std::int64_t> out({samples.size(), width});
        auto w = out.mutable_unchecked<2>();
        for (std::size_t s = 0; s < samples.size(); ++s)
          for (std::size_t j = 0; j < width; ++j) w(s, j) = static_cast<std::int64_t>(samples[s].positions()[j]);
        return out;
      },
      py::arg("logdens"), py::arg("prior"), py::arg("count"), py::arg("seed") = 1);

  m.def(
      "parametric_bootstrap",
      [](std::vector<std::size_t> cps, const EmissionModel& model, std::size_t n, std::uint64_t seed) {
        const auto seq = parametric_bootstrap(ChangePoints(std::move(cps), n), model, n, seed);
        return to_array(std::vector<double>(seq.values().begin(), seq.values().end()));
      },
      py::arg("changepoints"), py::arg("model"), py::arg("n"), py::arg("seed") = 1);

  m.def(
      "greedy_segment",
      [](const std::vector<double>& values, std::size_t K) {
        return greedy_segment(to_sequence(values), K).positions();
      },
      py::arg("values"), py::arg("K"));

  m.def(
      "refine",
      [](const std::vector<double>& values, std::vector<std::size_t> cps, const std::string& family) {
        const auto data = to_sequence(values);
        const auto r = refine(data, ChangePoints(std::move(cps), data.size()), parse_family(family));
        return py::make_tuple(r.changepoints.positions(), r.iterations);
      },
      py::arg("values"), py::arg("changepoints"), py::arg("family") = "gaussian-homoscedastic");

  m.def(
      "select_segments",
      [](const std::vector<double>& values, std::size_t kmax, const std::string& family) {
        const auto sel = select_segments(to_sequence(values), kmax, parse_family(family));
        py::dict d;
        d["K"] = sel.segments;
        d["changepoints"] = sel.changepoints.positions();
        py::list scores;
        for (const auto& s : sel.scores) {
          py::dict row;
          row["K"] = s.segments;
          row["LL"] = s.log_likelihood;
          row["K_prime"] = s.parameters;
          row["BIC"] = s.bic;
          row["degenerate"] = s.degenerate;
          scores.append(row);
        }
        d["scores"] = scores;
        return d;
      },
      py::arg("values"), py::arg("kmax"), py::arg("family") = "gaussian-homoscedastic");

  m.def(
      "simulate_standard",
      [](const std::string& family, double theta1, std::uint64_t seed) {
        const auto design = standard_design(parse_family(family), theta1, seed);
        const auto sim = generate(design);
        return py::make_tuple(to_array(std::vector<double>(sim.data.values().begin(), sim.data.values().end())),
                              to_array(sim.truth), design.truth.positions());
      },
      py::arg("family"), py::arg("theta1"), py::arg("seed") = 1,
      "Returns (values, true mean track, true change-points) for the n=500 design.");

  m.def(
      "loss",
      [](const std::vector<double>& est, const std::vector<double>& truth, const std::string& metric) {
        if (metric != "mse" && metric != "mae") throw InputError("metric must be 'mse' or 'mae'");
        return loss(est, truth, metric == "mse" ? LossMetric::MeanSquared : LossMetric::MeanAbsolute);
      },
      py::arg("estimate"), py::arg("truth"), py::arg("metric") = "mse");
}
