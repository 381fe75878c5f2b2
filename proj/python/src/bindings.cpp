#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "acqbench/acquisition.hpp"
#include "acqbench/aggregation.hpp"
#include "acqbench/config.hpp"
#include "acqbench/evaluation.hpp"
#include "acqbench/simulator.hpp"

namespace py = pybind11;
using namespace acqbench;

namespace {

// (K, n, C) float array -> tensor of K pass matrices.
ProbabilityTensor to_tensor(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 3) throw py::value_error("expected an array of shape (passes, samples, classes)");
  const auto r = a.unchecked<3>();
  std::vector<Matrix> passes;
  for (py::ssize_t k = 0; k < r.shape(0); ++k) {
    Matrix m(r.shape(1), r.shape(2));
    for (py::ssize_t i = 0; i < r.shape(1); ++i)
      for (py::ssize_t c = 0; c < r.shape(2); ++c) m(i, c) = r(k, i, c);
    passes.push_back(std::move(m));
  }
  return ProbabilityTensor(std::move(passes));
}

using Scorer = ScoreVector (*)(const ProbabilityTensor&);

template <Scorer F>
ScoreVector score(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  return F(to_tensor(a));
}

py::dict run_to_dict(const RunRecord& r) {
  py::list rounds;
  for (const auto& e : r.rounds) {
    py::dict d;
    d["round"] = e.round;
    d["n_labeled"] = e.n_labeled;
    d["test_accuracy"] = e.test_accuracy;
    d["strategy_tag"] = e.strategy_tag;
    d["selected"] = e.selected;
    rounds.append(d);
  }
  py::dict out;
  out["strategy"] = r.strategy;
  out["seed"] = r.seed;
  out["rounds"] = rounds;
  out["labeled"] = r.labeled;
  return out;
}

eval::AccuracyTable to_table(const std::string& name, const std::vector<std::vector<double>>& acc) {
  eval::AccuracyTable t{name, acc};
  t.validate();
  return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Active learning acquisition and aggregation benchmark";

  m.def("entropy_scores", &score<acq::entropy_scores>, py::arg("probs"));
  m.def("least_confident_scores", &score<acq::least_confident_scores>, py::arg("probs"));
  m.def("margin_scores", &score<acq::margin_scores>, py::arg("probs"));
  m.def("mean_std_scores", &score<acq::mean_std_scores>, py::arg("probs"));
  m.def("bald_scores", &score<acq::bald_scores>, py::arg("probs"));

  m.def("select_top_k", &acq::select_top_k, py::arg("scores"), py::arg("budget"));
  m.def("select_power", &acq::select_power, py::arg("scores"), py::arg("budget"), py::arg("power"), py::arg("seed"));
  m.def("select_k_centers", &acq::select_k_centers, py::arg("pool"), py::arg("labeled"), py::arg("budget"));
  m.def("select_facility_location", &acq::select_facility_location, py::arg("pool"), py::arg("budget"));
  m.def("select_disparity_min", &acq::select_disparity_min, py::arg("candidates"), py::arg("budget"),
        py::arg("seed_index") = 0);
  m.def(
      "gradient_embeddings",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& probs, const Matrix& features) {
        return acq::gradient_embeddings(to_tensor(probs), features);
      },
      py::arg("probs"), py::arg("features"));
  m.def("select_kmeanspp", &acq::select_kmeanspp, py::arg("embeddings"), py::arg("budget"), py::arg("seed"));

  m.def("parallel_ranked_select", &agg::parallel_ranked_select, py::arg("first"), py::arg("second"),
        py::arg("budget"));
  m.def(
      "annealing_phase",
      [](std::size_t t, std::size_t initial, std::size_t first_exploit, std::size_t explore, double rate) {
        agg::AnnealingSchedule s{initial, first_exploit, explore, rate};
        s.validate();
        return std::string(agg::phase_name(agg::annealing_phase(s, t)));
      },
      py::arg("t"), py::arg("initial_exploration") = 5, py::arg("first_exploit") = 5, py::arg("explore") = 5,
      py::arg("rate") = 1.5);
  m.def(
      "random_alternate", [](std::uint64_t seed, std::size_t t) {
        return std::string(agg::phase_name(agg::random_alternate(seed, t)));
      },
      py::arg("seed"), py::arg("t"));

  m.def("t_score", [](const std::vector<double>& a, const std::vector<double>& b) { return eval::t_score(a, b); },
        py::arg("a"), py::arg("b"));
  m.def(
      "winning_rate",
      [](const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b, double critical) {
        return eval::winning_rate(to_table("a", a), to_table("b", b), critical);
      },
      py::arg("a"), py::arg("b"), py::arg("critical") = eval::kDefaultCritical);
  m.def(
      "heatmap_csv",
      [](const std::map<std::string, std::vector<std::vector<double>>>& tables, double critical) {
        std::vector<eval::AccuracyTable> ts;
        for (const auto& [name, acc] : tables) ts.push_back(to_table(name, acc));
        return eval::heatmap_csv(eval::heatmap(ts, critical));
      },
      py::arg("tables"), py::arg("critical") = eval::kDefaultCritical);

  // Runs every seed of a JSON experiment config; returns one dict per seed.
  m.def(
      "run",
      [](const std::string& config_json, std::size_t jobs) {
        ConfigFile cfg;
        try {
          cfg = parse_config(nlohmann::json::parse(config_json));
        } catch (const nlohmann::json::exception& e) {
          throw py::value_error(e.what());
        } catch (const ConfigError& e) {
          throw py::value_error(e.what());
        }
        std::vector<RunRecord> runs;
        {
          py::gil_scoped_release nogil;
          runs = sweep(cfg.experiment, cfg.seeds, jobs);
        }
        py::list out;
        for (const auto& r : runs) out.append(run_to_dict(r));
        return out;
      },
      py::arg("config_json"), py::arg("jobs") = 1);

  m.attr("DEFAULT_CRITICAL") = eval::kDefaultCritical;
}
