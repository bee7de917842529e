// Python bindings for the core operations: dataset construction, training,
// pruning, recall-balance metrics, and the statistical toolkit. The heavy
// experiment driver stays in C++; run_experiment here just wraps the same
// config-file entry point the CLI uses.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "prunelab/analysis.hpp"
#include "prunelab/error.hpp"
#include "prunelab/experiment.hpp"
#include "prunelab/idx.hpp"
#include "prunelab/model_io.hpp"
#include "prunelab/pruning.hpp"
#include "prunelab/report.hpp"
#include "prunelab/synth.hpp"

namespace py = pybind11;
using namespace prunelab;

namespace {

Split parse_split(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "validation" || s == "val") return Split::Validation;
  if (s == "test") return Split::Test;
  throw UsageError("split must be 'train', 'validation', or 'test'");
}

PruneMethod make_method(const std::string& name, double up_epsilon, std::uint64_t rp_seed) {
  const PruneMethodKind kind = PruneMethod::parse_kind(name);
  if (kind == PruneMethodKind::Undecayed) return PruneMethod::undecayed(up_epsilon);
  if (kind == PruneMethodKind::Random) return PruneMethod::random(rp_seed);
  return PruneMethod{kind, 0.0, 0};
}

TrainConfig make_train_config(std::size_t epochs, std::size_t batch_size,
                              const std::vector<std::pair<std::size_t, double>>& schedule,
                              double weight_decay, std::uint64_t seed) {
  TrainConfig tc;
  tc.epochs = epochs;
  tc.batch_size = batch_size;
  tc.schedule = schedule;
  tc.weight_decay = weight_decay;
  tc.seed = seed;
  tc.validate();
  return tc;
}

Batch batch_from_numpy(const py::array_t<double>& x, const py::array_t<int>& y) {
  const auto xb = x.request();
  const auto yb = y.request();
  if (xb.ndim != 2) throw UsageError("x must be a 2-d array (samples x features)");
  if (yb.ndim != 1 || yb.shape[0] != xb.shape[0])
    throw UsageError("y must be a 1-d array matching x rows");
  Batch b;
  b.count = static_cast<std::size_t>(xb.shape[0]);
  b.dim = static_cast<std::size_t>(xb.shape[1]);
  const auto xx = x.unchecked<2>();
  const auto yy = y.unchecked<1>();
  b.x.resize(b.count * b.dim);
  b.y.resize(b.count);
  for (std::size_t i = 0; i < b.count; ++i) {
    for (std::size_t j = 0; j < b.dim; ++j)
      b.x[i * b.dim + j] = xx(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j));
    b.y[i] = yy(static_cast<py::ssize_t>(i));
  }
  return b;
}

ConfusionMatrix cm_from_numpy(const py::array_t<std::uint64_t>& counts) {
  const auto b = counts.request();
  if (b.ndim != 2 || b.shape[0] != b.shape[1])
    throw UsageError("confusion matrix must be square");
  ConfusionMatrix cm(static_cast<std::size_t>(b.shape[0]));
  const auto v = counts.unchecked<2>();
  for (py::ssize_t i = 0; i < b.shape[0]; ++i)
    for (py::ssize_t j = 0; j < b.shape[1]; ++j)
      cm.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v(i, j);
  return cm;
}

py::array_t<std::uint64_t> cm_to_numpy(const ConfusionMatrix& cm) {
  py::array_t<std::uint64_t> out({cm.classes, cm.classes});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < cm.classes; ++i)
    for (std::size_t j = 0; j < cm.classes; ++j)
      v(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) = cm.at(i, j);
  return out;
}

py::array_t<double> vec_to_numpy(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_prunelab, m) {
  m.doc() = "recall distortion under neural network pruning: core operations";

  py::register_exception<Error>(m, "PrunelabError");

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("name", &Dataset::name)
      .def_readonly("num_classes", &Dataset::num_classes)
      .def_readonly("input_shape", &Dataset::input_shape)
      .def_readonly("balanced_test", &Dataset::balanced_test)
      .def_property_readonly("train_size", [](const Dataset& d) { return d.train_idx.size(); })
      .def_property_readonly("val_size", [](const Dataset& d) { return d.val_idx.size(); })
      .def_property_readonly("test_size", [](const Dataset& d) { return d.test_idx.size(); })
      .def("carve_validation", &Dataset::carve_validation, py::arg("fraction"), py::arg("seed"))
      .def("force_balance_test", &Dataset::force_balance_test)
      .def("split_features_labels", [](const Dataset& d, const std::string& split) {
        const Batch b = make_batch(d, d.split_indices(parse_split(split)));
        py::array_t<double> x({b.count, b.dim});
        std::copy(b.x.begin(), b.x.end(), x.mutable_data());
        py::array_t<int> y(static_cast<py::ssize_t>(b.count));
        std::copy(b.y.begin(), b.y.end(), y.mutable_data());
        return py::make_tuple(x, y);
      });

  m.def("synth_balanced", &synth_balanced, py::arg("classes"), py::arg("per_class"),
        py::arg("dim"), py::arg("separation"), py::arg("seed"));

  m.def(
      "load_idx",
      [](const std::filesystem::path& train_images, const std::filesystem::path& train_labels,
         const std::filesystem::path& test_images, const std::filesystem::path& test_labels,
         const std::string& name, bool force_balance) {
        IdxOptions opts;
        opts.name = name;
        opts.force_balance = force_balance;
        return load_idx({train_images, train_labels, test_images, test_labels}, opts);
      },
      py::arg("train_images"), py::arg("train_labels"), py::arg("test_images"),
      py::arg("test_labels"), py::arg("name") = "idx", py::arg("force_balance") = true);

  py::class_<Model>(m, "Model")
      .def_property_readonly("arch", [](const Model& m_) { return m_.arch.layer_string(); })
      .def_property_readonly("weight_count", &Model::weight_count)
      .def_property_readonly("unmasked_count", &Model::unmasked_count)
      .def("weights",
           [](const Model& m_) {
             std::vector<py::array_t<double>> out;
             for (const auto& p : m_.params) {
               if (p.empty()) continue;
               py::array_t<double> w(static_cast<py::ssize_t>(p.weights.size()));
               std::copy(p.weights.data(), p.weights.data() + p.weights.size(),
                         w.mutable_data());
               out.push_back(std::move(w));
             }
             return out;
           })
      .def("masks",
           [](const Model& m_) {
             std::vector<py::array_t<std::uint8_t>> out;
             for (const auto& p : m_.params) {
               if (p.empty()) continue;
               py::array_t<std::uint8_t> w(static_cast<py::ssize_t>(p.mask.size()));
               std::copy(p.mask.begin(), p.mask.end(), w.mutable_data());
               out.push_back(std::move(w));
             }
             return out;
           })
      .def("save", [](const Model& m_, const std::filesystem::path& p) { save_model(m_, p); });

  m.def("load_model", &load_model, py::arg("path"));
  m.def(
      "build_model",
      [](const std::string& arch, std::uint64_t seed) {
        return build_model(ArchitectureSpec::parse(arch), seed);
      },
      py::arg("arch"), py::arg("seed"),
      "arch: 'in=8;classes=2;layers=dense(8,8),relu,dense(8,2)'");

  m.def(
      "loss",
      [](const Model& model, const py::array_t<double>& x, const py::array_t<int>& y,
         double eps) { return loss(model, batch_from_numpy(x, y), eps); },
      py::arg("model"), py::arg("x"), py::arg("y"), py::arg("eps") = 0.0);

  m.def(
      "predict",
      [](const Model& model, const py::array_t<double>& x) {
        const auto b = x.request();
        if (b.ndim != 2) throw UsageError("x must be a 2-d array");
        std::vector<double> data(static_cast<std::size_t>(b.shape[0] * b.shape[1]));
        const auto xx = x.unchecked<2>();
        for (py::ssize_t i = 0; i < b.shape[0]; ++i)
          for (py::ssize_t j = 0; j < b.shape[1]; ++j)
            data[static_cast<std::size_t>(i * b.shape[1] + j)] = xx(i, j);
        const auto out = predict(model, data.data(), static_cast<std::size_t>(b.shape[0]));
        py::array_t<int> res(static_cast<py::ssize_t>(out.size()));
        std::copy(out.begin(), out.end(), res.mutable_data());
        return res;
      },
      py::arg("model"), py::arg("x"));

  m.def(
      "train",
      [](const Model& model, const Dataset& ds, std::size_t epochs, std::size_t batch_size,
         const std::vector<std::pair<std::size_t, double>>& schedule, double weight_decay,
         std::uint64_t seed) {
        const TrainResult r =
            train(model, ds, make_train_config(epochs, batch_size, schedule, weight_decay, seed));
        py::list history;
        for (const auto& h : r.history) {
          py::dict d;
          d["train_loss"] = h.train_loss;
          d["val_loss"] = h.val_loss;
          d["val_accuracy"] = h.val_accuracy;
          history.append(d);
        }
        return py::make_tuple(r.model, history, r.best_epoch);
      },
      py::arg("model"), py::arg("dataset"), py::arg("epochs"), py::arg("batch_size") = 32,
      py::arg("schedule") = std::vector<std::pair<std::size_t, double>>{{1, 0.1}},
      py::arg("weight_decay") = 0.0, py::arg("seed") = 1);

  m.def(
      "prune",
      [](const Model& model, const std::string& method_name, double ratio, const Dataset* ds,
         double up_epsilon, std::uint64_t rp_seed, double grad_epsilon) {
        const PruneMethod method = make_method(method_name, up_epsilon, rp_seed);
        GradientSet grads;
        const GradientSet* grads_ptr = nullptr;
        if (method.needs_gradients()) {
          if (!ds) throw UsageError(method.name() + " needs the dataset for gradients");
          const double eps =
              method.kind == PruneMethodKind::Undecayed ? method.epsilon : grad_epsilon;
          grads = full_gradient(model, *ds, Split::Train, eps);
          grads_ptr = &grads;
        }
        Model pruned = model;
        apply(pruned, plan(score(model, method, grads_ptr), ratio));
        return pruned;
      },
      py::arg("model"), py::arg("method"), py::arg("ratio"), py::arg("dataset") = nullptr,
      py::arg("up_epsilon") = 0.0, py::arg("rp_seed") = 0, py::arg("grad_epsilon") = 0.0,
      "prune without fine-tuning");

  m.def(
      "prune_and_finetune",
      [](const Model& model, const std::string& method_name, double ratio, const Dataset& ds,
         std::size_t epochs, std::size_t batch_size,
         const std::vector<std::pair<std::size_t, double>>& schedule, double weight_decay,
         std::uint64_t seed, double up_epsilon, std::uint64_t rp_seed) {
        const PruneMethod method = make_method(method_name, up_epsilon, rp_seed);
        return prune_and_finetune(
            model, method, ratio, ds,
            make_train_config(epochs, batch_size, schedule, weight_decay, seed));
      },
      py::arg("model"), py::arg("method"), py::arg("ratio"), py::arg("dataset"),
      py::arg("epochs"), py::arg("batch_size") = 32,
      py::arg("schedule") = std::vector<std::pair<std::size_t, double>>{{1, 0.1}},
      py::arg("weight_decay") = 0.0, py::arg("seed") = 1, py::arg("up_epsilon") = 0.0,
      py::arg("rp_seed") = 0);

  py::class_<ClassBalanceProfile>(m, "Profile")
      .def_readonly("accuracy", &ClassBalanceProfile::accuracy)
      .def_property_readonly("recall",
                             [](const ClassBalanceProfile& p) { return vec_to_numpy(p.recall); })
      .def_property_readonly("balance",
                             [](const ClassBalanceProfile& p) { return vec_to_numpy(p.balance); })
      .def_property_readonly(
          "normalized_balance",
          [](const ClassBalanceProfile& p) { return vec_to_numpy(p.normalized_balance); })
      .def_property_readonly("classes", &ClassBalanceProfile::classes);

  m.def(
      "confusion",
      [](const Model& model, const Dataset& ds, const std::string& split) {
        return cm_to_numpy(confusion(model, ds, parse_split(split)));
      },
      py::arg("model"), py::arg("dataset"), py::arg("split") = "test");

  m.def(
      "profile", [](const py::array_t<std::uint64_t>& cm) { return profile(cm_from_numpy(cm)); },
      py::arg("confusion_matrix"));

  m.def(
      "precision_fscore",
      [](const py::array_t<std::uint64_t>& cm, std::size_t c) {
        return precision_fscore(cm_from_numpy(cm), c);
      },
      py::arg("confusion_matrix"), py::arg("c"));

  m.def(
      "intensification",
      [](const ClassBalanceProfile& before, const ClassBalanceProfile& after,
         std::size_t c) -> py::object {
        const auto r = intensification(before, after, c);
        return r ? py::cast(*r) : py::none();
      },
      py::arg("before"), py::arg("after"), py::arg("c"));

  m.def("alpha", &alpha, py::arg("before"), py::arg("after"));

  m.def(
      "alpha_pooled",
      [](const std::vector<std::pair<ClassBalanceProfile, ClassBalanceProfile>>& pairs) {
        const PooledAlpha p = alpha_pooled(pairs);
        py::dict d;
        d["alpha_hat"] = p.alpha_hat;
        d["r2"] = p.r2;
        d["mean_accuracy"] = p.mean_accuracy;
        d["points"] = p.points;
        return d;
      },
      py::arg("pairs"));

  m.def("recall_variance", &recall_variance, py::arg("profile"));

  py::class_<TestResult>(m, "TestResult")
      .def_readonly("t", &TestResult::t)
      .def_readonly("df", &TestResult::df)
      .def_readonly("p_raw", &TestResult::p_raw)
      .def_readonly("p_adjusted", &TestResult::p_adjusted)
      .def_readonly("degenerate", &TestResult::degenerate)
      .def_property_readonly("alternative",
                             [](const TestResult& r) { return to_string(r.alternative); })
      .def_property_readonly("kind", [](const TestResult& r) { return to_string(r.kind); });

  m.def(
      "t_paired",
      [](const std::vector<double>& x, const std::vector<double>& y, const std::string& alt) {
        return t_paired(x, y, parse_alternative(alt));
      },
      py::arg("x"), py::arg("y"), py::arg("alternative") = "two-sided");
  m.def(
      "t_independent",
      [](const std::vector<double>& x, const std::vector<double>& y, const std::string& alt) {
        return t_independent(x, y, parse_alternative(alt));
      },
      py::arg("x"), py::arg("y"), py::arg("alternative") = "two-sided");
  m.def("bonferroni", &bonferroni, py::arg("p"), py::arg("k"));

  py::class_<ConfidenceInterval>(m, "ConfidenceInterval")
      .def_readonly("lower", &ConfidenceInterval::lower)
      .def_readonly("upper", &ConfidenceInterval::upper)
      .def_readonly("level", &ConfidenceInterval::level)
      .def_readonly("n", &ConfidenceInterval::n);

  m.def(
      "ci_mean",
      [](const std::vector<double>& x, double level) { return ci_mean(x, level); },
      py::arg("x"), py::arg("level") = 0.99);
  m.def(
      "classify_ci",
      [](const ConfidenceInterval& ci, double reference) {
        return std::string(1, classify_ci(ci, reference));
      },
      py::arg("ci"), py::arg("reference") = 1.0);

  m.def("t_cdf", &student_t_cdf, py::arg("t"), py::arg("df"));
  m.def("t_quantile", &student_t_quantile, py::arg("p"), py::arg("df"));
  m.def("incomplete_beta", &regularized_incomplete_beta, py::arg("x"), py::arg("a"),
        py::arg("b"));
  m.def("render_p_value", &render_p_value, py::arg("p"));

  m.def(
      "run_experiment",
      [](const std::filesystem::path& config, bool resume) {
        const ExperimentConfig cfg = ExperimentConfig::load(config);
        const ExperimentResult r = run_experiment(cfg, resume, nullptr);
        py::dict d;
        d["records"] = r.records.size();
        d["baselines_trained"] = r.progress.baselines_trained;
        d["baselines_reused"] = r.progress.baselines_reused;
        d["cells_computed"] = r.progress.cells_computed;
        d["cells_skipped"] = r.progress.cells_skipped;
        d["cells_failed"] = r.progress.cells_failed;
        d["output_dir"] = cfg.output_dir.string();
        return d;
      },
      py::arg("config"), py::arg("resume") = false);

  m.def(
      "analyze",
      [](const std::filesystem::path& records_dir, const std::optional<std::filesystem::path>& plan,
         const std::optional<std::filesystem::path>& out) {
        AnalysisOptions opts;
        if (plan) opts = AnalysisOptions::load_plan(*plan);
        const Analysis a = analyze(load_records(records_dir), opts);
        const std::filesystem::path out_dir = out ? *out : records_dir / "analysis";
        write_analysis(a, out_dir);
        return out_dir.string();
      },
      py::arg("records_dir"), py::arg("plan") = std::nullopt, py::arg("out") = std::nullopt);

  m.def(
      "report",
      [](const std::filesystem::path& analysis_dir, const std::string& format,
         const std::optional<std::filesystem::path>& out) {
        const std::filesystem::path out_dir = out ? *out : analysis_dir / "report";
        write_report(load_analysis(analysis_dir), parse_report_format(format), out_dir);
        return out_dir.string();
      },
      py::arg("analysis_dir"), py::arg("format") = "csv", py::arg("out") = std::nullopt);
}
