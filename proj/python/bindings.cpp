#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tribound/boundary.hpp"
#include "tribound/detector.hpp"
#include "tribound/error.hpp"
#include "tribound/metrics.hpp"
#include "tribound/oracle_config.hpp"
#include "tribound/pool_io.hpp"
#include "tribound/report_io.hpp"
#include "tribound/synthlab.hpp"

namespace py = pybind11;
using namespace tribound;

namespace {

using F64 = py::array_t<double, py::array::c_style | py::array::forcecast>;

Vector to_vector(const F64& a) {
  if (a.ndim() != 1) throw ShapeMismatch("expected a 1-D array");
  return Vector(a.data(), a.data() + a.size());
}

F64 from_vector(const std::vector<double>& v) {
  F64 out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<std::uint32_t> labels_array(const std::vector<ClassId>& v) {
  py::array_t<std::uint32_t> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

LabeledPool pool_from(const F64& samples, const py::array_t<std::uint32_t>& labels) {
  if (samples.ndim() != 2) throw ShapeMismatch("samples must be [n, d]");
  const auto n = static_cast<std::size_t>(samples.shape(0));
  if (labels.size() != samples.shape(0)) throw ShapeMismatch("one label per sample");
  LabeledPool p;
  p.dim = static_cast<std::size_t>(samples.shape(1));
  p.samples.assign(samples.data(), samples.data() + samples.size());
  p.labels.assign(labels.data(), labels.data() + n);
  return p;
}

py::object parse_json(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_tribound, m) {
  m.doc() = "Decision-boundary backdoor scanning for hard-label classifiers";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<BackendError>(m, "BackendError", error.ptr());
  py::register_exception<DegenerateTriplet>(m, "DegenerateTriplet", error.ptr());
  py::register_exception<InsufficientSamples>(m, "InsufficientSamples", error.ptr());
  py::register_exception<SingleClassInput>(m, "SingleClassInput", error.ptr());
  py::register_exception<MissingClass>(m, "MissingClass", error.ptr());

  py::class_<Oracle, std::shared_ptr<Oracle>>(m, "Oracle")
      .def_property_readonly("n_classes", &Oracle::n_classes)
      .def_property_readonly("input_dim", &Oracle::input_dim)
      .def(
          "predict",
          [](const Oracle& o, const F64& x) {
            if (x.ndim() != 2 && x.ndim() != 1) throw ShapeMismatch("expected [B, d] or [d]");
            std::vector<ClassId> labels;
            {
              py::gil_scoped_release release;
              labels = predict_batch(o, {x.data(), static_cast<std::size_t>(x.size())});
            }
            return labels_array(labels);
          },
          py::arg("x"), "Hard labels for a [B, d] array of inputs.");

  m.def(
      "load_oracle",
      [](const std::string& config_json, const std::filesystem::path& base_dir) {
        auto c = OracleConfig::from_json(nlohmann::json::parse(config_json), base_dir);
        return std::const_pointer_cast<Oracle>(load_oracle(c));
      },
      py::arg("config_json"), py::arg("base_dir") = std::filesystem::path{});

  m.def(
      "gen_clean_oracle",
      [](std::uint64_t seed, std::size_t n, std::size_t d, double radius) {
        return std::static_pointer_cast<Oracle>(gen_clean_oracle(seed, n, d, radius));
      },
      py::arg("seed"), py::arg("n_classes"), py::arg("dim"), py::arg("radius") = kDefaultRadius);
  m.def(
      "gen_backdoor_oracle",
      [](std::uint64_t seed, std::size_t n, std::size_t d, ClassId target, double strength,
         double radius) {
        return std::static_pointer_cast<Oracle>(
            gen_backdoor_oracle(seed, n, d, target, strength, radius));
      },
      py::arg("seed"), py::arg("n_classes"), py::arg("dim"), py::arg("target"),
      py::arg("strength") = 0.8, py::arg("radius") = kDefaultRadius);
  m.def(
      "gen_pool",
      [](std::uint64_t model_seed, std::size_t n, std::size_t d, std::size_t per_class,
         double sigma, std::uint64_t seed, double radius) {
        const auto pool =
            gen_pool(CentroidModel::generate(model_seed, n, d, radius), per_class, sigma, seed);
        F64 samples({static_cast<py::ssize_t>(pool.size()), static_cast<py::ssize_t>(d)});
        std::copy(pool.samples.begin(), pool.samples.end(), samples.mutable_data());
        return py::make_tuple(samples, labels_array(pool.labels));
      },
      py::arg("model_seed"), py::arg("n_classes"), py::arg("dim"), py::arg("per_class"),
      py::arg("sigma") = -1.0, py::arg("seed") = 0, py::arg("radius") = kDefaultRadius,
      "Samples and labels around the centroids of gen_*_oracle(model_seed, ...).");

  m.def(
      "read_pool",
      [](const std::filesystem::path& dir) {
        const auto pool = read_pool_dir(dir);
        F64 samples({static_cast<py::ssize_t>(pool.size()), static_cast<py::ssize_t>(pool.dim)});
        std::copy(pool.samples.begin(), pool.samples.end(), samples.mutable_data());
        return py::make_tuple(samples, labels_array(pool.labels));
      },
      py::arg("dir"));

  m.def(
      "span_plane",
      [](const F64& x1, const F64& x2, const F64& x3) {
        const auto b = span_plane({to_vector(x1), to_vector(x2), to_vector(x3), std::nullopt});
        py::list anchors;
        for (const auto& a : b.anchor_coords) anchors.append(py::make_tuple(a.x, a.y));
        return py::dict(py::arg("e1") = from_vector(b.e1), py::arg("e2") = from_vector(b.e2),
                        py::arg("anchor_coords") = anchors);
      },
      py::arg("x1"), py::arg("x2"), py::arg("x3"));

  py::class_<BoundaryMap>(m, "BoundaryMap")
      .def_readonly("density", &BoundaryMap::density)
      .def_readonly("n_classes", &BoundaryMap::n_classes)
      .def_property_readonly("labels",
                             [](const BoundaryMap& b) {
                               auto a = labels_array(b.labels);
                               a.resize({b.density, b.density});
                               return a;
                             })
      .def_property_readonly("anchor_labels",
                             [](const BoundaryMap& b) {
                               return std::vector<ClassId>(b.anchor_labels.begin(),
                                                           b.anchor_labels.end());
                             })
      .def_property_readonly("bounds",
                             [](const BoundaryMap& b) {
                               return py::make_tuple(b.bounds.x_min, b.bounds.x_max,
                                                     b.bounds.y_min, b.bounds.y_max);
                             })
      .def("distribution",
           [](const BoundaryMap& b) { return label_distribution(b).p; })
      .def(
          "png",
          [](const BoundaryMap& b, std::size_t scale) {
            const auto bytes = render_image(b, default_palette(b.n_classes), scale);
            return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
          },
          py::arg("scale") = 1);

  m.def(
      "plot_boundary",
      [](const Oracle& o, const F64& x1, const F64& x2, const F64& x3, double eta,
         std::size_t density, std::size_t jobs) {
        SampleTriplet t{to_vector(x1), to_vector(x2), to_vector(x3), std::nullopt};
        py::gil_scoped_release release;
        return plot_boundary(o, t, eta, density, {std::nullopt, jobs, 512});
      },
      py::arg("oracle"), py::arg("x1"), py::arg("x2"), py::arg("x3"), py::arg("eta") = 5.0,
      py::arg("density") = 100, py::arg("jobs") = 1);

  m.def(
      "renyi_entropy",
      [](std::vector<double> p, double alpha) { return renyi_entropy({std::move(p)}, alpha); },
      py::arg("p"), py::arg("alpha") = kDefaultAlpha);
  m.def(
      "ats",
      [](std::array<ClassId, 3> anchors, std::vector<double> p, double t) {
        return ats(std::span<const ClassId, 3>(anchors), {std::move(p)}, t);
      },
      py::arg("anchor_labels"), py::arg("p"), py::arg("t") = kDefaultT);

  m.def(
      "scan",
      [](const Oracle& o, const F64& samples, const py::array_t<std::uint32_t>& labels,
         std::size_t n_plots, std::size_t density, double eta, double alpha, double t,
         std::uint64_t seed, bool distinct_labels, double threshold_re, double threshold_ats,
         std::size_t jobs, const std::string& model_id) {
        const auto pool = pool_from(samples, labels);
        ScanParams p;
        p.n_plots = n_plots;
        p.density = density;
        p.eta = eta;
        p.alpha = alpha;
        p.t = t;
        p.seed = seed;
        p.distinct_labels = distinct_labels;
        p.jobs = jobs;
        p.validate();
        DetectionReport r;
        {
          py::gil_scoped_release release;
          r = scan(o, pool, p, {threshold_re, threshold_ats}, model_id);
        }
        return parse_json(to_json(r));
      },
      py::arg("oracle"), py::arg("samples"), py::arg("labels"), py::arg("n_plots") = 20,
      py::arg("density") = 100, py::arg("eta") = 5.0, py::arg("alpha") = kDefaultAlpha,
      py::arg("t") = kDefaultT, py::arg("seed") = 0, py::arg("distinct_labels") = true,
      py::arg("threshold_re") = Thresholds{}.re, py::arg("threshold_ats") = Thresholds{}.ats,
      py::arg("jobs") = 1, py::arg("model_id") = "",
      "Detection report as a dict with the same keys as the CLI's report JSON.");

  m.def(
      "calibrate_threshold",
      [](std::vector<double> scores, std::vector<bool> is_backdoor, std::size_t resamples,
         std::uint64_t seed) {
        return parse_json(to_json(calibrate_threshold(scores, is_backdoor, resamples, seed)));
      },
      py::arg("scores"), py::arg("is_backdoor"), py::arg("resamples") = 1, py::arg("seed") = 0);
  m.def(
      "auroc",
      [](std::vector<double> clean, std::vector<double> backdoor) {
        return auroc(clean, backdoor);
      },
      py::arg("clean_scores"), py::arg("backdoor_scores"));
  m.def(
      "identify_target",
      [](std::vector<double> p, double ratio, double floor) -> std::optional<ClassId> {
        const auto call = identify_target(p, ratio, floor);
        if (!call) return std::nullopt;
        return call->label;
      },
      py::arg("mean_distribution"), py::arg("dominance_ratio") = 2.0,
      py::arg("dominance_floor") = 0.4);
  m.def(
      "verdict",
      [](double score, double gamma) { return to_string(verdict(score, gamma)); },
      py::arg("score"), py::arg("gamma"));
}
