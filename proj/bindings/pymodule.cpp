#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "morsp/metrics.hpp"
#include "morsp/morphology.hpp"
#include "morsp/numcheck.hpp"
#include "morsp/smooth_morphology.hpp"
#include "morsp/solver.hpp"
#include "morsp/std_energy.hpp"

namespace py = pybind11;
using namespace morsp;

namespace {

GrayImage image_from_array(const py::array_t<double, py::array::c_style |
                                                         py::array::forcecast>& arr) {
    if (arr.ndim() != 2)
        throw std::invalid_argument("expected a 2-D array");
    auto buf = arr.unchecked<2>();
    GrayImage img(static_cast<int>(buf.shape(0)), static_cast<int>(buf.shape(1)));
    for (py::ssize_t r = 0; r < buf.shape(0); ++r)
        for (py::ssize_t c = 0; c < buf.shape(1); ++c)
            img(static_cast<int>(r), static_cast<int>(c)) = buf(r, c);
    if (!img.all_finite())
        throw std::invalid_argument("array contains non-finite values");
    return img;
}

py::array_t<double> image_to_array(const GrayImage& img) {
    py::array_t<double> arr({img.height(), img.width()});
    auto buf = arr.mutable_unchecked<2>();
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c) buf(r, c) = img(r, c);
    return arr;
}

StructuringElement element_from_args(const std::string& shape, int radius) {
    if (shape == "square") return make_element(ElementShape::square, radius);
    if (shape == "disk") return make_element(ElementShape::disk, radius);
    throw std::invalid_argument("shape must be 'square' or 'disk'");
}

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Smooth gray-scale morphology, smooth skeletons and the "
              "skeleton-preserving mask refinement solver";

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("gamma", &SolverConfig::gamma)
        .def_readwrite("lambda_", &SolverConfig::lambda)
        .def_readwrite("alpha", &SolverConfig::alpha)
        .def_readwrite("eta", &SolverConfig::eta)
        .def_readwrite("iota", &SolverConfig::iota)
        .def_readwrite("kernel_size", &SolverConfig::kernel_size)
        .def_readwrite("sigma", &SolverConfig::sigma)
        .def_readwrite("levels", &SolverConfig::levels)
        .def_readwrite("max_iter", &SolverConfig::max_iter)
        .def_readwrite("tol", &SolverConfig::tol)
        .def("set_element",
             [](SolverConfig& cfg, const std::string& shape, int radius) {
                 cfg.element = element_from_args(shape, radius);
             },
             py::arg("shape"), py::arg("radius"));

    py::class_<MetricsReport>(m, "MetricsReport")
        .def_readonly("f1", &MetricsReport::f1)
        .def_readonly("iou", &MetricsReport::iou)
        .def_readonly("precision", &MetricsReport::precision)
        .def_readonly("recall", &MetricsReport::recall)
        .def_readonly("cl_dice", &MetricsReport::cl_dice)
        .def_readonly("tp", &MetricsReport::tp)
        .def_readonly("fp", &MetricsReport::fp)
        .def_readonly("fn", &MetricsReport::fn)
        .def_readonly("tn", &MetricsReport::tn);

    m.def("dilate",
          [](const Array& u, const std::string& shape, int radius) {
              return image_to_array(
                  dilate(image_from_array(u), element_from_args(shape, radius)));
          },
          py::arg("u"), py::arg("shape") = "square", py::arg("radius") = 1);
    m.def("erode",
          [](const Array& u, const std::string& shape, int radius) {
              return image_to_array(
                  erode(image_from_array(u), element_from_args(shape, radius)));
          },
          py::arg("u"), py::arg("shape") = "square", py::arg("radius") = 1);
    m.def("classic_skeleton",
          [](const Array& u, int levels, const std::string& shape, int radius) {
              return image_to_array(classic_skeleton(
                  image_from_array(u), element_from_args(shape, radius), levels));
          },
          py::arg("u"), py::arg("levels"), py::arg("shape") = "square",
          py::arg("radius") = 1);

    m.def("smooth_dilate",
          [](const Array& u, double alpha, const std::string& shape, int radius) {
              SmoothParams p{alpha, 0, element_from_args(shape, radius)};
              return image_to_array(smooth_dilate(image_from_array(u), p));
          },
          py::arg("u"), py::arg("alpha") = 0.05, py::arg("shape") = "square",
          py::arg("radius") = 1);
    m.def("smooth_erode",
          [](const Array& u, double alpha, const std::string& shape, int radius) {
              SmoothParams p{alpha, 0, element_from_args(shape, radius)};
              return image_to_array(smooth_erode(image_from_array(u), p));
          },
          py::arg("u"), py::arg("alpha") = 0.05, py::arg("shape") = "square",
          py::arg("radius") = 1);
    m.def("smooth_skeleton",
          [](const Array& u, double alpha, int levels, const std::string& shape,
             int radius) {
              SmoothParams p{alpha, levels, element_from_args(shape, radius)};
              return image_to_array(
                  smooth_skeleton(image_from_array(u), p).skeleton);
          },
          py::arg("u"), py::arg("alpha") = 0.05, py::arg("levels") = 5,
          py::arg("shape") = "square", py::arg("radius") = 1);
    m.def("smooth_skeleton_grad",
          [](const Array& u, const Array& cotangent, double alpha, int levels,
             const std::string& shape, int radius) {
              SmoothParams p{alpha, levels, element_from_args(shape, radius)};
              SkeletonResult res = smooth_skeleton(image_from_array(u), p);
              return image_to_array(
                  smooth_skeleton_vjp(res.tape, image_from_array(cotangent)));
          },
          py::arg("u"), py::arg("cotangent"), py::arg("alpha") = 0.05,
          py::arg("levels") = 5, py::arg("shape") = "square",
          py::arg("radius") = 1);
    m.def("project_unit", [](const Array& u) {
        return image_to_array(project_unit(image_from_array(u)));
    });

    m.def("td_regularizer",
          [](const Array& u, int kernel_size, double sigma, double lambda) {
              return td_regularizer(image_from_array(u),
                                    make_gaussian(kernel_size, sigma), lambda);
          },
          py::arg("u"), py::arg("kernel_size") = 5, py::arg("sigma") = 1.0,
          py::arg("lambda_") = 1.0);
    m.def("td_subgradient",
          [](const Array& u, int kernel_size, double sigma, double lambda) {
              return image_to_array(td_subgradient(
                  image_from_array(u), make_gaussian(kernel_size, sigma), lambda));
          },
          py::arg("u"), py::arg("kernel_size") = 5, py::arg("sigma") = 1.0,
          py::arg("lambda_") = 1.0);

    m.def("skeleton_cost",
          [](const Array& w, const Array& skel_g, double alpha, int levels,
             const std::string& shape, int radius) {
              SmoothParams p{alpha, levels, element_from_args(shape, radius)};
              return skeleton_cost(image_from_array(w), image_from_array(skel_g), p);
          },
          py::arg("w"), py::arg("skel_g"), py::arg("alpha") = 0.05,
          py::arg("levels") = 5, py::arg("shape") = "square",
          py::arg("radius") = 1);

    m.def("refine",
          [](const Array& o, const Array& prior, const SolverConfig& cfg) {
              RefineResult res =
                  refine(image_from_array(o), image_from_array(prior), cfg);
              return py::make_tuple(image_to_array(res.u),
                                    py::dict(
                                        py::arg("iterations") = res.state.iter,
                                        py::arg("energy") = res.state.energy_trace,
                                        py::arg("residual") = res.state.residual_trace),
                                    image_to_array(res.skel_g));
          },
          py::arg("o"), py::arg("prior"), py::arg("cfg") = SolverConfig{},
          "Runs the mask-refinement solver; returns (u, trace, target_skeleton)");

    m.def("evaluate",
          [](const Array& pred, const Array& gt, double threshold,
             const std::string& shape, int radius) {
              return evaluate(image_from_array(pred), image_from_array(gt),
                              threshold, element_from_args(shape, radius));
          },
          py::arg("pred"), py::arg("gt"), py::arg("threshold") = 0.5,
          py::arg("shape") = "square", py::arg("radius") = 1);

    m.def("sandwich_audit",
          [](const Array& u, double alpha, const std::string& shape, int radius) {
              SmoothParams p{alpha, 0, element_from_args(shape, radius)};
              return sandwich_audit(image_from_array(u), p);
          },
          py::arg("u"), py::arg("alpha") = 0.05, py::arg("shape") = "square",
          py::arg("radius") = 1);
    m.def("gradcheck",
          [](std::uint64_t seed, double alpha) {
              GradCheckSuiteResult res = run_gradcheck_suite(seed, alpha);
              return py::make_tuple(res.all_passed, res.report.max_rel_error);
          },
          py::arg("seed") = 42, py::arg("alpha") = 0.05);
}
