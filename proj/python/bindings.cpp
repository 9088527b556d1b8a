#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cstarframe/cli.hpp"
#include "cstarframe/constructions.hpp"
#include "cstarframe/errors.hpp"
#include "cstarframe/json_io.hpp"

namespace py = pybind11;
using namespace csf;

namespace {

std::string report_text(const FrameReport& r) { return to_json(r).dump(); }
std::string certificate_text(const ConstructionCertificate& c) { return to_json(c).dump(); }

CheckOptions make_options(double tol, double eps_strict, std::size_t samples, std::uint64_t seed) {
  CheckOptions o;
  o.tol = tol;
  o.eps_strict = eps_strict;
  o.samples = samples;
  o.seed = seed;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Frame checks and constructions over finite-dimensional C*-algebras";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  py::class_<AlgebraSpec>(m, "AlgebraSpec")
      .def(py::init<std::vector<int>>(), py::arg("block_sizes"))
      .def_property_readonly("block_sizes", &AlgebraSpec::block_sizes)
      .def_property_readonly("is_commutative", &AlgebraSpec::is_commutative)
      .def(py::self == py::self)
      .def("__repr__", [](const AlgebraSpec& s) { return "AlgebraSpec(" + to_json(s).dump() + ")"; });

  py::class_<AlgebraElement>(m, "AlgebraElement")
      .def(py::init<AlgebraSpec, std::vector<Matrix>>(), py::arg("spec"), py::arg("blocks"))
      .def_static("zero", &AlgebraElement::zero)
      .def_static("identity", &AlgebraElement::identity)
      .def_static("diagonal", &AlgebraElement::diagonal)
      .def_property_readonly("spec", &AlgebraElement::spec)
      .def_property_readonly("blocks", &AlgebraElement::blocks)
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(py::self * py::self)
      .def("__mul__", [](const AlgebraElement& a, Complex s) { return a * s; })
      .def("__rmul__", [](const AlgebraElement& a, Complex s) { return s * a; });

  m.def("involution", &involution);
  m.def("norm", &norm);
  m.def("is_positive", &is_positive, py::arg("a"), py::arg("tol") = kDefaultPositivityTol);
  m.def("is_strictly_positive", &is_strictly_positive, py::arg("a"), py::arg("eps"));
  m.def("positive_sqrt", &positive_sqrt, py::arg("a"), py::arg("tol") = kDefaultPositivityTol);
  m.def("absolute_value", &absolute_value);

  py::class_<ModuleSpace>(m, "ModuleSpace")
      .def(py::init<AlgebraSpec, int>(), py::arg("spec"), py::arg("rank"))
      .def_property_readonly("spec", &ModuleSpace::spec)
      .def_property_readonly("rank", &ModuleSpace::rank)
      .def(py::self == py::self);

  py::class_<ModuleVector>(m, "ModuleVector")
      .def(py::init<ModuleSpace, std::vector<AlgebraElement>>(), py::arg("space"), py::arg("coords"))
      .def_property_readonly("space", &ModuleVector::space)
      .def_property_readonly("coords", &ModuleVector::coords);

  m.def("inner_product", &inner_product);
  m.def("vector_norm", &vector_norm);

  py::class_<AdjointableOp>(m, "AdjointableOp")
      .def(py::init<ModuleSpace, ModuleSpace, std::vector<AlgebraElement>>(), py::arg("domain"), py::arg("codomain"),
           py::arg("entries"))
      .def_static("zero", &AdjointableOp::zero)
      .def_static("identity", &AdjointableOp::identity)
      .def_property_readonly("domain", &AdjointableOp::domain)
      .def_property_readonly("codomain", &AdjointableOp::codomain)
      .def_property_readonly("entries", &AdjointableOp::entries);

  m.def("apply", &apply);
  m.def("adjoint", &adjoint);
  m.def("compose", &compose);
  m.def("scale", &scale);
  m.def("op_norm", &op_norm);
  m.def("realize", [](const AdjointableOp& t) { return realize(t).blocks; });
  m.def("is_psd_order", &is_psd_order, py::arg("p"), py::arg("q"), py::arg("tol") = 1e-9);
  m.def("operator_sqrt", &operator_sqrt, py::arg("s"), py::arg("tol") = 1e-9);
  m.def("closed_range_bounds", [](const AdjointableOp& t) {
    const ClosedRangeBounds b = closed_range_bounds(t);
    return py::make_tuple(b.injective_closed_range, b.lower, b.upper);
  });

  py::class_<OperatorFamily>(m, "OperatorFamily")
      .def(py::init<ModuleSpace, std::vector<AdjointableOp>>(), py::arg("domain"), py::arg("members"))
      .def_property_readonly("domain", &OperatorFamily::domain)
      .def_property_readonly("members", &OperatorFamily::members)
      .def("__len__", &OperatorFamily::size);

  py::class_<VectorFamily>(m, "VectorFamily")
      .def(py::init<ModuleSpace, std::vector<ModuleVector>>(), py::arg("space"), py::arg("members"))
      .def_property_readonly("members", &VectorFamily::members);

  m.def("frame_operator", &frame_operator);

  // Reports cross the boundary as JSON text; the package wrappers decode it.
  m.def("_check_g_frame", [](const OperatorFamily& f, double tol) { return report_text(check_g_frame(f, tol)); });
  m.def("_check_vector_frame", [](const VectorFamily& v, double tol) { return report_text(check_vector_frame(v, tol)); });
  m.def("_check_k_g_frame",
        [](const OperatorFamily& f, const AdjointableOp& k, double tol) { return report_text(check_k_g_frame(f, k, tol)); });
  m.def("_check_star_g_frame", [](const OperatorFamily& f, double tol, double eps, std::size_t samples,
                                  std::uint64_t seed) {
    return report_text(check_star_g_frame_commutative(f, make_options(tol, eps, samples, seed)));
  });
  m.def("_check_end_frame", [](const OperatorFamily& f, double tol, double eps, std::size_t samples,
                               std::uint64_t seed) {
    return report_text(check_end_frame(f, make_options(tol, eps, samples, seed)));
  });
  m.def("_check_k_end_frame", [](const OperatorFamily& f, const AdjointableOp& k, double tol, double eps,
                                 std::size_t samples, std::uint64_t seed) {
    return report_text(check_k_end_frame(f, k, make_options(tol, eps, samples, seed)));
  });

  m.def("_parseval_k", [](const OperatorFamily& f, double tol, double eps, std::size_t samples, std::uint64_t seed) {
    OperatorConstruction c = parseval_k_from_family(f, make_options(tol, eps, samples, seed));
    return py::make_tuple(c.op, certificate_text(c.certificate));
  });
  m.def("_k_frame_from_frame", [](const OperatorFamily& f, const AdjointableOp& k, double tol, double eps,
                                  std::size_t samples, std::uint64_t seed) {
    FamilyConstruction c = k_frame_from_frame(f, k, make_options(tol, eps, samples, seed));
    return py::make_tuple(c.family, certificate_text(c.certificate));
  });
  m.def("_example_frame_injective", [](const std::vector<AdjointableOp>& ops, double tol) {
    CheckOptions o;
    o.tol = tol;
    FamilyConstruction c = example_frame_injective(ops, o);
    return py::make_tuple(c.family, certificate_text(c.certificate));
  });

  m.def("_gen", [](std::uint64_t seed, const std::string& profile) { return dump(instance_to_json(cmd_gen(seed, profile))); });
  m.def("_check_instance", [](const std::string& text, std::size_t parallel) {
    RunFlags flags;
    flags.parallel = parallel;
    RunReport r = cmd_check(instance_from_json(parse_text(text)), flags);
    return py::make_tuple(r.status, dump(r.report));
  });
  m.attr("__version__") = kToolVersion;
}
