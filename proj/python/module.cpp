#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nmating/angles.hpp"
#include "nmating/boettcher.hpp"
#include "nmating/maps.hpp"
#include "nmating/verify.hpp"

namespace py = pybind11;
using namespace nmating;

namespace {

std::pair<double, double> to_pair(const SpherePoint &p) {
  cplx z = p.plane();
  return {z.real(), z.imag()};
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "cubic polynomial / cubic Newton map mating toolkit";

  py::class_<Angle>(m, "Angle")
      .def(py::init([](const std::string &s) { return Angle::parse(s); }))
      .def(py::init<long, long>())
      .def("__str__", &Angle::str)
      .def("__float__", &Angle::to_double)
      .def("__eq__", [](const Angle &a, const Angle &b) { return a == b; })
      .def("times", &Angle::times)
      .def("negated", &Angle::negated)
      .def_property_readonly("triadic", &Angle::is_triadic);

  py::class_<TriadicWord>(m, "Word")
      .def(py::init([](const std::string &s) { return TriadicWord::parse(s); }))
      .def("__str__", &TriadicWord::str)
      .def("shifted", &TriadicWord::shifted)
      .def("theta", [](const TriadicWord &w) { return theta(w).str(); });

  m.def("itinerary", [](const std::string &angle) {
    std::vector<std::string> out;
    for (const auto &w : itinerary_of_angle(Angle::parse(angle)).words)
      out.push_back(w.str());
    return out;
  });

  m.def("trace_ray",
        [](const std::string &family, std::complex<double> param,
           const std::string &angle) {
          Map f = family == "sym"      ? Map::cubic_sym()
                  : family == "cubic"  ? Map::cubic(param)
                  : family == "newton" ? Map::newton(param)
                                       : throw std::invalid_argument(
                                             "unknown family '" + family + "'");
          RayEngine rays(f);
          Landing l = rays.trace_external(Angle::parse(angle));
          return py::make_tuple(l.landed, to_pair(l.point), l.level);
        },
        py::arg("family"), py::arg("param"), py::arg("angle"));

  m.def("run_criterion", [](int n) {
    std::vector<py::dict> out;
    for (const auto &r : run_criterion(n)) {
      py::dict d;
      d["name"] = r.name;
      d["pass"] = r.pass;
      d["detail"] = r.detail;
      out.push_back(d);
    }
    return out;
  });
}
