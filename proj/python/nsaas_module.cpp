#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nsaas/cost_model.hpp"
#include "nsaas/engine.hpp"
#include "nsaas/error.hpp"
#include "nsaas/experiments.hpp"

namespace py = pybind11;
using namespace nsaas;

namespace {

py::object to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Json from_py(const py::handle& obj) {
  return Json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

Config config_from(const py::object& cfg) { return cfg.is_none() ? Config::defaults() : Config::from_json(from_py(cfg)); }

py::dict model_dict(const TierCostModel& m) {
  py::dict d;
  d["tier"] = m.tier;
  d["a"] = m.a;
  d["b"] = m.b;
  d["c"] = m.c;
  d["residual_norm"] = m.residual_norm;
  return d;
}

TierCostModel model_from(const py::dict& d) {
  TierCostModel m;
  m.tier = d.contains("tier") ? d["tier"].cast<std::string>() : "";
  m.a = d["a"].cast<double>();
  m.b = d["b"].cast<double>();
  m.c = d["c"].cast<double>();
  return m;
}

}  // namespace

PYBIND11_MODULE(_nsaas, m) {
  m.doc() = "Slice onboarding, orchestration and experiment replay on a virtual clock";

  static py::exception<Error> exc(m, "NsaasError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object details = to_py(e.details());
      PyErr_SetObject(exc.ptr(), py::make_tuple(std::string(e.reason()), e.what(), details).ptr());
    }
  });

  py::class_<Engine>(m, "Engine")
      .def(py::init([](const py::object& config) { return std::make_unique<Engine>(config_from(config)); }),
           py::arg("config") = py::none())
      .def(
          "submit", [](Engine& e, const py::object& body) { return to_py(e.slice_json(e.submit_json(from_py(body)).id)); },
          py::arg("request"))
      .def(
          "submit_async",
          [](Engine& e, const py::object& body) { return e.submit_async(SliceRequest::from_json(from_py(body))); },
          py::arg("request"))
      .def("get", [](Engine& e, const std::string& id) { return to_py(e.slice_json(id)); })
      .def("list",
           [](Engine& e) {
             Json arr = Json::array();
             for (const auto& nsi : e.list()) arr.push_back(nsi.to_json());
             return to_py(arr);
           })
      .def("reconfigure", [](Engine& e, const std::string& id) { return to_py(e.slice_json(e.reconfigure(id).id)); })
      .def("decommission", [](Engine& e, const std::string& id) { return to_py(e.decommission(id).to_json()); })
      .def("advance", &Engine::advance, py::arg("until"))
      .def("run_until_settled", &Engine::run_until_settled)
      .def("now", &Engine::now)
      .def("inventory_digest", &Engine::inventory_digest)
      .def("event_log_jsonl", &Engine::event_log_jsonl)
      .def("metrics", [](Engine& e) { return to_py(e.metrics()); })
      .def(
          "availability",
          [](Engine& e, const std::string& id, double from, double to, double period) {
            std::vector<std::pair<double, int>> out;
            for (const auto& s : e.availability(id, from, to, period)) out.emplace_back(s.t, s.up);
            return out;
          },
          py::arg("nsi_id"), py::arg("start"), py::arg("end"), py::arg("period") = 0.5);

  m.def("listing_one_request", [] { return to_py(listing_one_request()); });
  m.def("experiment_names", &experiment_names);
  m.def(
      "run_experiment",
      [](const std::string& name, const py::object& config) { return to_py(run_experiment(name, config_from(config)).to_json()); },
      py::arg("name"), py::arg("config") = py::none());
  m.def(
      "fit_cost_model",
      [](const std::string& csv, const std::string& tier) { return model_dict(fit_cost_model(parse_price_table(csv), tier)); },
      py::arg("price_table_csv"), py::arg("tier"));
  m.def("printed_cost_models", [] {
    py::dict d;
    for (const auto& [k, v] : printed_cost_models()) d[py::str(k)] = model_dict(v);
    return d;
  });
  m.def(
      "tier_variation",
      [](const py::dict& edge, const py::dict& central, double vcpu, double ram_gb) {
        return tier_variation(model_from(edge), model_from(central), vcpu, ram_gb);
      },
      py::arg("edge"), py::arg("central"), py::arg("vcpu"), py::arg("ram_gb"));
  m.def("default_price_table", [] { return Config::defaults().price_table_csv; });
}
