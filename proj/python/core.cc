// JSON crosses the boundary as text; msdi/__init__.py decodes it.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "commands.h"
#include "msdi/coding.h"
#include "msdi/errors.h"
#include "msdi/extract.h"

namespace py = pybind11;
using namespace msdi;

namespace {

std::string command_json(const std::string &name, const std::string &config, const std::string &expect,
                         const std::string &corrupt) {
    using Command = cli::CommandResult (*)(const cli::CommandOptions &);
    static const std::map<std::string, std::pair<std::string, Command>> commands{
        {"ms-facts", {"ms-facts", cli::ms_facts}},
        {"ot-run", {"ot", cli::ot_run}},
        {"ot-security", {"ot", cli::ot_security}},
        {"bc-run", {"bc", cli::bc_run}},
        {"bc-hiding", {"bc", cli::bc_hiding}},
        {"bc-binding", {"bc", cli::bc_binding}},
        {"test-phase", {"test-phase", cli::test_phase}},
        {"compose-check", {"compose", cli::compose_check}},
    };
    auto it = commands.find(name);
    if (it == commands.end()) {
        throw ConfigError("unknown command '" + name + "'");
    }
    cli::CommandOptions o;
    o.cfg = RunConfig::from_json(nlohmann::json::parse(config));
    o.cfg.protocol = it->second.first;
    o.cfg.validate();
    o.expect = expect;
    o.corrupt = corrupt;
    cli::CommandResult r;
    {
        py::gil_scoped_release release;
        r = it->second.second(o);
    }
    nlohmann::json claims = nlohmann::json::array(), points = nlohmann::json::array();
    for (const auto &c : r.report.claims) {
        claims.push_back(c.to_json());
    }
    for (const auto &p : r.report.points) {
        points.push_back(p.to_json());
    }
    return nlohmann::json{{"claims", claims}, {"points", points}, {"detail", r.detail}}.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("default_config", [] { return RunConfig{}.to_json().dump(); });
    m.def("command", &command_json, py::arg("name"), py::arg("config"), py::arg("expect") = "pass",
          py::arg("corrupt") = "");

    m.def("chernoff_trials", &chernoff_trials, py::arg("epsilon"), py::arg("mu_rate"), py::arg("confidence"));
    m.def("rate_interval", &rate_interval, py::arg("successes"), py::arg("trials"), py::arg("confidence") = 0.95);
    m.def("auto_code", &auto_code, py::arg("length"), py::arg("eps_r"), py::arg("c_r"));

    py::class_<LinearCode>(m, "LinearCode")
        .def(py::init([](const std::string &spec) { return make_code(spec); }), py::arg("spec"))
        .def_property_readonly("n", &LinearCode::n)
        .def_property_readonly("k", &LinearCode::k)
        .def_property_readonly("d", &LinearCode::d)
        .def_property_readonly("name", &LinearCode::name)
        .def("syndrome", [](const LinearCode &c, const std::string &v) { return c.syndrome(BitVec::from_string(v)).str(); })
        .def("decode",
             [](const LinearCode &c, const std::string &s) -> std::optional<std::string> {
                 auto e = c.decode(BitVec::from_string(s));
                 return e ? std::optional<std::string>(e->str()) : std::nullopt;
             })
        .def("__repr__", [](const LinearCode &c) {
            return "LinearCode(" + c.name() + ", n=" + std::to_string(c.n()) + ", k=" + std::to_string(c.k()) +
                   ", d=" + std::to_string(c.d()) + ")";
        });

    m.def(
        "strong_extractor_distance",
        [](const std::vector<std::uint64_t> &support, std::size_t n, std::size_t m) {
            return to_string(strong_extractor_distance(support, n, m));
        },
        py::arg("support"), py::arg("n"), py::arg("m"));
    m.def("leftover_hash_ceiling", &leftover_hash_ceiling, py::arg("k"), py::arg("m"));
}
