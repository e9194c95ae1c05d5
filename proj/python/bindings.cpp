#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <set>
#include <sstream>

#include "lcv/experiment.hpp"
#include "lcv/hybrid_oracle.hpp"

namespace py = pybind11;
using namespace lcv;

namespace {

using Rows = std::vector<std::vector<std::string>>;

TraceSet to_traces(const Rows& rows) {
  if (rows.empty()) throw Error("at least one trace is required");
  Alphabet alphabet;
  for (const auto& r : rows)
    for (const auto& s : r) alphabet.intern(internal_name(s));
  std::vector<Trace> traces;
  for (const auto& r : rows) {
    std::vector<SymbolId> w;
    for (const auto& s : r) w.push_back(alphabet.at(internal_name(s)));
    traces.emplace_back(std::move(w), alphabet);
  }
  const auto h = traces.front().horizon();
  return TraceSet(alphabet, h, std::move(traces));
}

Rows from_traces(const TraceSet& t) {
  Rows out;
  for (const auto& tr : t.traces()) {
    auto& row = out.emplace_back();
    for (auto s : tr.symbols()) row.push_back(external_name(t.alphabet(), s));
  }
  return out;
}

std::vector<SymbolId> ids(const Slca& s, const std::vector<std::string>& names) {
  std::vector<SymbolId> out;
  for (const auto& n : names) out.push_back(s.alphabet().at(internal_name(n)));
  return out;
}

std::set<SymbolId> id_set(const Slca& s, const std::vector<std::string>& names) {
  std::set<SymbolId> out;
  for (const auto& n : names)
    if (auto id = s.alphabet().find(internal_name(n))) out.insert(*id);
  return out;
}

py::dict verdict(const VerificationVerdict& v) {
  py::dict d;
  d["holds"] = v.holds;
  d["explanation"] = v.explanation;
  if (v.witness) {
    d["stem"] = v.witness->stem;
    d["cycle"] = v.witness->cycle;
  } else {
    d["stem"] = py::none();
    d["cycle"] = py::none();
  }
  return d;
}

py::object to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_lcv, m) {
  m.doc() = "Data-driven abstractions with scenario-based certificates";

  py::register_exception<Error>(m, "LcvError", PyExc_ValueError);

  m.def("epsilon", [](std::size_t k, std::size_t n, double beta, const std::string& solver) {
    return epsilon(k, n, beta, parse_epsilon_strategy(solver));
  }, py::arg("k"), py::arg("n"), py::arg("beta"), py::arg("solver") = "wait-and-judge");

  m.def("greedy_complexity", [](const Rows& rows, std::size_t l) {
    return greedy_complexity(to_traces(rows), l);
  }, py::arg("traces"), py::arg("l"));

  m.def("phi_affine", py::overload_cast<double, std::size_t, std::size_t>(&phi_affine),
        py::arg("rho"), py::arg("k_bar"), py::arg("k"));
  m.def("kbar", [](double alpha, double rho, double d_min, double d_max) {
    return kbar(AffineBoundParams{alpha, rho, d_min, d_max});
  }, py::arg("alpha"), py::arg("rho"), py::arg("d_min"), py::arg("d_max"));
  m.def("gamma_bar", &gamma_bar, py::arg("epsilon"), py::arg("phi"));

  py::class_<Slca>(m, "Slca")
      .def_static("from_traces", [](const Rows& rows, std::size_t l, bool complete) {
        auto s = build_slca(to_traces(rows), l);
        return complete ? domino_complete(s) : s;
      }, py::arg("traces"), py::arg("l"), py::arg("complete") = false)
      .def_static("from_text", [](const std::string& text) {
        std::istringstream in(text);
        return read_slca(in);
      })
      .def_property_readonly("l", &Slca::window_length)
      .def_property_readonly("state_count", &Slca::state_count)
      .def_property_readonly("edge_count", &Slca::edge_count)
      .def_property_readonly("states", [](const Slca& s) {
        std::vector<std::vector<std::string>> out;
        for (const auto& st : s.states()) {
          auto& row = out.emplace_back();
          for (auto x : st.word()) row.push_back(external_name(s.alphabet(), x));
        }
        return out;
      })
      .def_property_readonly("edges", [](const Slca& s) {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t i = 0; i < s.state_count(); ++i)
          for (auto j : s.successors(i)) out.emplace_back(i, j);
        return out;
      })
      .def("added_by_completion", &Slca::added_by_completion)
      .def("complete", [](const Slca& s) { return domino_complete(s); })
      .def("is_deterministic", [](const Slca& s) { return is_deterministic(s); })
      .def("is_non_blocking", [](const Slca& s) { return is_non_blocking(s); })
      .def("includes", [](const Slca& s, const std::vector<std::string>& trace) {
        return includes_trace(s, ids(s, trace));
      })
      .def("verify_invariance", [](const Slca& s, const std::vector<std::string>& bad) {
        return verdict(verify_invariance(s, id_set(s, bad)));
      }, py::arg("bad"))
      .def("verify_reach_stay", [](const Slca& s, const std::vector<std::string>& target,
                                   const std::vector<std::string>& bad) {
        return verdict(verify_reach_stay(s, id_set(s, target), id_set(s, bad)));
      }, py::arg("target"), py::arg("bad") = std::vector<std::string>{})
      .def("to_dot", [](const Slca& s) { return to_dot(s); })
      .def("to_text", [](const Slca& s) { return slca_text(s); });

  m.def("hybrid_oracle", [](const std::string& lambda, std::size_t l) {
    nlohmann::json j;
    to_json(j, hybrid_pre_analysis(parse_rational(lambda), l));
    return to_py(j);
  }, py::arg("lambda_"), py::arg("l"));

  m.def("sample", [](const std::filesystem::path& config, std::optional<std::uint64_t> seed) {
    const auto c = load_config(config, seed);
    const auto built = build_system(c);
    return from_traces(sample_traces(built.system, built.partition, built.initial, c.n, c.horizon, c.seed));
  }, py::arg("config"), py::arg("seed") = py::none());

  m.def("run", [](const std::filesystem::path& config, std::optional<std::uint64_t> seed,
                  std::optional<std::filesystem::path> output_dir, unsigned threads) {
    RunOptions o{threads, output_dir.value_or(std::filesystem::path{}), output_dir.has_value()};
    const auto c = load_config(config, seed);
    nlohmann::json report;
    {
      py::gil_scoped_release release;
      report = run(c, o).report;
    }
    return to_py(report);
  }, py::arg("config"), py::arg("seed") = py::none(), py::arg("output_dir") = py::none(),
     py::arg("threads") = 0);
}
