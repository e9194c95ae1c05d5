// Command-line front end: one subcommand per pipeline stage plus `run`.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lcv/experiment.hpp"
#include "lcv/hybrid_oracle.hpp"

namespace {

constexpr int kVerificationFailed = 2;

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("LCV_SEED");
  if (!s || !*s) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != std::string(s).size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw lcv::Error(std::string("LCV_SEED is not an unsigned integer: '") + s + "'");
  }
}

void write_or_print(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw lcv::Error("cannot write " + path);
  out << content;
}

lcv::TraceSet load_traces(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw lcv::Error("cannot open traces " + path);
  return lcv::read_traces_csv(in);
}

lcv::Slca load_slca(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw lcv::Error("cannot open abstraction " + path);
  return lcv::read_slca(in);
}

nlohmann::json verify_all(const lcv::Slca& slca, const std::vector<std::string>& properties, bool& all_hold) {
  auto out = nlohmann::json::array();
  all_hold = true;
  for (const auto& p : properties) {
    const auto q = lcv::parse_property(p);
    const auto v = lcv::verify(slca, q);
    all_hold = all_hold && v.holds;
    out.push_back(lcv::verdict_json(slca, q, v));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven l-complete abstractions with PAC certificates"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (0 = all cores)");

  std::string config_path, output_dir, output, traces_path, slca_path, cert_path, dot_path;
  std::size_t l = 0;
  double beta = 1e-12;
  std::string solver = "wait-and-judge";
  bool no_complete = false;
  std::vector<std::string> properties;
  std::string lambda = "1/100", csv_path;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Run a configured experiment end to end");
  run->add_option("config", config_path, "Experiment config (INI)")->required()->check(CLI::ExistingFile);
  run->add_option("--output-dir", output_dir, "Base directory for relative output paths");
  run->add_flag("--quiet", quiet, "Do not print the report");

  auto* sample = app.add_subcommand("sample", "Sample traces from a configured system");
  sample->add_option("config", config_path, "Experiment config (INI)")->required()->check(CLI::ExistingFile);
  sample->add_option("-o,--output", output, "Trace CSV (default stdout)");

  auto* abstract = app.add_subcommand("abstract", "Build the abstraction of a trace file");
  abstract->add_option("traces", traces_path, "Trace CSV")->required()->check(CLI::ExistingFile);
  abstract->add_option("--l", l, "Window length")->required();
  abstract->add_flag("--no-complete", no_complete, "Skip domino completion");
  abstract->add_option("-o,--output", output, "Abstraction file (default stdout)");
  abstract->add_option("--dot", dot_path, "Also write Graphviz DOT");

  auto* certify = app.add_subcommand("certify", "Scenario certificate of a trace file");
  certify->add_option("traces", traces_path, "Trace CSV")->required()->check(CLI::ExistingFile);
  certify->add_option("--l", l, "Window length")->required();
  certify->add_option("--beta", beta, "Confidence parameter");
  certify->add_option("--solver", solver, "wait-and-judge or non-convex-general");
  certify->add_option("-o,--output", output, "Certificate JSON (default stdout)");

  auto* verify = app.add_subcommand("verify", "Check properties on an abstraction file");
  verify->add_option("slca", slca_path, "Abstraction file")->required()->check(CLI::ExistingFile);
  verify->add_option("--property", properties, "invariance:BAD,... or reach-stay:TARGET,.../BAD,...")
      ->required();

  auto* report = app.add_subcommand("report", "Assemble a report from stage artifacts");
  report->add_option("--traces", traces_path, "Trace CSV")->required()->check(CLI::ExistingFile);
  report->add_option("--slca", slca_path, "Abstraction file")->required()->check(CLI::ExistingFile);
  report->add_option("--certificate", cert_path, "Certificate JSON")->required()->check(CLI::ExistingFile);
  report->add_option("--property", properties, "Properties to verify");
  report->add_option("-o,--output", output, "Report JSON (default stdout)");

  auto* oracle = app.add_subcommand("oracle", "Exact class probabilities of the hybrid benchmark");
  oracle->add_option("--lambda", lambda, "Switching threshold as p/q");
  oracle->add_option("--l", l, "Word length (1 or 2)")->required();
  oracle->add_option("--csv", csv_path, "Write class intervals as CSV");
  oracle->add_option("-o,--output", output, "JSON output (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto config = lcv::load_config(config_path, env_seed());
      auto result = lcv::run(config, {threads, output_dir, true});
      if (!quiet) std::cout << lcv::dump_report(result.report);
      return result.all_hold ? 0 : kVerificationFailed;
    }
    if (*sample) {
      const auto config = lcv::load_config(config_path, env_seed());
      const auto built = lcv::build_system(config);
      const auto traces = lcv::sample_traces(built.system, built.partition, built.initial, config.n,
                                             config.horizon, config.seed, threads);
      std::ostringstream csv;
      lcv::write_traces_csv(csv, traces);
      write_or_print(output, csv.str());
      return 0;
    }
    if (*abstract) {
      const auto traces = load_traces(traces_path);
      auto slca = lcv::build_slca(traces, l);
      if (!no_complete) slca = lcv::domino_complete(slca);
      write_or_print(output, lcv::slca_text(slca));
      if (!dot_path.empty()) write_or_print(dot_path, lcv::to_dot(slca));
      return 0;
    }
    if (*certify) {
      const auto traces = load_traces(traces_path);
      const nlohmann::json cert = lcv::certify(traces, l, beta, lcv::parse_epsilon_strategy(solver));
      write_or_print(output, cert.dump(2) + "\n");
      return 0;
    }
    if (*verify) {
      const auto slca = load_slca(slca_path);
      bool all_hold = true;
      const auto verdicts = verify_all(slca, properties, all_hold);
      std::cout << verdicts.dump(2) << "\n";
      return all_hold ? 0 : kVerificationFailed;
    }
    if (*report) {
      const auto traces = load_traces(traces_path);
      const auto slca = load_slca(slca_path);
      std::ifstream in(cert_path);
      const auto cert = nlohmann::json::parse(in).get<lcv::Certificate>();
      if (cert.l != slca.window_length())
        throw lcv::Error("certificate window length " + std::to_string(cert.l) +
                         " differs from the abstraction's " + std::to_string(slca.window_length()));
      if (cert.n != traces.size() || cert.horizon != traces.horizon())
        throw lcv::Error("certificate does not match the trace file (N or H differ)");
      std::size_t uncovered = 0;
      for (const auto& t : traces.traces())
        if (!lcv::includes_trace(slca, t)) ++uncovered;
      bool all_hold = true;
      nlohmann::json out;
      out["schema_version"] = 1;
      out["traces"] = {{"N", traces.size()}, {"H", traces.horizon()}, {"seed", traces.provenance().seed},
                       {"system", traces.provenance().system}};
      out["abstraction"] = {{"l", slca.window_length()},
                            {"states", slca.state_count()},
                            {"edges", slca.edge_count()},
                            {"added_by_completion", slca.added_count()},
                            {"deterministic", lcv::is_deterministic(slca)},
                            {"non_blocking", lcv::is_non_blocking(slca)},
                            {"traces_not_included", uncovered}};
      out["certificate"] = cert;
      out["verification"] = verify_all(slca, properties, all_hold);
      out["all_hold"] = all_hold;
      write_or_print(output, lcv::dump_report(out));
      return all_hold ? 0 : kVerificationFailed;
    }
    if (*oracle) {
      const auto geometry = lcv::hybrid_pre_analysis(lcv::parse_rational(lambda), l);
      if (!csv_path.empty()) {
        std::ostringstream csv;
        lcv::write_intervals_csv(csv, geometry);
        write_or_print(csv_path, csv.str());
      }
      const nlohmann::json j = geometry;
      write_or_print(output, j.dump(2) + "\n");
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "lcv: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
