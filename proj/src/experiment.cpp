#include "lcv/experiment.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "lcv/hybrid_oracle.hpp"

namespace lcv {

namespace pt = boost::property_tree;

PropertyQuery parse_property(std::string_view text) {
  PropertyQuery q;
  q.text = std::string(text);
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw Error("property '" + q.text + "' lacks a ':'");
  const auto kind = boost::trim_copy(std::string(text.substr(0, colon)));
  const auto body = boost::trim_copy(std::string(text.substr(colon + 1)));
  auto symbols = [](const std::string& list) {
    std::vector<std::string> out;
    if (boost::trim_copy(list).empty()) return out;
    boost::split(out, list, boost::is_any_of(","));
    for (auto& s : out) {
      boost::trim(s);
      if (s.empty()) throw Error("empty symbol in property list");
      s = internal_name(s);
    }
    return out;
  };
  if (kind == "invariance") {
    q.kind = PropertyQuery::Kind::Invariance;
    q.bad = symbols(body);
    if (q.bad.empty()) throw Error("invariance property needs at least one bad symbol");
  } else if (kind == "reach-stay") {
    q.kind = PropertyQuery::Kind::ReachStay;
    const auto slash = body.find('/');
    q.target = symbols(body.substr(0, slash));
    if (slash != std::string::npos) q.bad = symbols(body.substr(slash + 1));
    if (q.target.empty()) throw Error("reach-stay property needs a target");
  } else {
    throw Error("unknown property kind '" + kind + "'");
  }
  return q;
}

namespace {

std::set<SymbolId> resolve(const Alphabet& alphabet, const std::vector<std::string>& names) {
  std::set<SymbolId> out;
  for (const auto& n : names)
    if (auto id = alphabet.find(n)) out.insert(*id);
  return out;
}

nlohmann::json lasso_json(const Slca& slca, const Lasso& lasso) {
  auto words = [&](const std::vector<std::size_t>& path) {
    auto arr = nlohmann::json::array();
    for (auto s : path) arr.push_back(format_word(slca.state(s).word(), slca.alphabet(), " "));
    return arr;
  };
  return {{"stem", words(lasso.stem)}, {"cycle", words(lasso.cycle)}};
}

}  // namespace

VerificationVerdict verify(const Slca& slca, const PropertyQuery& query) {
  const auto bad = resolve(slca.alphabet(), query.bad);
  if (query.kind == PropertyQuery::Kind::Invariance) return verify_invariance(slca, bad);
  return verify_reach_stay(slca, resolve(slca.alphabet(), query.target), bad);
}

nlohmann::json verdict_json(const Slca& slca, const PropertyQuery& query,
                            const VerificationVerdict& verdict) {
  nlohmann::json j{{"property", query.text}, {"holds", verdict.holds}, {"explanation", verdict.explanation}};
  if (verdict.witness) j["witness"] = lasso_json(slca, *verdict.witness);
  return j;
}

std::string to_string(HorizonStrategy s) {
  switch (s) {
    case HorizonStrategy::None: return "none";
    case HorizonStrategy::AffinePhi: return "affine_phi";
    case HorizonStrategy::Bisimulation: return "bisimulation";
    case HorizonStrategy::Oracle1d: return "oracle_1d";
  }
  return "unknown";
}

namespace {

HorizonStrategy parse_strategy(const std::string& s) {
  if (s == "none") return HorizonStrategy::None;
  if (s == "affine_phi") return HorizonStrategy::AffinePhi;
  if (s == "bisimulation") return HorizonStrategy::Bisimulation;
  if (s == "oracle_1d") return HorizonStrategy::Oracle1d;
  throw Error("unknown infinite-horizon strategy '" + s + "'");
}

double parse_number(const std::string& text) {
  const auto t = boost::trim_copy(text);
  if (t.find('/') != std::string::npos) return parse_rational(t).convert_to<double>();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != t.size()) throw Error("not a number: '" + t + "'");
  return v;
}

std::vector<std::string> tokens(const std::string& text, const char* separators = " \t") {
  std::vector<std::string> out;
  const auto t = boost::trim_copy(text);
  if (t.empty()) return out;
  boost::split(out, t, boost::is_any_of(separators), boost::token_compress_on);
  return out;
}

Eigen::VectorXd parse_vector(const std::string& text) {
  const auto parts = tokens(text);
  Eigen::VectorXd v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_number(parts[i]);
  return v;
}

Eigen::MatrixXd parse_matrix(const std::string& text) {
  std::vector<std::string> rows;
  boost::split(rows, text, boost::is_any_of(";"));
  std::vector<Eigen::VectorXd> parsed;
  for (const auto& r : rows) parsed.push_back(parse_vector(r));
  if (parsed.empty() || parsed[0].size() == 0) throw Error("empty matrix");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(parsed.size()), parsed[0].size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    if (parsed[i].size() != m.cols()) throw Error("matrix rows differ in length");
    m.row(static_cast<Eigen::Index>(i)) = parsed[i].transpose();
  }
  return m;
}

std::vector<Cell> parse_cells(const std::string& text) {
  std::vector<Cell> out;
  for (const auto& t : tokens(text)) {
    std::vector<std::string> xy;
    boost::split(xy, t, boost::is_any_of(","));
    if (xy.size() != 2) throw Error("cell must be written x,y: '" + t + "'");
    out.push_back({std::stoi(xy[0]), std::stoi(xy[1])});
  }
  return out;
}

std::uint64_t parse_u64(const std::string& text) {
  const auto t = boost::trim_copy(text);
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
    throw Error("not a non-negative integer: '" + t + "'");
  return std::stoull(t);
}

// Size-like values may be written as 1e4.
std::size_t parse_count(const std::string& text) {
  const double v = parse_number(text);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) throw Error("not a count: '" + text + "'");
  return static_cast<std::size_t>(v);
}

class Section {
 public:
  Section(pt::ptree& root, const std::string& name) : name_(name) {
    if (auto child = root.get_child_optional(name)) tree_ = &*child;
  }
  bool present() const { return tree_ != nullptr; }
  std::optional<std::string> get(const std::string& key) const {
    if (!tree_) return std::nullopt;
    if (auto v = tree_->get_optional<std::string>(pt::ptree::path_type(key, '\0')))
      return boost::trim_copy(*v);
    return std::nullopt;
  }
  std::string require(const std::string& key) const {
    auto v = get(key);
    if (!v) throw Error("config: missing [" + name_ + "] " + key);
    return *v;
  }
  std::string get_or(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
  }

 private:
  std::string name_;
  pt::ptree* tree_ = nullptr;
};

}  // namespace

ExperimentConfig parse_config(std::istream& in, std::optional<std::uint64_t> seed_override) {
  pt::ptree root;
  try {
    pt::ini_parser::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw Error(std::string("config: ") + e.what());
  }
  if (seed_override) root.put(pt::ptree::path_type("sampling.seed", '.'), std::to_string(*seed_override));

  ExperimentConfig c;
  Section experiment(root, "experiment"), system(root, "system"), partition(root, "partition"),
      distribution(root, "distribution"), training(root, "training"), sampling(root, "sampling"),
      certificate(root, "certificate"), verification(root, "verification"),
      horizon(root, "infinite_horizon"), validation(root, "validation"), output(root, "output");

  c.name = experiment.get_or("name", c.name);

  c.system_type = system.require("type");
  if (c.system_type == "affine") {
    c.a = parse_matrix(system.require("a"));
    c.equilibrium = system.get("equilibrium") ? parse_vector(*system.get("equilibrium"))
                                              : Eigen::VectorXd::Zero(c.a.rows());
    c.domain = Box{parse_vector(system.require("lower")), parse_vector(system.require("upper"))};
  } else if (c.system_type == "hybrid1d") {
    c.lambda_text = system.get_or("lambda", c.lambda_text);
    parse_rational(c.lambda_text);
    c.domain = Box{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)};
  } else if (c.system_type == "gridworld") {
    c.grid_size = static_cast<int>(parse_count(system.get_or("size", "10")));
    c.obstacles = parse_cells(system.get_or("obstacles", ""));
    c.targets = parse_cells(system.require("targets"));
    c.domain = Box{Eigen::Vector2d::Zero(), Eigen::Vector2d::Constant(c.grid_size)};
  } else {
    throw Error("config: unknown system type '" + c.system_type + "'");
  }

  const std::string default_partition = c.system_type == "affine"     ? "uniform_grid"
                                        : c.system_type == "hybrid1d" ? "dyadic"
                                                                      : "regions";
  c.partition_type = partition.get_or("type", default_partition);
  if (c.partition_type == "uniform_grid") {
    for (const auto& t : tokens(partition.require("cells"))) c.cells_per_axis.push_back(parse_count(t));
  } else if (c.partition_type != "dyadic" && c.partition_type != "regions") {
    throw Error("config: unknown partition type '" + c.partition_type + "'");
  }

  if (auto lo = distribution.get("lower")) c.initial_box = Box{parse_vector(*lo), parse_vector(distribution.require("upper"))};

  if (auto v = training.get("episodes")) c.training.episodes = parse_count(*v);
  if (auto v = training.get("max_steps")) c.training.max_steps = parse_count(*v);
  if (auto v = training.get("learning_rate")) c.training.learning_rate = parse_number(*v);
  if (auto v = training.get("discount")) c.training.discount = parse_number(*v);
  if (auto v = training.get("exploration")) c.training.exploration = parse_number(*v);
  if (auto v = training.get("success_rollouts")) c.success_rollouts = parse_count(*v);

  c.n = parse_count(sampling.require("N"));
  c.horizon = parse_count(sampling.require("H"));
  c.l = parse_count(sampling.require("l"));
  c.seed = parse_u64(sampling.get_or("seed", "0"));
  c.training_seed = training.get("seed") ? parse_u64(*training.get("seed")) : c.seed;
  if (c.n == 0) throw Error("config: N must be positive");
  if (c.l == 0 || c.l > c.horizon) throw Error("config: need 1 <= l <= H");

  c.beta = parse_number(certificate.get_or("beta", "1e-12"));
  if (!(c.beta > 0.0 && c.beta < 1.0)) throw Error("config: beta must lie in (0, 1)");
  c.solver = parse_epsilon_strategy(certificate.get_or("solver", "wait-and-judge"));

  if (auto props = verification.get("properties")) {
    for (const auto& p : tokens(*props, ";"))
      if (!boost::trim_copy(p).empty()) c.properties.push_back(parse_property(boost::trim_copy(p)));
  }

  c.strategy = parse_strategy(horizon.get_or("strategy", "none"));
  if (auto v = horizon.get("alpha")) c.alpha = parse_number(*v);
  if (auto v = horizon.get("rho")) c.rho = parse_number(*v);
  if (auto v = horizon.get("d_min")) c.d_min = parse_number(*v);
  if (auto v = horizon.get("d_max")) {
    if (*v == "euclidean" || *v == "chebyshev")
      c.d_max_norm = *v;
    else
      c.d_max = parse_number(*v);
  }
  if (c.strategy == HorizonStrategy::AffinePhi && c.system_type != "affine" &&
      !(c.alpha && c.rho && c.d_min && c.d_max))
    throw Error("config: affine_phi on a non-affine system needs alpha, rho, d_min and d_max");
  if (c.strategy == HorizonStrategy::Oracle1d && c.system_type != "hybrid1d")
    throw Error("config: oracle_1d applies to the hybrid1d system only");

  c.fresh_n = parse_count(validation.get_or("N", "0"));
  c.fresh_seed = validation.get("seed") ? parse_u64(*validation.get("seed")) : c.seed + 1;

  c.report_path = output.get_or("report", "");
  c.dot_path = output.get_or("dot", "");
  c.slca_path = output.get_or("slca", "");
  c.traces_path = output.get_or("traces", "");
  c.intervals_path = output.get_or("intervals", "");

  c.echo = nlohmann::json::object();
  for (const auto& [section, tree] : root) {
    auto obj = nlohmann::json::object();
    for (const auto& [key, value] : tree) obj[key] = boost::trim_copy(value.data());
    c.echo[section] = obj;
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  return parse_config(in, seed_override);
}

BuiltSystem build_system(const ExperimentConfig& c) {
  if (c.system_type == "affine") {
    auto system = make_affine(c.a, c.equilibrium, c.domain);
    if (c.partition_type != "uniform_grid") throw Error("affine systems use a uniform_grid partition");
    auto partition = make_uniform_grid_partition(c.domain, c.cells_per_axis);
    return {std::move(system), std::move(partition), UniformBox{c.initial_box.value_or(c.domain), {}}, {}};
  }
  if (c.system_type == "hybrid1d") {
    auto system = make_hybrid1d(parse_rational(c.lambda_text).convert_to<double>());
    if (c.partition_type != "dyadic") throw Error("the hybrid system uses the dyadic partition");
    return {std::move(system), make_dyadic_partition(), UniformBox{c.initial_box.value_or(c.domain), {}}, {}};
  }
  GridWorld world(c.grid_size, c.obstacles, c.targets);
  auto policy = train_gridworld_policy(world, c.training, c.training_seed);
  const double success = policy_success_rate(world, policy, c.success_rollouts, c.horizon, c.training_seed + 1);
  auto partition = make_region_partition(world);
  auto initial = c.initial_box ? UniformBox{*c.initial_box, {}} : free_cell_distribution(world);
  return {make_gridworld(std::move(world), std::move(policy)), std::move(partition), std::move(initial), success};
}

std::string dump_report(const nlohmann::json& report) { return report.dump(2) + "\n"; }

std::string slca_text(const Slca& slca) {
  std::ostringstream out;
  write_slca(out, slca);
  return out.str();
}

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
auto stage(const char* name, nlohmann::json& timing, F&& f) {
  const auto start = Clock::now();
  try {
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      timing[name] = std::chrono::duration<double>(Clock::now() - start).count();
    } else {
      auto result = f();
      timing[name] = std::chrono::duration<double>(Clock::now() - start).count();
      return result;
    }
  } catch (const std::exception& e) {
    throw Error(std::string("stage '") + name + "': " + e.what());
  }
}

void write_file(const std::filesystem::path& base, const std::string& rel, const std::string& content) {
  if (rel.empty()) return;
  auto path = std::filesystem::path(rel);
  if (path.is_relative() && !base.empty()) path = base / path;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

nlohmann::json slca_summary(const Slca& s) {
  return {{"states", s.state_count()},
          {"edges", s.edge_count()},
          {"added_by_completion", s.added_count()},
          {"deterministic", is_deterministic(s)},
          {"non_blocking", is_non_blocking(s)}};
}

}  // namespace

RunResult run(const ExperimentConfig& c, const RunOptions& options) {
  nlohmann::json timing = nlohmann::json::object();
  nlohmann::json report;
  report["schema_version"] = 1;
  report["name"] = c.name;
  report["config"] = c.echo;

  auto built = stage("system", timing, [&] { return build_system(c); });
  if (built.policy_success)
    report["training"] = {{"success_rate", *built.policy_success}, {"rollouts", c.success_rollouts}};

  auto traces = stage("sampling", timing, [&] {
    return sample_traces(built.system, built.partition, built.initial, c.n, c.horizon, c.seed, options.threads);
  });
  auto alphabet_names = nlohmann::json::array();
  for (std::size_t i = 0; i < traces.alphabet().size(); ++i)
    alphabet_names.push_back(external_name(traces.alphabet(), SymbolId(static_cast<std::uint32_t>(i))));
  report["traces"] = {{"N", traces.size()},
                      {"H", traces.horizon()},
                      {"seed", c.seed},
                      {"system", traces.provenance().system},
                      {"alphabet", alphabet_names},
                      {"dagger_seen", traces.alphabet().dagger().has_value()}};

  auto witnessed = stage("abstraction", timing, [&] { return build_slca(traces, c.l); });
  auto completed = stage("completion", timing, [&] { return domino_complete(witnessed); });
  report["abstraction"] = {{"l", c.l}, {"witnessed", slca_summary(witnessed)}, {"completed", slca_summary(completed)}};

  auto cert = stage("certificate", timing, [&] { return certify(traces, c.l, c.beta, c.solver); });

  nlohmann::json horizon{{"strategy", to_string(c.strategy)}};
  stage("infinite_horizon", timing, [&] {
    const std::size_t k = c.horizon - c.l;
    horizon["k"] = k;
    switch (c.strategy) {
      case HorizonStrategy::None: break;
      case HorizonStrategy::AffinePhi: {
        AffineBoundParams p;
        nlohmann::json derived;
        if (c.system_type == "affine") {
          const auto& eq = c.equilibrium;
          const auto cell = grid_cell(UniformGrid{c.domain, c.cells_per_axis}, eq);
          p.alpha = spectral_norm(c.a);
          p.rho = inverse_det_abs(c.a);
          p.d_min = inscribed_radius(cell, eq);
          const double euclid = circumscribed_radius(c.domain, eq);
          const double cheb = circumscribed_radius_chebyshev(c.domain, eq);
          p.d_max = c.d_max_norm == "chebyshev" ? cheb : euclid;
          auto with = [&](double dmax) {
            auto q = p;
            q.d_max = dmax;
            if (c.d_min) q.d_min = *c.d_min;
            if (c.alpha) q.alpha = *c.alpha;
            return kbar(q);
          };
          derived = {{"alpha", p.alpha},
                     {"rho", p.rho},
                     {"d_min", p.d_min},
                     {"d_max_euclidean", euclid},
                     {"d_max_chebyshev", cheb},
                     {"k_bar_euclidean", with(euclid)},
                     {"k_bar_chebyshev", with(cheb)}};
        }
        if (c.alpha) p.alpha = *c.alpha;
        if (c.rho) p.rho = *c.rho;
        if (c.d_min) p.d_min = *c.d_min;
        if (c.d_max) p.d_max = *c.d_max;
        const auto profile = make_phi_profile(p);
        const double phi = phi_affine(profile, k);
        cert.attach_phi(phi);
        horizon["profile"] = profile;
        horizon["d_max_source"] = c.d_max ? "config" : c.d_max_norm;
        if (!derived.is_null()) horizon["derived"] = derived;
        horizon["phi"] = phi;
        horizon["gamma_bar"] = *cert.gamma_bar;
        break;
      }
      case HorizonStrategy::Bisimulation: {
        const auto verdict = check_bisim_extension(completed, c.horizon, c.l, completed.alphabet().size());
        horizon["verdict"] = to_string(verdict);
        horizon["bound"] = bisim_horizon_bound(completed.alphabet().size(), c.l);
        horizon["conditional_on"] = "the system admits a deterministic abstraction of this window length";
        if (verdict != BisimExtension::NotEstablished) {
          cert.attach_phi(1.0);
          horizon["gamma_bar"] = *cert.gamma_bar;
        }
        break;
      }
      case HorizonStrategy::Oracle1d: {
        const auto geometry = hybrid_pre_analysis(parse_rational(c.lambda_text), c.l);
        horizon["oracle"] = geometry;
        horizon["k_bar"] = geometry.k_bar_exact;
        // Past k_bar the finite-horizon measure equals the infinite one, so phi = 1.
        if (k >= geometry.k_bar_exact) {
          cert.attach_phi(1.0);
          horizon["phi"] = 1.0;
          horizon["gamma_bar"] = *cert.gamma_bar;
        } else {
          horizon["phi"] = nullptr;
          horizon["note"] = "H - l is below k_bar; no phi bound available";
        }
        if (!c.intervals_path.empty() && options.write_outputs) {
          std::ostringstream csv;
          write_intervals_csv(csv, geometry);
          write_file(options.output_dir, c.intervals_path, csv.str());
        }
        break;
      }
    }
  });
  report["certificate"] = cert;
  report["infinite_horizon"] = horizon;

  bool all_hold = true;
  auto verdicts = nlohmann::json::array();
  stage("verification", timing, [&] {
    for (const auto& q : c.properties) {
      const auto v = verify(completed, q);
      all_hold = all_hold && v.holds;
      verdicts.push_back(verdict_json(completed, q, v));
    }
  });
  report["verification"] = verdicts;
  report["all_hold"] = all_hold;

  if (c.fresh_n > 0) {
    stage("validation", timing, [&] {
      auto fresh = sample_traces(built.system, built.partition, built.initial, c.fresh_n, c.horizon,
                                 c.fresh_seed, options.threads);
      const double rate = empirical_violation(witnessed.states(), fresh, c.l, options.threads);
      report["validation"] = {{"N", c.fresh_n},
                              {"seed", c.fresh_seed},
                              {"violation_rate", rate},
                              {"measured_against", "witnessed states before completion"},
                              {"within_epsilon", rate <= cert.epsilon}};
    });
  }
  report["timing"] = timing;

  if (options.write_outputs) {
    write_file(options.output_dir, c.report_path, dump_report(report));
    if (!c.dot_path.empty()) write_file(options.output_dir, c.dot_path, to_dot(completed));
    if (!c.slca_path.empty()) write_file(options.output_dir, c.slca_path, slca_text(completed));
    if (!c.traces_path.empty()) {
      std::ostringstream csv;
      write_traces_csv(csv, traces);
      write_file(options.output_dir, c.traces_path, csv.str());
    }
  }
  return {std::move(report), std::move(traces), std::move(witnessed), std::move(completed), all_hold};
}

}  // namespace lcv
