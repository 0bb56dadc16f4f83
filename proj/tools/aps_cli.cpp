// aps: batch simulation, model fitting, corpus analysis and the session server.

#include <aps/aps.hpp>
#include <aps/http_service.hpp>
#include <aps/io.hpp>
#include <aps/session.hpp>

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <iostream>

namespace {

using namespace aps;

std::vector<std::size_t> parse_counts(const std::string& s) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    auto tok = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!tok.empty()) out.push_back(std::stoul(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<PreferenceRelation> load_rankings(const std::string& path) {
  std::vector<PreferenceRelation> out;
  if (path.empty()) return out;
  for (auto& [p, r] : parse_rankings(read_file(path), path)) out.push_back(std::move(r));
  return out;
}

void emit(const std::string& path, const Json& j) {
  if (path.empty() || path == "-") std::cout << j.dump(2) << "\n";
  else write_file(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

struct SimulateOpts {
  std::string graph, mixtures, rankings, trees, out, label;
  std::vector<std::string> arms{"advanced", "baseline"};
  std::size_t trials = 100;
  std::size_t simulations = 1000;
  std::uint64_t seed = 0;
  bool literal = false;
};

int cmd_simulate(const SimulateOpts& o) {
  auto graph = std::make_shared<const ArgumentGraph>(load_graph(o.graph));
  std::map<ArgumentId, BetaMixture> bundle;
  if (!o.mixtures.empty()) bundle = load_mixture_bundle(o.mixtures);
  std::vector<ArgumentId> missing;
  auto mixtures = mixtures_for(*graph, bundle, &missing);
  if (!o.mixtures.empty() && !missing.empty())
    std::cerr << "note: " << missing.size() << " argument(s) without a fitted mixture use B(1,1)\n";
  const auto rankings = load_rankings(o.rankings);
  std::shared_ptr<const ConcernContext> ctx;
  if (!o.trees.empty()) ctx = std::make_shared<const ConcernContext>(ConcernContext::from_trees(*graph, load_tree_bundle(o.trees), UserProfile{}, rankings));
  else if (!rankings.empty()) ctx = std::make_shared<const ConcernContext>(ConcernContext::from_population(*graph, rankings));
  else ctx = std::make_shared<const ConcernContext>(ConcernContext::from_scores(*graph, {}));

  SimulationPlan plan;
  plan.graph = graph;
  plan.graph_label = o.label.empty() ? std::filesystem::path(o.graph).stem().string() : o.label;
  plan.context = ctx;
  plan.population = std::make_shared<const PopulationUserSampler>(*graph, ctx, mixtures, rankings);
  plan.trials = o.trials;
  plan.seed = o.seed;
  plan.propagation = o.literal ? PropagationMode::LiteralDefinition : PropagationMode::ExampleFaithful;
  for (const auto& name : o.arms) {
    if (name == "advanced") {
      auto users = plan.population;
      StrategyConfig sc;
      sc.simulations = o.simulations;
      sc.propagation = plan.propagation;
      plan.arms.push_back({name, [users, ctx, sc](std::uint64_t seed) mutable -> std::unique_ptr<Strategy> {
                             sc.seed = seed;
                             return std::make_unique<MctsStrategist>(users, ctx, sc);
                           }});
    } else if (name == "baseline") {
      plan.arms.push_back({name, [](std::uint64_t seed) -> std::unique_ptr<Strategy> { return std::make_unique<BaselineStrategist>(seed); }});
    } else {
      throw Error("unknown arm '" + name + "' (expected advanced or baseline)");
    }
  }

  const auto results = run_simulation(plan);
  std::vector<TrialRecord> all;
  for (const auto& r : results) {
    std::printf("%-10s trials %zu  mean reward %.4f\n", r.name.c_str(), r.records.size(), r.mean_reward);
    all.insert(all.end(), r.records.begin(), r.records.end());
  }
  for (const auto& r : results) {
    std::printf("\n[%s]\n", r.name.c_str());
    std::cout << render_structural_table(structural_table(r.records, plan.graph_label), "Graph " + plan.graph_label);
    const auto rows = breakdown(r.records, plan.graph_label);
    std::cout << "\n" << render_change_table(rows) << "\n" << render_average_table(rows);
  }
  if (!o.out.empty()) emit(o.out, corpus_to_json(all));
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_fit(const std::string& beliefs, const std::string& counts, std::uint64_t seed, std::size_t restarts,
            const std::string& out) {
  const auto data = parse_belief_dataset(read_file(beliefs), beliefs);
  const auto candidates = parse_counts(counts);
  if (candidates.empty()) throw Error("no candidate component counts");
  Rng rng(seed);
  EmConfig em;
  em.restarts = restarts;
  std::map<ArgumentId, BetaMixture> bundle;
  for (const auto& [id, xs] : data) {
    try {
      auto sel = select_component_count(xs, candidates, rng, em);
      const auto& fit = sel.chosen();
      bundle.emplace(id, fit.mixture);
      std::fprintf(stderr, "%-16s n=%-5zu components=%zu\n", id.c_str(), xs.size(), sel.count);
    } catch (const EstimationError& e) {
      std::fprintf(stderr, "%-16s n=%-5zu skipped: %s\n", id.c_str(), xs.size(), e.what());
    }
  }
  emit(out, mixture_bundle_to_json(bundle));
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_train_trees(const std::string& rankings, const std::string& profiles, const std::string& depths,
                    const std::string& leaves, std::size_t folds, const std::string& out) {
  const auto ranks = parse_rankings(read_file(rankings), rankings);
  const auto profs = parse_profiles(read_file(profiles), profiles);
  std::vector<ProfiledRanking> data;
  for (const auto& [pid, r] : ranks) {
    auto it = profs.find(pid);
    if (it == profs.end()) {
      std::cerr << "note: participant " << pid << " has no profile, skipped\n";
      continue;
    }
    data.push_back({it->second, r});
  }
  if (data.empty()) throw Error("no participant has both a ranking and a profile");
  TreeTrainingConfig cfg;
  cfg.depth_grid = parse_counts(depths);
  cfg.min_leaf_grid = parse_counts(leaves);
  cfg.folds = folds;
  const auto bundle = train_tree_bundle(data, cfg);
  std::fprintf(stderr, "trained %zu tree(s) from %zu participant(s)\n", bundle.size(), data.size());
  emit(out, tree_bundle_to_json(bundle));
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_analyze(const std::vector<std::string>& corpora, const std::vector<std::string>& graph_specs,
                const std::string& primary, const std::string& json_out) {
  std::map<std::string, std::shared_ptr<const ArgumentGraph>> graphs;
  for (const auto& spec : graph_specs) {
    auto eq = spec.find('=');
    if (eq == std::string::npos) throw Error("--graph expects label=path, got '" + spec + "'");
    graphs[spec.substr(0, eq)] = std::make_shared<const ArgumentGraph>(load_graph(spec.substr(eq + 1)));
  }
  std::vector<TrialRecord> records;
  for (const auto& path : corpora) {
    const auto text = read_file(path);
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw FormatError(path, 0, e.what());
    }
    auto rs = corpus_from_json(j, graphs, path);
    records.insert(records.end(), rs.begin(), rs.end());
  }
  std::string label = primary;
  if (label.empty() && !records.empty()) label = records.front().graph;
  std::cout << "dialogues: " << records.size() << "\n\n";
  std::cout << render_structural_table(structural_table(records, label), label.empty() ? "Primary graph" : "Graph " + label);
  const auto rows = breakdown(records, label);
  std::cout << "\n" << render_change_table(rows) << "\n" << render_average_table(rows);
  if (!json_out.empty()) emit(json_out, analytics_summary(records, label));
  return 0;
}

// ---------------------------------------------------------------------------

httplib::Server* running_server = nullptr;

int cmd_serve(const std::string& config_path, int port, const std::string& graph_dir, const std::string& store,
              std::size_t simulations) {
  auto cfg = load_service_config(config_path.empty() ? std::nullopt : std::optional<std::filesystem::path>(config_path));
  if (port > 0) cfg.port = port;
  if (!graph_dir.empty()) cfg.graph_dir = graph_dir;
  if (!store.empty()) cfg.store = store;
  if (simulations > 0) cfg.session.simulations = simulations;
  auto registry = load_registry(cfg);
  SessionManager sessions(registry, make_store(cfg.store), cfg.session);
  sessions.purge_expired();
  httplib::Server server;
  register_routes(server, sessions);
  running_server = &server;
  std::signal(SIGINT, [](int) {
    if (running_server) running_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (running_server) running_server->stop();
  });
  std::cerr << "listening on " << cfg.host << ":" << cfg.port << " (" << registry->topics().size() << " topic(s))\n";
  if (!server.listen(cfg.host, cfg.port)) {
    std::cerr << "error: cannot listen on " << cfg.host << ":" << cfg.port << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Automated persuasion engine"};
  app.set_config("--config-file", "", "TOML/INI file with option values");
  app.require_subcommand(1);
  std::uint64_t seed = 0;

  SimulateOpts sim;
  auto* simulate = app.add_subcommand("simulate", "Compare strategies against simulated users");
  simulate->add_option("--graph", sim.graph, "Argument graph file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--mixtures", sim.mixtures, "Mixture bundle (arguments without one use B(1,1))")->check(CLI::ExistingFile);
  simulate->add_option("--rankings", sim.rankings, "Preference rankings CSV")->check(CLI::ExistingFile);
  simulate->add_option("--trees", sim.trees, "Preference tree bundle")->check(CLI::ExistingFile);
  simulate->add_option("--arms", sim.arms, "Strategies to compare")->delimiter(',');
  simulate->add_option("--trials", sim.trials, "Trials per arm")->check(CLI::PositiveNumber);
  simulate->add_option("--simulations", sim.simulations, "MCTS simulations per move")->check(CLI::PositiveNumber);
  simulate->add_option("--label", sim.label, "Graph label in the corpus (default: file stem)");
  simulate->add_flag("--literal", sim.literal, "Use the literal propagation definition");
  simulate->add_option("--out", sim.out, "Write the trial corpus (JSON)");
  simulate->add_option("--seed", seed, "Master seed");

  std::string fit_beliefs, fit_counts = "1,2,3", fit_out = "-";
  std::size_t fit_restarts = 8;
  auto* fit = app.add_subcommand("fit", "Fit a beta mixture per argument");
  fit->add_option("--beliefs", fit_beliefs, "CSV of (argument-id, participant-id, slider -5..5)")->required()->check(CLI::ExistingFile);
  fit->add_option("--counts", fit_counts, "Candidate component counts");
  fit->add_option("--restarts", fit_restarts, "EM restarts per count")->check(CLI::PositiveNumber);
  fit->add_option("--out", fit_out, "Mixture bundle output (- for stdout)");
  fit->add_option("--seed", seed, "Seed for EM restarts");

  std::string tr_rankings, tr_profiles, tr_depths = "1,2,3,4", tr_leaves = "1,5,10", tr_out = "-";
  std::size_t tr_folds = 5;
  auto* train = app.add_subcommand("train-trees", "Train one preference tree per concern pair");
  train->add_option("--rankings", tr_rankings, "CSV of (participant-id, concern, rank)")->required()->check(CLI::ExistingFile);
  train->add_option("--profiles", tr_profiles, "CSV of participant profiles")->required()->check(CLI::ExistingFile);
  train->add_option("--depths", tr_depths, "Depth grid");
  train->add_option("--min-leaf", tr_leaves, "Minimum leaf size grid");
  train->add_option("--folds", tr_folds, "Cross-validation folds")->check(CLI::Range(2, 100));
  train->add_option("--out", tr_out, "Tree bundle output (- for stdout)");
  train->add_option("--seed", seed, "Unused; accepted for uniformity");

  std::vector<std::string> an_corpora, an_graphs;
  std::string an_primary, an_json;
  auto* analyze = app.add_subcommand("analyze", "Structure and belief-change tables for a corpus");
  analyze->add_option("corpus", an_corpora, "Corpus files")->check(CLI::ExistingFile);
  analyze->add_option("--graph", an_graphs, "label=path, to classify records that carry only a transcript");
  analyze->add_option("--primary", an_primary, "Graph label counted in the graph column");
  analyze->add_option("--json", an_json, "Write a machine-readable summary");
  analyze->add_option("--seed", seed, "Unused; accepted for uniformity");

  std::string sv_config, sv_graph_dir, sv_store;
  int sv_port = 0;
  std::size_t sv_sims = 0;
  auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
  serve->add_option("--config", sv_config, "Service config (YAML or JSON)")->check(CLI::ExistingFile);
  serve->add_option("--port", sv_port, "Port (overrides config and APS_PORT)");
  serve->add_option("--graph-dir", sv_graph_dir, "Directory of graph files");
  serve->add_option("--store", sv_store, "\"memory\" or a SQLite file");
  serve->add_option("--simulations", sv_sims, "MCTS simulations per move");
  serve->add_option("--seed", seed, "Unused; sessions carry their own seeds");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      sim.seed = seed;
      return cmd_simulate(sim);
    }
    if (*fit) return cmd_fit(fit_beliefs, fit_counts, seed, fit_restarts, fit_out);
    if (*train) return cmd_train_trees(tr_rankings, tr_profiles, tr_depths, tr_leaves, tr_folds, tr_out);
    if (*analyze) return cmd_analyze(an_corpora, an_graphs, an_primary, an_json);
    if (*serve) return cmd_serve(sv_config, sv_port, sv_graph_dir, sv_store, sv_sims);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
