#include "pm/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "pm/environments.hpp"
#include "pm/equilibrium.hpp"
#include "pm/fixtures.hpp"
#include "pm/format.hpp"
#include "pm/game.hpp"
#include "pm/metrics.hpp"

namespace pm {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of the first occurrence of "key" in the text, 0 when absent.
std::size_t line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

class ConfigReader {
 public:
  ConfigReader(const std::string& text, std::string origin) : text_(text), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(origin_, line_of_key(text_, key), what);
  }

  void only_keys(const json& obj, const std::string& block, std::set<std::string> allowed) const {
    if (!obj.is_object()) fail(block, "'" + block + "' must be an object");
    for (const auto& [k, v] : obj.items())
      if (!allowed.count(k)) fail(k, "unknown key '" + k + "' in " + block);
  }

  template <typename T>
  T get(const json& obj, const std::string& key) const {
    try {
      return obj.at(key).get<T>();
    } catch (const json::exception&) {
      fail(key, "'" + key + "' is missing or has the wrong type");
    }
  }

 private:
  const std::string& text_;
  std::string origin_;
};

TrainingConfig parse_training(const ConfigReader& r, const json& j, TrainingConfig c) {
  r.only_keys(j, "training method block",
              {"beta", "gamma", "lambda", "outer_rounds", "inner_epochs", "eval_budget",
               "learning_rate", "baseline_decay", "blend", "structured", "use_reinforce",
               "reinforce_samples", "seed"});
  if (j.contains("beta")) c.beta = r.get<double>(j, "beta");
  if (j.contains("gamma")) c.gamma = r.get<double>(j, "gamma");
  if (j.contains("lambda")) c.lambda = r.get<double>(j, "lambda");
  if (j.contains("outer_rounds")) c.outer_rounds = r.get<std::size_t>(j, "outer_rounds");
  if (j.contains("inner_epochs")) c.inner_epochs = r.get<std::size_t>(j, "inner_epochs");
  if (j.contains("eval_budget")) c.eval_budget = r.get<std::size_t>(j, "eval_budget");
  if (j.contains("learning_rate")) c.learning_rate = r.get<double>(j, "learning_rate");
  if (j.contains("baseline_decay")) c.baseline_decay = r.get<double>(j, "baseline_decay");
  if (j.contains("blend")) c.blend = r.get<double>(j, "blend");
  if (j.contains("structured")) c.structured = r.get<bool>(j, "structured");
  if (j.contains("use_reinforce")) c.use_reinforce = r.get<bool>(j, "use_reinforce");
  if (j.contains("reinforce_samples")) c.reinforce_samples = r.get<std::size_t>(j, "reinforce_samples");
  if (j.contains("seed")) c.seed = r.get<std::uint64_t>(j, "seed");
  try {
    c.validate();
  } catch (const MarketError& e) {
    r.fail("training", e.what());
  }
  return c;
}

std::vector<std::size_t> to_zero_based(const ConfigReader& r, const std::vector<std::size_t>& v,
                                       const std::string& key) {
  std::vector<std::size_t> out;
  for (std::size_t x : v) {
    if (x == 0) r.fail(key, "'" + key + "' uses 1-based indices; 0 is not valid");
    out.push_back(x - 1);
  }
  return out;
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw MarketError("cannot write " + path.string());
  f << content;
}

std::string profile_cell(const StrategyProfile& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ";";
    out += "g" + std::to_string(p[i] + 1);
  }
  return out;
}

std::string vector_cell(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ";";
    out += fmt_num(v[i]);
  }
  return out;
}

json profile_json(const StrategyProfile& p) {
  json a = json::array();
  for (ModelIndex g : p.choices) a.push_back(g + 1);
  return a;
}

std::string value_label(const json& v) {
  if (v.is_number()) return fmt_num(v.get<double>());
  if (v.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + value_label(v[i]);
    return out;
  }
  if (v.is_object()) {
    std::string out;
    for (const auto& [k, x] : v.items()) out += (out.empty() ? "" : ";") + k + "=" + value_label(x);
    return out;
  }
  return v.dump();
}

json pne_json(const GameSpec& spec, unsigned jobs) {
  try {
    json a = json::array();
    for (const auto& e : enumerate_pne(spec, {10'000'000, jobs}))
      a.push_back({{"profile", profile_json(e.profile)},
                   {"class", to_string(e.classification.label)},
                   {"distinct", e.classification.distinct_count}});
    return a;
  } catch (const BudgetExceededError& e) {
    return {{"skipped", true}, {"required_profiles", e.required}};
  }
}

json outcome_json(const GameSpec& spec, const DynamicsOutcome& out) {
  json j;
  j["kind"] = to_string(out.kind);
  j["start"] = profile_json(out.start);
  j["steps"] = out.trajectory.size();
  json order = json::array();
  for (PlatformIndex i : out.order) order.push_back(i + 1);
  j["order"] = order;
  if (out.kind == OutcomeKind::equilibrium) j["equilibrium"] = profile_json(*out.equilibrium_profile);
  if (out.kind == OutcomeKind::cycle) {
    json c = json::array();
    for (const auto& p : out.cycle_profiles()) c.push_back(profile_json(p));
    j["cycle"] = c;
  }
  if (out.kind != OutcomeKind::timeout) {
    const auto w = user_welfare(spec, out);
    const auto m = metrics_for_outcome(spec, out);
    j["welfare"] = w.welfare;
    j["welfare_multiset_average"] = w.multiset_average;
    j["welfare_state_average"] = w.state_average;
    j["cycle_length"] = w.cycle_length;
    j["social_optimum"] = m.social_optimum;
    j["social_optimum_profile"] = profile_json(m.social_optimum_profile);
    j["final_profile"] = profile_json(m.profile);
    j["coverage"] = m.coverage;
    j["hhi"] = m.hhi;
    j["support"] = m.support;
    j["shares"] = m.shares;
  }
  return j;
}

std::string steps_csv(const GameSpec& spec, const DynamicsOutcome& out) {
  std::ostringstream s;
  s << "step,mover,profile,changed,utilities,coverage,hhi,support\n";
  for (const auto& st : out.trajectory) {
    const auto shares = market_shares(spec, st.profile);
    s << st.step << "," << st.mover + 1 << "," << profile_cell(st.profile) << ","
      << (st.changed ? 1 : 0) << "," << vector_cell(st.utilities) << ","
      << fmt_num(coverage_value(spec, st.profile)) << "," << fmt_num(shares.hhi) << ","
      << shares.support << "\n";
  }
  return s.str();
}

fs::path out_dir_of(const RunConfig& c) {
  return c.out_dir.empty() ? fs::path(default_out_dir()) : fs::path(c.out_dir);
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin, line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1),
                      std::string("invalid JSON: ") + e.what());
  }
  ConfigReader r(text, origin);
  r.only_keys(j, "config",
              {"instance", "choice", "dynamics", "sweep", "training", "output", "seed", "jobs"});
  RunConfig c;
  if (j.contains("seed")) c.seed = r.get<std::uint64_t>(j, "seed");
  if (j.contains("jobs")) c.jobs = std::max(1u, r.get<unsigned>(j, "jobs"));

  if (j.contains("instance")) {
    const json& in = j.at("instance");
    r.only_keys(in, "instance", {"builtin", "game", "synthetic", "n_platforms"});
    const int sources = static_cast<int>(in.contains("builtin")) +
                        static_cast<int>(in.contains("game")) +
                        static_cast<int>(in.contains("synthetic"));
    if (sources != 1)
      r.fail("instance", "instance needs exactly one of 'builtin', 'game' or 'synthetic'");
    if (in.contains("builtin")) {
      c.source = RunConfig::Source::builtin;
      c.builtin_name = r.get<std::string>(in, "builtin");
      const auto& names = fixture_names();
      if (std::find(names.begin(), names.end(), c.builtin_name) == names.end())
        r.fail("builtin", "unknown builtin instance '" + c.builtin_name + "'");
    } else if (in.contains("game")) {
      c.source = RunConfig::Source::inline_game;
      c.game = in.at("game");
      try {
        game_from_json(c.game);
      } catch (const MarketError& e) {
        r.fail("game", e.what());
      }
    } else {
      c.source = RunConfig::Source::synthetic;
      const json& s = in.at("synthetic");
      r.only_keys(s, "synthetic", {"shift", "major_weight", "seed"});
      c.synthetic_shift = s.value("shift", 0.0);
      c.synthetic_major_weight = s.value("major_weight", 0.6);
      c.synthetic_seed = s.value("seed", std::uint64_t{7});
      if (!(c.synthetic_major_weight >= 0.0 && c.synthetic_major_weight <= 1.0))
        r.fail("major_weight", "major_weight must lie in [0, 1]");
    }
    if (in.contains("n_platforms")) {
      c.n_platforms = r.get<std::size_t>(in, "n_platforms");
      if (*c.n_platforms < 1) r.fail("n_platforms", "n_platforms must be at least 1");
    }
  } else {
    c.source = RunConfig::Source::builtin;
  }

  if (j.contains("choice")) {
    const json& ch = j.at("choice");
    r.only_keys(ch, "choice", {"kind", "tau"});
    const auto kind = r.get<std::string>(ch, "kind");
    if (kind == "hardmax") {
      c.choice = ChoiceRule::hardmax();
    } else if (kind == "softmax") {
      const double tau = r.get<double>(ch, "tau");
      if (!(tau > 0.0)) r.fail("tau", "softmax tau must be positive");
      c.choice = ChoiceRule::softmax(tau);
    } else {
      r.fail("kind", "choice kind must be 'hardmax' or 'softmax'");
    }
  }

  if (j.contains("dynamics")) {
    const json& d = j.at("dynamics");
    r.only_keys(d, "dynamics", {"order", "start", "max_steps"});
    if (d.contains("order")) {
      if (d.at("order").is_string()) {
        if (d.at("order").get<std::string>() != "round_robin")
          r.fail("order", "order must be 'round_robin' or a list of platforms");
      } else {
        c.order = to_zero_based(r, r.get<std::vector<std::size_t>>(d, "order"), "order");
      }
    }
    if (d.contains("start"))
      c.start = StrategyProfile(to_zero_based(r, r.get<std::vector<std::size_t>>(d, "start"), "start"));
    if (d.contains("max_steps")) {
      const auto v = r.get<long long>(d, "max_steps");
      if (v < 1) r.fail("max_steps", "max_steps must be at least 1");
      c.max_steps = static_cast<std::size_t>(v);
    }
  }

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    r.only_keys(s, "sweep", {"axis", "values", "repetitions", "seeds"});
    c.sweep_axis = r.get<std::string>(s, "axis");
    if (c.sweep_axis != "models" && c.sweep_axis != "platforms" && c.sweep_axis != "population")
      r.fail("axis", "sweep axis must be 'models', 'platforms' or 'population'");
    if (!s.contains("values") || !s.at("values").is_array() || s.at("values").empty())
      r.fail("values", "sweep needs a non-empty 'values' list");
    for (const auto& v : s.at("values")) c.sweep_values.push_back(v);
    if (c.sweep_axis != "population") {
      for (const auto& v : c.sweep_values)
        if (!v.is_number_unsigned() || v.get<std::size_t>() < 1)
          r.fail("values", "sweep values for this axis must be positive integers");
    }
    if (s.contains("repetitions")) {
      const auto reps = r.get<long long>(s, "repetitions");
      if (reps < 1) r.fail("repetitions", "repetitions must be at least 1");
      c.repetitions = static_cast<std::size_t>(reps);
    }
    if (s.contains("seeds")) {
      c.seeds = r.get<std::vector<std::uint64_t>>(s, "seeds");
      if (c.seeds.size() != c.repetitions) r.fail("seeds", "need one seed per repetition");
    }
  }

  if (j.contains("training")) {
    const json& t = j.at("training");
    r.only_keys(t, "training", {"method", "instance", "resampling", "direct_gradient"});
    if (t.contains("method")) {
      c.training_method = r.get<std::string>(t, "method");
      if (c.training_method != "both" && c.training_method != "resampling" &&
          c.training_method != "direct_gradient")
        r.fail("method", "training method must be 'resampling', 'direct_gradient' or 'both'");
    }
    if (t.contains("instance")) c.training_instance = t.at("instance");
    if (t.contains("resampling")) c.resampling = parse_training(r, t.at("resampling"), c.resampling);
    if (t.contains("direct_gradient"))
      c.direct = parse_training(r, t.at("direct_gradient"), c.direct);
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    r.only_keys(o, "output", {"dir"});
    if (o.contains("dir")) c.out_dir = r.get<std::string>(o, "dir");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError(path, 0, "cannot open config file");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str(), path);
}

GameSpec build_instance(const RunConfig& c) {
  GameSpec spec;
  switch (c.source) {
    case RunConfig::Source::builtin:
      if (c.builtin_name.empty()) throw ConfigError("config", 0, "no instance given");
      spec = builtin_instance(c.builtin_name);
      break;
    case RunConfig::Source::inline_game:
      spec = game_from_json(c.game);
      break;
    case RunConfig::Source::synthetic:
      spec = synthetic_instance(c.synthetic_shift, c.synthetic_major_weight, c.synthetic_seed);
      break;
  }
  if (c.n_platforms) spec = spec.with_platforms(*c.n_platforms);
  if (c.choice) spec = spec.with_choice(*c.choice);
  return spec;
}

std::string default_out_dir() {
  const char* env = std::getenv("PMARKET_OUT");
  return env && *env ? env : "out";
}

StrategyProfile seeded_start(const GameSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<ModelIndex> pick(0, spec.models() - 1);
  StrategyProfile p;
  for (std::size_t i = 0; i < spec.n_platforms; ++i) p.choices.push_back(pick(rng));
  return p;
}

int cmd_run(const RunConfig& c, std::ostream& log) {
  const GameSpec spec = build_instance(c);
  const StrategyProfile start = c.start ? *c.start : seeded_start(spec, c.seed);
  const auto out = run_dynamics(spec, start, {c.order, c.max_steps});

  json summary;
  summary["instance"] = c.source == RunConfig::Source::builtin ? c.builtin_name
                        : c.source == RunConfig::Source::synthetic ? "synthetic"
                                                                   : "inline";
  summary["seed"] = c.seed;
  summary["order"] = c.order.empty() ? "round_robin" : "fixed";
  summary["game"] = game_to_json(spec);
  summary["outcome"] = outcome_json(spec, out);
  summary["pne"] = pne_json(spec, c.jobs);

  const fs::path dir = out_dir_of(c);
  write_text(dir / "steps.csv", steps_csv(spec, out));
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  log << "outcome " << to_string(out.kind) << " after " << out.trajectory.size() << " steps";
  if (summary["outcome"].contains("welfare"))
    log << ", W=" << fmt_num(summary["outcome"]["welfare"].get<double>())
        << ", W_opt=" << fmt_num(summary["outcome"]["social_optimum"].get<double>());
  if (summary["pne"].is_array()) log << ", " << summary["pne"].size() << " PNE";
  log << "\nwrote " << (dir / "steps.csv").string() << " and " << (dir / "summary.json").string()
      << "\n";
  return 0;
}

namespace {

GameSpec sweep_cell_spec(const RunConfig& c, const GameSpec& base, const json& value) {
  if (c.sweep_axis == "models") {
    const auto m = value.get<std::size_t>();
    if (m > base.models())
      throw ConfigError("config", 0, "model sweep value " + std::to_string(m) + " exceeds M=" +
                                         std::to_string(base.models()));
    return base.with_scores(base.scores.prefix(m));
  }
  if (c.sweep_axis == "platforms") return base.with_platforms(value.get<std::size_t>());
  if (c.source == RunConfig::Source::synthetic) {
    if (!value.is_object())
      throw ConfigError("config", 0, "population sweep values must be objects with shift/major_weight");
    RunConfig cell = c;
    cell.synthetic_shift = value.value("shift", c.synthetic_shift);
    cell.synthetic_major_weight = value.value("major_weight", c.synthetic_major_weight);
    return build_instance(cell);
  }
  if (!value.is_array())
    throw ConfigError("config", 0, "population sweep values must be weight lists");
  return GameSpec(base.scores,
                  UserPopulation(base.population.labels(), value.get<std::vector<double>>()),
                  base.n_platforms, base.choice);
}

struct SweepCell {
  std::size_t value_index = 0;
  std::size_t repetition = 0;
  std::string rows;
  json summary;
};

}  // namespace

int cmd_sweep(const RunConfig& c, std::ostream& log) {
  if (c.sweep_axis.empty()) throw ConfigError("config", 0, "sweep command needs a 'sweep' block");
  const GameSpec base = build_instance(c);
  std::vector<SweepCell> cells;
  for (std::size_t v = 0; v < c.sweep_values.size(); ++v)
    for (std::size_t r = 0; r < c.repetitions; ++r) cells.push_back({v, r, {}, {}});

  auto run_cell = [&](SweepCell& cell) {
    const json& value = c.sweep_values[cell.value_index];
    const GameSpec spec = sweep_cell_spec(c, base, value);
    const std::uint64_t seed = c.seeds.empty() ? c.seed + cell.repetition : c.seeds[cell.repetition];
    const auto start = seeded_start(spec, seed);
    const auto out = run_dynamics(spec, start, {{}, c.max_steps});
    const std::string label = value_label(value);
    std::ostringstream rows;
    for (const auto& st : out.trajectory) {
      const auto shares = market_shares(spec, st.profile);
      rows << c.sweep_axis << "," << label << "," << cell.repetition + 1 << "," << seed << ","
           << st.step << "," << st.mover + 1 << "," << profile_cell(st.profile) << ","
           << (st.changed ? 1 : 0) << "," << vector_cell(st.utilities) << ","
           << fmt_num(coverage_value(spec, st.profile)) << "," << fmt_num(shares.hhi) << ","
           << shares.support << "\n";
    }
    cell.rows = rows.str();
    cell.summary = outcome_json(spec, out);
    cell.summary["axis"] = c.sweep_axis;
    cell.summary["value"] = value;
    cell.summary["repetition"] = cell.repetition + 1;
    cell.summary["seed"] = seed;
    cell.summary["pne"] = pne_json(spec, 1);
  };

  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(cells.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        run_cell(cells[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < c.jobs; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (!e.empty()) throw MarketError("sweep cell failed: " + e);

  std::string csv = "axis,value,repetition,seed,step,mover,profile,changed,utilities,coverage,hhi,support\n";
  json summary = json::array();
  for (const auto& cell : cells) {
    csv += cell.rows;
    summary.push_back(cell.summary);
  }
  const fs::path dir = out_dir_of(c);
  write_text(dir / "sweep.csv", csv);
  write_text(dir / "sweep_summary.json", summary.dump(2) + "\n");
  log << "swept " << c.sweep_axis << " over " << c.sweep_values.size() << " values x "
      << c.repetitions << " repetitions; wrote " << (dir / "sweep.csv").string() << "\n";
  return 0;
}

namespace {

ToyEntryInstance entry_instance_from(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "toy")
      throw ConfigError("config", 0, "unknown training instance '" + j.get<std::string>() + "'");
    return toy_entry_instance();
  }
  try {
    ToyEntryInstance t;
    t.outcome_labels = j.at("outcomes").get<std::vector<std::string>>();
    t.dataset.attributes = j.at("attributes").get<std::vector<std::string>>();
    t.dataset.item_attribute = j.at("item_attribute").get<std::vector<std::size_t>>();
    t.dataset.preference = j.at("preference").get<std::vector<std::vector<double>>>();
    t.dataset.counts = j.at("counts").get<std::vector<double>>();
    t.rewards = RewardTable(j.at("rewards").get<std::vector<std::vector<double>>>());
    t.population = UserPopulation(j.value("types", std::vector<std::string>{}),
                                  j.at("weights").get<std::vector<double>>());
    t.incumbents = ScoreMatrix(j.at("incumbents").get<std::vector<std::vector<double>>>());
    t.n_platforms = j.value("n_platforms", std::size_t{2});
    t.targeted_type = j.value("targeted_type", std::size_t{1}) - 1;
    t.dataset.validate(t.population.size());
    return t;
  } catch (const json::exception& e) {
    throw ConfigError("config", 0, std::string("malformed training instance: ") + e.what());
  }
}

json market_json(const GameSpec& spec) {
  const auto out = run_dynamics(spec, StrategyProfile(std::vector<ModelIndex>(spec.n_platforms, 0)));
  json j = outcome_json(spec, out);
  j["pne"] = pne_json(spec, 1);
  return j;
}

}  // namespace

int cmd_entry(const RunConfig& c, std::ostream& log) {
  const auto inst = entry_instance_from(c.training_instance);
  const OpponentPool pool{inst.incumbents};
  const fs::path dir = out_dir_of(c);
  const auto& types = inst.population.labels();

  json report;
  report["before"] = market_json(GameSpec(inst.incumbents, inst.population, inst.n_platforms));
  const auto base = empirical_generator(inst.dataset, inst.outcome_labels);
  report["base_scores"] = exact_scores(base, inst.rewards);
  report["base_objective"] = objective_F(base, inst.rewards, inst.population, pool, c.direct.beta);

  auto after = [&](const ToyGenerator& g) {
    const auto rep = evaluate_entrant(g, inst.rewards, inst.population, inst.incumbents, inst.n_platforms);
    json j = outcome_json(rep.game, rep.dynamics);
    j["entrant_scores"] = rep.entrant_scores;
    j["entrant_distribution"] = g.probabilities();
    j["pne"] = pne_json(rep.game, 1);
    j["adopted_in_pne"] = rep.adopted_in_pne;
    j["adopted_in_dynamics"] = rep.adopted_in_dynamics;
    return j;
  };

  if (c.training_method != "direct_gradient") {
    const auto res = train_resampling(inst.dataset, inst.rewards, inst.population, pool, c.resampling, base);
    std::ostringstream csv;
    csv << "round";
    for (const auto& t : types) csv << ",S_est_" << t;
    for (const auto& t : types) csv << ",S_exact_" << t;
    csv << ",F\n";
    for (const auto& row : res.trace) {
      csv << row.round;
      for (double v : row.s_estimated) csv << "," << fmt_num(v);
      for (double v : row.s_exact) csv << "," << fmt_num(v);
      csv << "," << fmt_num(row.objective) << "\n";
    }
    write_text(dir / "resampling_trace.csv", csv.str());
    report["resampling"] = after(res.generator);
    log << "resampling: F " << fmt_num(res.trace.front().objective) << " -> "
        << fmt_num(res.trace.back().objective) << ", adopted in PNE: "
        << (report["resampling"]["adopted_in_pne"].get<bool>() ? "yes" : "no") << "\n";
  }
  if (c.training_method != "resampling") {
    const auto res = train_direct_gradient(inst.dataset, inst.rewards, inst.population, pool, c.direct, base);
    std::ostringstream csv;
    csv << "epoch,cross_entropy,F,L,learning_rate";
    for (const auto& t : types) csv << ",S_" << t;
    csv << "\n";
    for (const auto& row : res.trace) {
      csv << row.epoch << "," << fmt_num(row.cross_entropy) << "," << fmt_num(row.objective) << ","
          << fmt_num(row.loss) << "," << fmt_num(row.learning_rate);
      for (double v : row.s_exact) csv << "," << fmt_num(v);
      csv << "\n";
    }
    write_text(dir / "direct_gradient_trace.csv", csv.str());
    report["direct_gradient"] = after(res.generator);
    log << "direct-gradient: F " << fmt_num(res.trace.front().objective) << " -> "
        << fmt_num(res.trace.back().objective) << ", adopted in PNE: "
        << (report["direct_gradient"]["adopted_in_pne"].get<bool>() ? "yes" : "no") << "\n";
  }
  write_text(dir / "entry_report.json", report.dump(2) + "\n");
  log << "wrote " << (dir / "entry_report.json").string() << "\n";
  return 0;
}

int cmd_verify_fixtures(const VerifyOptions& options, std::ostream& out) {
  const auto& registered = fixture_names();
  auto known = [&](const std::string& n) {
    return std::find(registered.begin(), registered.end(), n) != registered.end();
  };
  std::vector<std::string> names;
  try {
    if (options.fixtures_dir.empty()) {
      names = registered;
    } else {
      std::ifstream f(fs::path(options.fixtures_dir) / "index.json");
      if (!f) throw ConfigError(options.fixtures_dir, 0, "missing index.json");
      json idx;
      try {
        idx = json::parse(f);
        names = idx.at("fixtures").get<std::vector<std::string>>();
      } catch (const json::exception& e) {
        throw ConfigError((fs::path(options.fixtures_dir) / "index.json").string(), 0, e.what());
      }
    }
    for (const auto& n : names)
      if (!known(n)) throw ConfigError("fixtures", 0, "unknown fixture '" + n + "' in registry");
    for (const auto& n : options.only)
      if (!known(n)) throw ConfigError("fixtures", 0, "unknown fixture '" + n + "'");
  } catch (const ConfigError& e) {
    out << "configuration error: " << e.what() << "\n";
    return 2;
  }
  if (!options.only.empty()) {
    std::vector<std::string> kept;
    for (const auto& n : names)
      if (std::find(options.only.begin(), options.only.end(), n) != options.only.end()) kept.push_back(n);
    names = kept;
  }

  std::size_t pass = 0, fail = 0, known_bad = 0;
  for (const auto& n : names) {
    Fixture fx;
    try {
      if (options.fixtures_dir.empty()) {
        fx = builtin_fixture(n);
      } else {
        std::ifstream f(fs::path(options.fixtures_dir) / (n + ".json"));
        if (!f) throw InvalidInputError("missing fixture file " + n + ".json");
        fx = fixture_from_json(json::parse(f));
      }
    } catch (const std::exception& e) {
      out << "FAIL " << n << ": cannot load fixture: " << e.what() << "\n";
      ++fail;
      continue;
    }
    for (const auto& r : verify_fixture(fx)) {
      const bool counted_ok = r.status == CheckStatus::pass ||
                              (r.status == CheckStatus::known_discrepancy && !options.strict);
      out << to_string(r.status) << " " << r.fixture << ": " << r.label << " | expected "
          << r.expected << " | actual " << r.actual << " | tol " << fmt_num(r.tolerance);
      if (!r.note.empty()) out << " | " << r.note;
      out << "\n";
      if (r.status == CheckStatus::pass)
        ++pass;
      else if (r.status == CheckStatus::known_discrepancy)
        ++known_bad;
      if (!counted_ok) ++fail;
    }
  }
  out << "checks: " << pass << " passed, " << fail << " failed, " << known_bad
      << " known discrepancies" << (options.strict ? " (strict)" : "") << "\n";
  return fail == 0 ? 0 : 1;
}

int cmd_list_fixtures(const std::string& export_dir, std::ostream& out) {
  json index = {{"fixtures", fixture_names()}};
  for (const auto& n : fixture_names()) {
    const auto fx = builtin_fixture(n);
    out << n << "  M=" << fx.spec.models() << " K=" << fx.spec.types() << " N=" << fx.spec.n_platforms
        << (fx.spec.choice.is_softmax() ? " softmax" : " hardmax") << "  " << fx.description << "\n";
    if (!export_dir.empty())
      write_text(fs::path(export_dir) / (n + ".json"), fixture_to_json(fx).dump(2) + "\n");
  }
  if (!export_dir.empty()) write_text(fs::path(export_dir) / "index.json", index.dump(2) + "\n");
  return 0;
}

}  // namespace pm
