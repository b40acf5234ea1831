#include "adev/cli.hpp"

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "adev/checkpoint.hpp"
#include "adev/csv.hpp"
#include "adev/errors.hpp"
#include "adev/generator.hpp"
#include "adev/parallel.hpp"
#include "adev/stats_testing.hpp"

namespace adev {

using nlohmann::json;

namespace {

struct Opt {
  std::string key;
  json def;
  std::string help;
};

using OptList = std::vector<Opt>;

// ---------------------------------------------------------------------------
// Option tables

OptList data_opts(const std::vector<std::string>& files) {
  OptList o;
  for (const auto& f : files) o.push_back({f, "", "dataset CSV"});
  o.push_back({"window", 0, "rolling window length; 0 reads one sample per sample_id"});
  o.push_back({"stride", 1, "rolling window stride"});
  return o;
}

OptList regression_opts(int iterations) {
  return {
      {"reg-hidden", "32,32", "regression LSTM widths"},
      {"reg-lr", 1e-3, "regression learning rate"},
      {"reg-iterations", iterations, "regression iterations"},
      {"reg-batch", 256, "regression batch size"},
      {"reg-patience", 50, "early-stopping patience"},
      {"reg-val-fraction", 0.1, "validation fraction"},
  };
}

OptList disc_opts() {
  OptList o = {
      {"n", 3, "rank-1 unitary dimension"},
      {"m", 13, "rank-2 unitary dimension"},
      {"k1", 1, "number of rank-1 maps"},
      {"k2", 10, "number of rank-2 maps"},
      {"iter1", 300, "stage-1 iterations"},
      {"iter2", 300, "stage-3 iterations"},
      {"batch", 256, "batch size"},
      {"optimizer", "adam", "sgd, momentum or adam"},
      {"lr1", 0.02, "stage-1 learning rate"},
      {"lr2", 0.02, "stage-3 learning rate"},
      {"backtracking", false, "halve plain-gradient steps until the objective does not drop"},
      {"init-std", kDefaultInitStd, "initial generator scale of the maps"},
      {"time-augment", true, "prepend a time channel to the data"},
      {"rank2-time", true, "prepend a time channel to conditional paths"},
  };
  for (auto& r : regression_opts(1000)) o.push_back(r);
  return o;
}

OptList operator+(OptList a, const OptList& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// ---------------------------------------------------------------------------
// Resolved configuration

class Config {
 public:
  explicit Config(json j) : j_(std::move(j)) {}
  const json& raw() const { return j_; }

  std::string str(const std::string& k) const { return j_.at(k).get<std::string>(); }
  bool flag(const std::string& k) const { return j_.at(k).get<bool>(); }
  double real(const std::string& k) const { return j_.at(k).get<double>(); }
  long long integer(const std::string& k) const { return j_.at(k).get<long long>(); }
  std::uint64_t seed() const { return j_.at("seed").get<std::uint64_t>(); }

  int count(const std::string& k, long long lo = 1) const {
    const long long v = integer(k);
    require_arg(v >= lo && v <= 100000000, "--" + k + " must be >= " + std::to_string(lo));
    return static_cast<int>(v);
  }
  double positive(const std::string& k) const {
    const double v = real(k);
    require_arg(std::isfinite(v) && v > 0.0, "--" + k + " must be positive");
    return v;
  }
  std::string required(const std::string& k) const {
    const std::string v = str(k);
    require_arg(!v.empty(), "--" + k + " is required");
    return v;
  }
  std::vector<int> widths(const std::string& k) const {
    std::vector<int> out;
    std::stringstream ss(str(k));
    std::string item;
    while (std::getline(ss, item, ',')) {
      int v = 0;
      try {
        std::size_t used = 0;
        v = std::stoi(item, &used);
        if (used != item.size()) v = 0;
      } catch (const std::exception&) {
        v = 0;
      }
      require_arg(v >= 1, "--" + k + " must be a comma-separated list of positive widths");
      out.push_back(v);
    }
    require_arg(!out.empty(), "--" + k + " must list at least one width");
    return out;
  }

 private:
  json j_;
};

json convert(const std::string& key, const std::string& text, const json& def) {
  const std::string bad = "--" + key + ": cannot read '" + text + "' as ";
  try {
    std::size_t used = 0;
    if (def.is_boolean()) {
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
      throw ArgumentError(bad + "a boolean");
    }
    if (def.is_number_integer()) {
      const long long v = std::stoll(text, &used);
      if (used != text.size()) throw ArgumentError(bad + "an integer");
      return v;
    }
    if (def.is_number_unsigned()) {
      if (!text.empty() && text[0] == '-') throw ArgumentError(bad + "a nonnegative integer");
      const unsigned long long v = std::stoull(text, &used);
      if (used != text.size()) throw ArgumentError(bad + "a nonnegative integer");
      return v;
    }
    if (def.is_number_float()) {
      const double v = std::stod(text, &used);
      if (used != text.size() || !std::isfinite(v)) throw ArgumentError(bad + "a finite number");
      return v;
    }
  } catch (const std::invalid_argument&) {
    throw ArgumentError(bad + "a number");
  } catch (const std::out_of_range&) {
    throw ArgumentError(bad + "a number in range");
  }
  return text;
}

void check_type(const std::string& key, const json& v, const json& def) {
  const bool ok = (def.is_boolean() && v.is_boolean()) ||
                  (def.is_number_integer() && !def.is_number_unsigned() && v.is_number_integer()) ||
                  (def.is_number_unsigned() && v.is_number_unsigned()) ||
                  (def.is_number_float() && v.is_number()) || (def.is_string() && v.is_string());
  require_arg(ok, "config key '" + key + "' has the wrong type");
}

// ---------------------------------------------------------------------------
// Output helpers

json matrix_json(const CMatrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json a = json::array(), b = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      a.push_back(m(r, c).real());
      b.push_back(m(r, c).imag());
    }
    re.push_back(a);
    im.push_back(b);
  }
  return {{"re", re}, {"im", im}};
}

json curve_json(const RegressionCurve& c) {
  return {{"best_iteration", c.best_iteration},
          {"best_val_loss", c.best_val_loss},
          {"train_loss", c.train_loss},
          {"val_loss", c.val_loss}};
}

json metrics_json(const MetricReport& r) {
  json j = {{"acf", r.acf}, {"cross_corr", r.cross_corr}, {"onnd", r.onnd}};
  j["cond_exp"] = r.cond_exp ? json(*r.cond_exp) : json(nullptr);
  return j;
}

json permutation_json(const PermutationResult& r) {
  return {{"observed", r.observed}, {"quantile", r.quantile}, {"reject", r.reject}, {"permuted", r.permuted}};
}

struct Outcome {
  json results;
  std::map<std::string, std::string> files;  // name -> content
  std::string summary;
};

// ---------------------------------------------------------------------------
// Shared builders

Dataset load_data(const Config& c, const std::string& key) {
  const std::string path = c.required(key);
  const int window = c.count("window", 0);
  if (window == 0) return load_dataset_csv(path);
  require_arg(window >= 2, "--window must be 0 or >= 2");
  return ingest_csv(path, window, c.count("stride"));
}

RegressionConfig regression_config(const Config& c) {
  RegressionConfig r;
  r.hidden = c.widths("reg-hidden");
  r.opt.lr = c.positive("reg-lr");
  r.iterations = c.count("reg-iterations", 0);
  r.batch_size = c.count("reg-batch");
  r.patience = c.count("reg-patience");
  r.val_fraction = c.real("reg-val-fraction");
  require_arg(r.val_fraction >= 0.0 && r.val_fraction < 1.0, "--reg-val-fraction must lie in [0, 1)");
  return r;
}

DiscriminatorConfig disc_config(const Config& c) {
  DiscriminatorConfig d;
  d.n = c.count("n");
  d.m = c.count("m");
  d.k1 = c.count("k1");
  d.k2 = c.count("k2");
  d.iter1 = c.count("iter1", 0);
  d.iter2 = c.count("iter2", 0);
  d.batch_size = c.count("batch");
  d.opt1 = {parse_optimizer(c.str("optimizer")), c.positive("lr1")};
  d.opt2 = {parse_optimizer(c.str("optimizer")), c.positive("lr2")};
  d.backtracking = c.flag("backtracking");
  d.init_std = c.positive("init-std");
  d.time_augment = c.flag("time-augment");
  d.rank2_time = c.flag("rank2-time");
  d.regression = regression_config(c);
  d.seed = c.seed();
  return d;
}

void add_disc_files(Outcome& out, const Discriminator& disc) {
  out.files["maps.adev"] = encode_checkpoint(to_checkpoint(disc.m));
  if (!disc.m2.empty()) out.files["maps2.adev"] = encode_checkpoint(to_checkpoint(disc.m2));
  for (std::size_t i = 0; i < disc.reg_x.size(); ++i)
    out.files["reg_x_" + std::to_string(i) + ".adev"] = encode_checkpoint(to_checkpoint(disc.reg_x[i]));
  for (std::size_t i = 0; i < disc.reg_y.size(); ++i)
    out.files["reg_y_" + std::to_string(i) + ".adev"] = encode_checkpoint(to_checkpoint(disc.reg_y[i]));
}

std::string fixed_row(const std::string& label, double value) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "  %-20s %12.6f\n", label.c_str(), value);
  return buf;
}

// ---------------------------------------------------------------------------
// Commands

Outcome cmd_develop(const Config& c) {
  Dataset x = load_data(c, "x");
  if (c.flag("time-augment")) x = time_augment(x);
  MapEnsemble ens = c.str("maps").empty()
                        ? sample_map_ensemble(static_cast<int>(x.dim()), c.count("n"), c.count("k1"),
                                              c.positive("init-std"), derive_seed(c.seed(), 1))
                        : map_ensemble_from_checkpoint(load_checkpoint(c.str("maps")));
  require_shape(ens.front().d_in() == x.dim(), "map input dimension does not match the data");
  Outcome out;
  json maps = json::array();
  for (const auto& m : ens) {
    const auto devs = develop_all(m, x);
    json entry = {{"pcf", matrix_json(mean_in_order(devs))}};
    if (c.flag("per-sample")) {
      json per = json::array();
      for (const auto& d : devs) per.push_back(matrix_json(d));
      entry["developments"] = per;
    }
    maps.push_back(entry);
  }
  out.results = {{"samples", x.size()}, {"maps", maps}};
  out.files["maps.adev"] = encode_checkpoint(to_checkpoint(ens));
  out.summary = "developed " + std::to_string(x.size()) + " paths under " + std::to_string(ens.size()) + " maps\n";
  return out;
}

Outcome cmd_pcfd(const Config& c) {
  Dataset x = load_data(c, "x");
  Dataset y = load_data(c, "y");
  if (c.flag("time-augment")) {
    x = time_augment(x);
    y = time_augment(y);
  }
  MapEnsemble ens = c.str("maps").empty()
                        ? sample_map_ensemble(static_cast<int>(x.dim()), c.count("n"), c.count("k1"),
                                              c.positive("init-std"), derive_seed(c.seed(), 1))
                        : map_ensemble_from_checkpoint(load_checkpoint(c.str("maps")));
  const double sq = epcfd_squared(ens, x, y);
  Outcome out;
  out.results = {{"epcfd", std::sqrt(sq)}, {"epcfd_squared", sq}};
  out.files["maps.adev"] = encode_checkpoint(to_checkpoint(ens));
  out.summary = fixed_row("epcfd", std::sqrt(sq));
  return out;
}

Outcome cmd_hrpcfd(const Config& c) {
  Dataset x = load_data(c, "x");
  Dataset y = load_data(c, "y");
  const bool augment = c.flag("time-augment");
  if (augment) {
    x = time_augment(x);
    y = time_augment(y);
  }
  Outcome out;
  MapEnsemble m;
  MapEnsemble2 m2;
  std::vector<RegressionModel> reg_x, reg_y;
  json curves = json::object();
  if (!c.str("disc").empty()) {
    const std::filesystem::path dir(c.str("disc"));
    m = map_ensemble_from_checkpoint(load_checkpoint((dir / "maps.adev").string()));
    m2 = map_ensemble2_from_checkpoint(load_checkpoint((dir / "maps2.adev").string()));
    for (std::size_t i = 0; i < m.size(); ++i) {
      reg_x.push_back(regression_from_checkpoint(load_checkpoint((dir / ("reg_x_" + std::to_string(i) + ".adev")).string())));
      reg_y.push_back(regression_from_checkpoint(load_checkpoint((dir / ("reg_y_" + std::to_string(i) + ".adev")).string())));
    }
  } else {
    const int n = c.count("n");
    m = sample_map_ensemble(static_cast<int>(x.dim()), n, c.count("k1"), c.positive("init-std"),
                            derive_seed(c.seed(), 1));
    m2 = sample_map_ensemble2(n, c.count("m"), c.count("k2"), c.flag("rank2-time"), c.positive("init-std"),
                              derive_seed(c.seed(), 2));
    RegressionConfig rc = regression_config(c);
    curves["x"] = json::array();
    curves["y"] = json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
      RegressionCurve cx, cy;
      rc.seed = derive_seed(c.seed(), 100 + 2 * i);
      reg_x.push_back(train_regression(x, m[i], rc, &cx));
      rc.seed = derive_seed(c.seed(), 101 + 2 * i);
      reg_y.push_back(train_regression(y, m[i], rc, &cy));
      curves["x"].push_back(curve_json(cx));
      curves["y"].push_back(curve_json(cy));
    }
    out.files["maps.adev"] = encode_checkpoint(to_checkpoint(m));
    out.files["maps2.adev"] = encode_checkpoint(to_checkpoint(m2));
  }
  require_shape(m.front().d_in() == x.dim(), "map input dimension does not match the data");
  CondPathsPerMap cx, cy;
  for (std::size_t i = 0; i < m.size(); ++i) {
    cx.push_back(predict_cond_dev(reg_x[i], x, m[i]));
    cy.push_back(predict_cond_dev(reg_y[i], y, m[i]));
  }
  const double sq = ehrpcfd_squared(m2, cx, cy);
  const double bound = 2.0 * std::sqrt(static_cast<double>(m2.front().lie_dim()));
  out.results = {{"ehrpcfd", std::sqrt(sq)}, {"ehrpcfd_squared", sq}, {"bound", bound}, {"regression", curves}};
  out.summary = fixed_row("ehrpcfd", std::sqrt(sq)) + fixed_row("bound 2 sqrt(m)", bound);
  return out;
}

Outcome cmd_train_disc(const Config& c) {
  const Dataset x = load_data(c, "x");
  const Dataset y = load_data(c, "y");
  const Discriminator disc = train_discriminator(x, y, disc_config(c));
  Outcome out;
  json rx = json::array(), ry = json::array();
  for (const auto& r : disc.reg_x_curves) rx.push_back(curve_json(r));
  for (const auto& r : disc.reg_y_curves) ry.push_back(curve_json(r));
  out.results = {{"stage1", disc.stage1_curve},
                 {"regression_x", rx},
                 {"regression_y", ry},
                 {"stage3", disc.stage3_curve}};
  add_disc_files(out, disc);
  if (!disc.stage1_curve.empty()) out.summary += fixed_row("stage-1 final", disc.stage1_curve.back());
  if (!disc.stage3_curve.empty()) out.summary += fixed_row("stage-3 final", disc.stage3_curve.back());
  return out;
}

Outcome cmd_perm_test(const Config& c) {
  const Dataset x = load_data(c, "x");
  const Dataset y = load_data(c, "y");
  const double ratio = c.real("train-ratio");
  const auto sx = split_dataset(x, ratio);
  const auto sy = split_dataset(y, ratio);
  const StatisticKind kind = parse_statistic(c.str("statistic"));
  const int perms = c.count("perms", 20);
  const double alpha = c.real("alpha");
  require_arg(alpha > 0.0 && alpha < 1.0, "--alpha must lie in (0, 1)");
  require_arg(sx.test.size() + sy.test.size() >= 10, "held-out samples must number at least 10");
  const TestStatistic stat = fit_test_statistic(sx.train, sy.train, disc_config(c), kind);
  const auto r = permutation_test(stat, sx.test, sy.test, perms, alpha, derive_seed(c.seed(), 7));
  Outcome out;
  out.results = permutation_json(r);
  out.results["statistic"] = to_string(kind);
  out.results["train_sizes"] = {sx.train.size(), sy.train.size()};
  out.results["test_sizes"] = {sx.test.size(), sy.test.size()};
  add_disc_files(out, stat.discriminator());
  out.summary = fixed_row("observed", r.observed) + fixed_row("quantile", r.quantile) +
                "  reject               " + std::string(r.reject ? "yes" : "no") + "\n";
  return out;
}

Outcome cmd_power_study(const Config& c) {
  const int d = c.count("d");
  const int steps = c.count("T");
  const auto a = ProcessSpec::parse(c.str("a"), d, steps);
  const auto b = ProcessSpec::parse(c.str("b"), d, steps);
  PowerConfig pc;
  pc.runs = c.count("runs");
  pc.tests_per_run = c.count("tests-per-run");
  pc.train_size = c.count("train-size");
  pc.test_size = c.count("test-size");
  pc.permutations = c.count("perms", 20);
  pc.alpha = c.real("alpha");
  require_arg(pc.alpha > 0.0 && pc.alpha < 1.0, "--alpha must lie in (0, 1)");
  require_arg(2 * pc.test_size >= 10, "--test-size must be at least 5");
  pc.statistic = parse_statistic(c.str("statistic"));
  pc.disc = disc_config(c);
  pc.seed = c.seed();
  const TestReport rep = power_study(a, b, pc);
  Outcome out;
  json runs = json::array();
  for (const auto& r : rep.runs) {
    json h1 = json::array(), h0 = json::array();
    for (const auto& p : r.h1) h1.push_back(permutation_json(p));
    for (const auto& p : r.h0) h0.push_back(permutation_json(p));
    runs.push_back({{"seed", r.seed}, {"power", r.power}, {"type_i", r.type_i}, {"h1", h1}, {"h0", h0}});
  }
  out.results = {{"process_a", rep.process_a},
                 {"process_b", rep.process_b},
                 {"statistic", to_string(pc.statistic)},
                 {"power", rep.power},
                 {"power_std", rep.power_std},
                 {"type_i", rep.type_i},
                 {"type_i_std", rep.type_i_std},
                 {"runs", runs}};
  char head[128];
  std::snprintf(head, sizeof(head), "  %-6s %10s %10s\n", "run", "power", "type-I");
  out.summary = head;
  for (std::size_t k = 0; k < rep.runs.size(); ++k) {
    char row[128];
    std::snprintf(row, sizeof(row), "  %-6zu %10.3f %10.3f\n", k, rep.runs[k].power, rep.runs[k].type_i);
    out.summary += row;
  }
  char tail[128];
  std::snprintf(tail, sizeof(tail), "  %-6s %10.3f %10.3f\n", "mean", rep.power, rep.type_i);
  out.summary += tail;
  return out;
}

GanConfig gan_config(const Config& c, int d, int steps) {
  GanConfig g;
  g.shape.d = d;
  g.shape.steps = steps;
  g.shape.past = c.count("past");
  require_arg(g.shape.past < steps, "--past must be smaller than the number of steps");
  g.shape.noise_dim = c.count("noise-dim");
  g.shape.latent_dim = c.count("latent");
  g.shape.embed_hidden = c.widths("embed-hidden");
  g.shape.head_hidden = c.widths("head-hidden");
  g.k1 = c.count("k1");
  g.n = c.count("n");
  g.k2 = c.count("k2");
  g.m = c.count("m");
  g.phase_a_iterations = c.count("iters-a", 0);
  g.phase_c_iterations = c.count("iters-c", 0);
  g.batch_size = c.count("batch");
  const OptimizerKind kind = parse_optimizer(c.str("optimizer"));
  g.gen_opt = {kind, c.positive("gen-lr")};
  g.disc_opt = {kind, c.positive("disc-lr")};
  g.clip_norm = c.positive("clip");
  g.lr_decay = c.positive("lr-decay");
  g.decay_every = c.count("decay-every");
  g.iter_r = c.count("iter-r");
  g.finetune_iterations = c.count("finetune-iters", 0);
  g.init_std = c.positive("init-std");
  g.rank2_time = c.flag("rank2-time");
  g.regression = regression_config(c);
  g.seed = c.seed();
  return g;
}

Outcome cmd_train_gan(const Config& c) {
  const Dataset data = load_data(c, "data");
  const GanConfig g = gan_config(c, static_cast<int>(data.dim()), static_cast<int>(data.length() - 1));
  const int draws = c.count("draws");
  std::optional<Dataset> test;
  if (!c.str("test").empty()) test = load_data(c, "test");
  const GanResult r = train_hrpcf_gan(data, g);
  Outcome out;
  json curves = json::array();
  for (const auto& rc : r.report.real_regression) curves.push_back(curve_json(rc));
  json ft = json::array();
  for (const auto& [before, after] : r.report.finetune_rloss) ft.push_back({{"before", before}, {"after", after}});
  out.results = {{"phase_a_loss", r.report.phase_a_loss},
                 {"phase_c_loss", r.report.phase_c_loss},
                 {"real_regression", curves},
                 {"finetune_rloss", ft}};
  if (test) {
    auto eval = [&](const GeneratorModel& model) {
      const Dataset fake = generate_like(model, *test, derive_seed(c.seed(), 11));
      return metrics_json(eval_metrics(*test, fake, cond_exp_input(model, *test, draws, derive_seed(c.seed(), 12))));
    };
    out.results["test_metrics"] = {{"phase_a", eval(r.phase_a)}, {"final", eval(r.model)}};
  }
  out.files["generator.adev"] = encode_checkpoint(to_checkpoint(r.model));
  out.files["generator_phase_a.adev"] = encode_checkpoint(to_checkpoint(r.phase_a));
  out.files["maps.adev"] = encode_checkpoint(to_checkpoint(r.m));
  out.files["maps2.adev"] = encode_checkpoint(to_checkpoint(r.m2));
  if (!r.report.phase_a_loss.empty()) out.summary += fixed_row("phase-A final loss", r.report.phase_a_loss.back());
  if (!r.report.phase_c_loss.empty()) out.summary += fixed_row("phase-C final loss", r.report.phase_c_loss.back());
  return out;
}

Outcome cmd_gen_data(const Config& c) {
  Dataset data;
  json source;
  if (!c.str("generator").empty()) {
    const GeneratorModel g = generator_from_checkpoint(load_checkpoint(c.str("generator")));
    const Dataset pasts = load_data(c, "data");
    data = generate_like(g, pasts, c.seed());
    source = {{"generator", c.str("generator")}, {"data", c.str("data")}};
  } else {
    ProcessSpec s;
    s.kind = c.str("kind");
    s.d = c.count("d");
    s.steps = c.count("T");
    s.hurst = c.real("hurst");
    s.phi = c.real("phi");
    s.sigma = c.real("sigma");
    s.aldous_n = c.count("aldous-n", 0);
    const ProcessSpec checked = ProcessSpec::parse(s.to_string(), s.d, s.steps);
    data = simulate(checked, c.count("samples"), c.seed());
    source = {{"process", checked.to_string()}};
  }
  Outcome out;
  out.files["data.csv"] = dataset_to_csv(data);
  out.results = {{"source", source},
                 {"file", "data.csv"},
                 {"samples", data.size()},
                 {"points", data.length()},
                 {"d", data.dim()}};
  out.summary = "wrote " + std::to_string(data.size()) + " samples\n";
  return out;
}

Outcome cmd_eval(const Config& c) {
  const Dataset real = load_data(c, "real");
  std::optional<GeneratorModel> g;
  if (!c.str("generator").empty()) g = generator_from_checkpoint(load_checkpoint(c.str("generator")));
  Dataset fake;
  if (!c.str("fake").empty()) {
    fake = load_data(c, "fake");
  } else {
    require_arg(g.has_value(), "--fake or --generator is required");
    fake = generate_like(*g, real, derive_seed(c.seed(), 11));
  }
  std::optional<CondExpInput> cond;
  if (g) cond = cond_exp_input(*g, real, c.count("draws"), derive_seed(c.seed(), 12));
  const MetricReport r = eval_metrics(real, fake, cond);
  Outcome out;
  out.results = metrics_json(r);
  out.summary = fixed_row("acf", r.acf) + fixed_row("cross_corr", r.cross_corr) + fixed_row("onnd", r.onnd);
  if (r.cond_exp) out.summary += fixed_row("cond_exp", *r.cond_exp);
  return out;
}

struct Command {
  std::string name;
  std::string help;
  OptList opts;
  std::function<Outcome(const Config&)> run;
  std::string report = "report.json";
};

std::vector<Command> commands() {
  const OptList map_opts = {{"n", 3, "unitary dimension"},
                            {"k1", 1, "number of maps"},
                            {"init-std", kDefaultInitStd, "initial generator scale"},
                            {"time-augment", true, "prepend a time channel"},
                            {"maps", "", "map ensemble checkpoint to use instead of random maps"}};
  const OptList gan_opts = {
      {"test", "", "held-out CSV for metrics"},
      {"past", 5, "past length p"},
      {"noise-dim", 3, "noise dimension"},
      {"latent", 16, "latent dimension"},
      {"embed-hidden", "32", "embedding LSTM widths"},
      {"head-hidden", "32", "head LSTM widths"},
      {"k1", 5, "rank-1 maps"},
      {"n", 5, "rank-1 unitary dimension"},
      {"k2", 10, "rank-2 maps"},
      {"m", 13, "rank-2 unitary dimension"},
      {"iters-a", 2000, "phase-A iterations"},
      {"iters-c", 1000, "phase-C iterations"},
      {"batch", 64, "batch size"},
      {"optimizer", "adam", "sgd, momentum or adam"},
      {"gen-lr", 1e-4, "generator learning rate"},
      {"disc-lr", 2e-3, "discriminator learning rate"},
      {"clip", 10.0, "gradient norm clip"},
      {"lr-decay", 0.97, "learning-rate decay factor"},
      {"decay-every", 500, "generator steps per decay"},
      {"iter-r", 500, "generator steps between fake-regression fine-tunes"},
      {"finetune-iters", 100, "iterations per fine-tune"},
      {"init-std", kDefaultInitStd, "initial map scale"},
      {"rank2-time", true, "time channel on conditional paths"},
      {"draws", 100, "noise draws per past for the conditional-expectation score"},
  };
  const OptList test_opts = {{"statistic", "hrpcfd", "hrpcfd or pcfd"},
                             {"alpha", 0.05, "significance level"},
                             {"perms", 200, "permutations"}};
  return {
      {"develop", "unitary developments and PCFs of a dataset",
       data_opts({"x"}) + map_opts + OptList{{"per-sample", false, "include every development"}}, cmd_develop},
      {"pcfd", "EPCFD between two datasets", data_opts({"x", "y"}) + map_opts, cmd_pcfd},
      {"hrpcfd", "EHRPCFD between two datasets",
       data_opts({"x", "y"}) +
           OptList{{"n", 3, "rank-1 unitary dimension"},
                   {"m", 13, "rank-2 unitary dimension"},
                   {"k1", 1, "rank-1 maps"},
                   {"k2", 10, "rank-2 maps"},
                   {"init-std", kDefaultInitStd, "initial map scale"},
                   {"time-augment", true, "prepend a time channel"},
                   {"rank2-time", true, "time channel on conditional paths"},
                   {"disc", "", "train-disc output directory to load instead of random maps"}} +
           regression_opts(1000),
       cmd_hrpcfd},
      {"train-disc", "train the three-stage discriminator", data_opts({"x", "y"}) + disc_opts(), cmd_train_disc},
      {"perm-test", "permutation two-sample test",
       data_opts({"x", "y"}) + OptList{{"train-ratio", 0.5, "fraction of each sample used to train the statistic"}} +
           test_opts + disc_opts(),
       cmd_perm_test},
      {"power-study", "power and type-I error of the permutation test",
       OptList{{"a", "bm", "process under H0"},
               {"b", "fbm:0.4", "alternative process"},
               {"d", 3, "dimension"},
               {"T", 10, "steps"},
               {"runs", 5, "runs"},
               {"tests-per-run", 1, "test pairs per run"},
               {"train-size", 200, "training samples per group"},
               {"test-size", 200, "test samples per group"}} +
           test_opts + disc_opts(),
       cmd_power_study},
      {"train-gan", "train the conditional generator", data_opts({"data"}) + gan_opts + regression_opts(1000),
       cmd_train_gan},
      {"gen-data", "simulate a dataset or sample a trained generator",
       OptList{{"kind", "fbm", "bm, fbm, ar1 or aldous"},
               {"hurst", 0.5, "Hurst parameter"},
               {"phi", 0.8, "AR(1) coefficient"},
               {"sigma", 0.1, "AR(1) noise scale"},
               {"aldous-n", 0, "family index, 0 for the limit"},
               {"d", 1, "dimension"},
               {"T", 10, "steps"},
               {"samples", 1000, "number of samples"},
               {"generator", "", "generator checkpoint; samples futures for the pasts of --data"}} +
           data_opts({"data"}),
       cmd_gen_data, "manifest.json"},
      {"eval", "evaluation metrics",
       data_opts({"real", "fake"}) + OptList{{"generator", "", "generator checkpoint for the conditional score"},
                                             {"draws", 100, "noise draws per past"}},
       cmd_eval},
  };
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string host_name() {
  char buf[256] = {};
  if (gethostname(buf, sizeof(buf) - 1) != 0) return "unknown";
  return buf;
}

int apply_threads(int flag_value) {
  int n = flag_value;
  if (n <= 0) {
    if (const char* env = std::getenv("ADEV_THREADS")) {
      try {
        n = std::stoi(env);
      } catch (const std::exception&) {
        throw ArgumentError("ADEV_THREADS must be a positive integer");
      }
      require_arg(n >= 1, "ADEV_THREADS must be a positive integer");
    }
  }
  if (n > 0) set_num_threads(n);
  return num_threads();
}

}  // namespace

std::string report_without_meta(const std::string& report_json) {
  json j = json::parse(report_json);
  j.erase("meta");
  return j.dump(2);
}

int run_cli(int argc, const char* const* argv) {
  const auto cmds = commands();
  CLI::App app{"adev: unitary path developments, high-rank PCFD, permutation tests and a conditional generator"};
  app.require_subcommand(1);
  std::string config_file, out_dir = "adev_out";
  int threads = 0;
  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, CLI::App*> subs;
  std::map<std::string, std::map<std::string, CLI::Option*>> handles;
  for (const auto& cmd : cmds) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    subs[cmd.name] = sub;
    sub->add_option("--config", config_file, "JSON file with option values; flags take precedence");
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--threads", threads, "worker threads (falls back to ADEV_THREADS)");
    handles[cmd.name]["seed"] = sub->add_option("--seed", raw[cmd.name]["seed"], "master seed");
    for (const auto& o : cmd.opts) {
      std::string help = o.help + " (default " + (o.def.is_string() ? o.def.get<std::string>() : o.def.dump()) + ")";
      handles[cmd.name][o.key] = sub->add_option("--" + o.key, raw[cmd.name][o.key], help);
    }
  }
  if (argc >= 2 && argv[1][0] != '-') {
    bool known = false;
    for (const auto& c : cmds) known = known || c.name == argv[1];
    if (!known) {
      std::cerr << "unknown command '" << argv[1] << "'\n\n" << app.help();
      return kExitInvalid;
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  const Command* cmd = nullptr;
  for (const auto& c : cmds)
    if (subs[c.name]->parsed()) cmd = &c;
  if (cmd == nullptr) {
    std::cerr << app.help();
    return kExitInvalid;
  }

  const auto started = std::chrono::steady_clock::now();
  const std::string started_utc = utc_now();
  Outcome outcome;
  json resolved;
  int used_threads = 0;
  try {
    std::map<std::string, json> defaults;
    defaults["seed"] = std::uint64_t{0};
    for (const auto& o : cmd->opts) defaults[o.key] = o.def;
    for (const auto& [k, v] : defaults) resolved[k] = v;
    if (!config_file.empty()) {
      json file;
      try {
        file = json::parse(read_text_file(config_file));
      } catch (const json::parse_error& e) {
        throw ParseError("config file '" + config_file + "': " + e.what());
      }
      require_arg(file.is_object(), "config file must hold a JSON object");
      for (const auto& [k, v] : file.items()) {
        require_arg(defaults.count(k) == 1, "unknown config key '" + k + "' for " + cmd->name);
        check_type(k, v, defaults[k]);
        resolved[k] = defaults[k].is_number_float() ? json(v.get<double>()) : v;
      }
    }
    for (const auto& [k, opt] : handles[cmd->name])
      if (opt->count() > 0) resolved[k] = convert(k, raw[cmd->name][k], defaults[k]);
    used_threads = apply_threads(threads);
    outcome = cmd->run(Config(resolved));
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const Error& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kExitFailure;
  }

  json report;
  report["command"] = cmd->name;
  report["seed"] = resolved["seed"];
  report["config"] = resolved;
  report["results"] = outcome.results;
  json files = json::array();
  for (const auto& [name, content] : outcome.files) files.push_back(name);
  report["files"] = files;
  std::vector<std::string> args(argv + 1, argv + argc);
  report["meta"] = {{"started_utc", started_utc},
                    {"elapsed_seconds",
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count()},
                    {"threads", used_threads},
                    {"host", host_name()},
                    {"out", out_dir},
                    {"argv", args}};
  try {
    const std::filesystem::path dir(out_dir);
    for (const auto& [name, content] : outcome.files) write_text_file_atomic((dir / name).string(), content);
    write_text_file_atomic((dir / cmd->report).string(), report.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "error: cannot write output: " << e.what() << "\n";
    return kExitFailure;
  }
  std::cout << cmd->name << " (seed " << resolved["seed"].dump() << ") -> " << (std::filesystem::path(out_dir) / cmd->report).string()
            << "\n"
            << outcome.summary;
  return kExitOk;
}

}  // namespace adev
