#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgex/analytics.hpp"
#include "edgex/errors.hpp"
#include "edgex/graphlimit.hpp"
#include "edgex/intensity.hpp"
#include "edgex/sampler.hpp"
#include "edgex/weights.hpp"

namespace edgex {

using json = nlohmann::json;

struct ExperimentConfig {
  int schema = 1;
  json intensity;
  std::string mode = "presence_t";  // fixed_m | poisson_t | presence_t
  std::vector<double> schedule;
  std::uint64_t replicates = 1;
  std::uint64_t seed = 0;
  std::vector<json> checks;
  std::string out_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;

  static ExperimentConfig parse(const json& j) {
    ExperimentConfig c;
    if (!j.is_object()) throw schema_error("config: expected an object");
    if (!j.contains("intensity")) throw schema_error("config.intensity: missing");
    c.schema = j.value("schema", 1);
    c.intensity = j.at("intensity");
    c.mode = j.value("mode", "presence_t");
    if (c.mode != "fixed_m" && c.mode != "poisson_t" && c.mode != "presence_t")
      throw schema_error("config.mode: must be fixed_m | poisson_t | presence_t");
    if (!j.contains("schedule") || !j.at("schedule").is_array() || j.at("schedule").empty())
      throw schema_error("config.schedule: nonempty array required");
    for (auto& v : j.at("schedule")) c.schedule.push_back(v.get<double>());
    for (std::size_t k = 1; k < c.schedule.size(); ++k)
      if (!(c.schedule[k] > c.schedule[k - 1]))
        throw schema_error("config.schedule: must be strictly increasing");
    c.replicates = j.value("replicates", 1ULL);
    if (c.replicates < 1) throw schema_error("config.replicates: must be >= 1");
    c.seed = j.value("seed", 0ULL);
    if (j.contains("checks")) {
      if (!j.at("checks").is_array()) throw schema_error("config.checks: expected array");
      std::size_t idx = 0;
      for (auto& chk : j.at("checks")) {
        if (!chk.is_object() || !chk.contains("name"))
          throw schema_error("config.checks[" + std::to_string(idx) + "].name: missing");
        c.checks.push_back(chk);
        ++idx;
      }
    }
    c.out_dir = j.value("out_dir", "out");
    return c;
  }

  json to_json() const {
    json j;
    j["schema"] = schema;
    j["intensity"] = intensity;
    j["mode"] = mode;
    j["schedule"] = schedule;
    j["replicates"] = replicates;
    j["seed"] = seed;
    j["checks"] = checks;
    j["out_dir"] = out_dir;
    return j;
  }
};

// Builds the intensity matrix described by the config's intensity object.
// Random-weight families (gem, dirichlet) draw from a stream derived from the
// experiment seed, so the whole experiment stays reproducible.
inline IntensityMatrix build_intensity(const json& spec, std::uint64_t seed) {
  if (!spec.is_object() || !spec.contains("kind"))
    throw schema_error("intensity.kind: missing");
  std::string kind = spec.at("kind").get<std::string>();
  if (kind == "rank1") {
    std::string family = spec.value("family", "power_law");
    WeightSeq q;
    if (family == "gem") {
      auto rng = make_stream(seed, 0, 9001);
      q = stick_break_gem(spec.value("alpha", 0.0), spec.value("theta", 1.0),
                          spec.value("mass_epsilon", 1e-9), rng);
    } else if (family == "dirichlet") {
      auto rng = make_stream(seed, 0, 9002);
      q = polya_dirichlet_weights(spec.value("N", 2ULL), spec.value("alpha", 1.0), rng);
    } else {
      WeightFamilySpec ws;
      if (family == "power_law") ws.family = PowerLawFamily{spec.value("gamma", 2.0)};
      else if (family == "geometric") ws.family = GeometricFamily{spec.value("b", 2.0)};
      else if (family == "slow_log") ws.family = SlowLogFamily{};
      else if (family == "explicit") {
        ExplicitFamily ef;
        for (auto& w : spec.at("weights")) ef.weights.push_back(w.get<double>());
        ws.family = ef;
      } else {
        throw schema_error("intensity.family: unknown family '" + family + "'");
      }
      ws.truncation_count = spec.value("truncation_count", 0ULL);
      ws.truncation_mass_budget = spec.value("truncation_mass_budget", 0.0);
      if (family == "explicit" && ws.truncation_count == 0) ws.truncation_count = 1;
      q = weights_family(ws);
    }
    return build_rank1(std::move(q), spec.value("loops", false));
  }
  if (kind == "factorial") return factorial_intensity(spec.value("n_max", 6LL));
  if (kind == "band") {
    label_t d = spec.value("d", 2LL);
    label_t n_max = spec.value("n_max", 0LL);
    std::string profile = spec.value("profile", "geometric");
    if (profile == "unit") {
      if (n_max <= 0) throw schema_error("intensity.n_max: unit band needs finite n_max");
      return band_intensity(d, n_max, [](label_t, label_t) { return 1.0; });
    }
    if (profile == "geometric")
      return band_intensity(d, n_max, [](label_t i, label_t j) {
        return std::pow(2.0, -static_cast<double>(std::max(i, j)));
      });
    throw schema_error("intensity.profile: unknown profile '" + profile + "'");
  }
  if (kind == "chameleon") {
    auto k_max = spec.value("k_max", 3ULL);
    return chameleon_intensity(k_max, canonical_graph_enumeration(k_max)).mu;
  }
  if (kind == "explicit_file") {
    std::ifstream in(spec.at("path").get<std::string>());
    if (!in) throw io_error("intensity.path: cannot open " + spec.at("path").get<std::string>());
    return IntensityMatrix::load(in);
  }
  throw schema_error("intensity.kind: unknown kind '" + kind + "'");
}

struct Verdict {
  std::string check;
  json params;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  bool inconclusive = false;

  json to_json() const {
    return json{{"check", check},   {"params", params}, {"statistic", statistic},
                {"threshold", threshold}, {"pass", pass},     {"inconclusive", inconclusive}};
  }
};

struct ExperimentReport {
  std::string version = kVersion;
  std::uint64_t seed = 0;
  ExperimentConfig config;
  GrowthCurve curve;
  std::vector<std::pair<double, DegreeTail>> tails;  // (t, tail)
  std::vector<Verdict> verdicts;
  std::vector<json> distances;
  double wall_clock_seconds = 0.0;  // console diagnostics; not part of the emitted files

  json to_json() const {
    json j;
    j["version"] = version;
    j["seed"] = seed;
    j["config"] = config.to_json();
    j["curve"] = {{"t", curve.grid},
                  {"v_exp", curve.v_expected},
                  {"e_exp", curve.e_expected},
                  {"v_obs_mean", curve.v_obs_mean},
                  {"e_obs_mean", curve.e_obs_mean},
                  {"v_obs_se", curve.v_obs_se},
                  {"e_obs_se", curve.e_obs_se},
                  {"replicates", curve.replicate_count}};
    json jt = json::array();
    for (auto& [t, tail] : tails)
      jt.push_back({{"t", t}, {"k", tail.k_grid}, {"pi_ge_k", tail.pi_ge_k}, {"v_total", tail.v_total}});
    j["tails"] = jt;
    json jv = json::array();
    for (auto& v : verdicts) jv.push_back(v.to_json());
    j["verdicts"] = jv;
    j["distances"] = distances;
    return j;
  }
};

namespace detail {

inline GrowthCurve observe_curve(const IntensityMatrix& mu, const ExperimentConfig& cfg) {
  if (cfg.mode == "presence_t")
    return convergence_ratio_curve(mu, cfg.schedule, cfg.replicates, cfg.seed);
  GrowthCurve curve;
  curve.grid = cfg.schedule;
  curve.replicate_count = cfg.replicates;
  for (std::size_t gi = 0; gi < cfg.schedule.size(); ++gi) {
    double x = cfg.schedule[gi];
    // fixed_m grids are edge counts; the expectation columns use the
    // surrogate time m / ||mu||
    double t = cfg.mode == "fixed_m" ? x / mu.total_mass() : x;
    curve.v_expected.push_back(expected_vertices(mu, t));
    curve.e_expected.push_back(expected_edges(mu, t));
    MeanVar v_acc, e_acc;
    for (std::uint64_t rep = 0; rep < cfg.replicates; ++rep) {
      auto rng = make_stream(cfg.seed, rep, gi);
      MultiGraph g = cfg.mode == "fixed_m"
                         ? sample_iid_multigraph(mu, static_cast<std::uint64_t>(x), rng)
                         : sample_poisson_multigraph(mu, x, rng);
      SimpleGraph s = simplify(g);
      v_acc.add(static_cast<double>(s.vertex_count()));
      e_acc.add(static_cast<double>(s.edge_count()));
    }
    curve.v_obs_mean.push_back(v_acc.mean);
    curve.e_obs_mean.push_back(e_acc.mean);
    curve.v_obs_se.push_back(v_acc.stderr_mean());
    curve.e_obs_se.push_back(e_acc.stderr_mean());
  }
  return curve;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Named verification registry; every check name maps to exactly one
// analytics / graphlimit verification.

using CheckFn = std::function<Verdict(const ExperimentConfig&, const IntensityMatrix&,
                                      const GrowthCurve&, const json&)>;

inline const std::map<std::string, CheckFn>& check_registry() {
  static const std::map<std::string, CheckFn> registry = {
      {"ratio_convergence",
       [](const ExperimentConfig& cfg, const IntensityMatrix&, const GrowthCurve& curve,
          const json& params) {
         Verdict v;
         v.check = "ratio_convergence";
         v.params = params;
         v.threshold = params.value("tolerance", 0.1);
         double worst = 0.0;
         std::size_t last = curve.grid.size() - 1;
         worst = std::max(std::abs(curve.v_obs_mean[last] / curve.v_expected[last] - 1.0),
                          std::abs(curve.e_obs_mean[last] / curve.e_expected[last] - 1.0));
         v.statistic = worst;
         v.pass = worst <= v.threshold;
         return v;
       }},
      {"powerlaw_band",
       [](const ExperimentConfig& cfg, const IntensityMatrix& mu, const GrowthCurve&,
          const json& params) {
         Verdict v;
         v.check = "powerlaw_band";
         v.params = params;
         v.threshold = params.value("ratio_cap", 50.0);
         std::vector<DegreeTail> tails;
         for (std::size_t gi = 0; gi < cfg.schedule.size(); ++gi) {
           auto rng = make_stream(cfg.seed, 7700, gi);
           tails.push_back(degree_tail(sample_presence(mu, cfg.schedule[gi], rng)));
         }
         auto band = powerlaw_band_check(tails, params.value("c_frac", 0.05), v.threshold);
         v.statistic = band.ratio;
         v.pass = band.pass;
         v.inconclusive = band.inconclusive;
         return v;
       }},
      {"normality",
       [](const ExperimentConfig& cfg, const IntensityMatrix& mu, const GrowthCurve&,
          const json& params) {
         Verdict v;
         v.check = "normality";
         v.params = params;
         v.threshold = params.value("threshold", 0.08);
         auto res = normality_check(mu, cfg.schedule.back(),
                                    params.value("replicates", 500ULL), cfg.seed ^ 0x5a5a, v.threshold);
         v.statistic = res.ks;
         v.pass = res.pass;
         v.inconclusive = res.inconclusive;
         return v;
       }},
      {"density_class",
       [](const ExperimentConfig& cfg, const IntensityMatrix&, const GrowthCurve& curve,
          const json& params) {
         Verdict v;
         v.check = "density_class";
         v.params = params;
         auto cls = density_classify(curve);
         std::string expected = params.value("expected", "sparse");
         v.statistic = cls == DensityClass::inconclusive ? -1.0 : 0.0;
         v.pass = std::string(to_string(cls)) == expected;
         v.inconclusive = cls == DensityClass::inconclusive;
         return v;
       }},
      {"halfgraphon_dcut",
       [](const ExperimentConfig& cfg, const IntensityMatrix& mu, const GrowthCurve&,
          const json& params) {
         Verdict v;
         v.check = "halfgraphon_dcut";
         v.params = params;
         v.threshold = params.value("bound", 0.25);
         std::uint64_t reps = params.value("replicates", 5ULL);
         MeanVar acc;
         for (std::uint64_t rep = 0; rep < reps; ++rep) {
           auto rng = make_stream(cfg.seed, rep, 7801);
           SimpleGraph g = sample_presence(mu, cfg.schedule.back(), rng);
           auto w = empirical_graphon(g);
           auto rep_d = dcut_upper(w, AnalyticGraphon::half_graphon(), 64, rng);
           acc.add(rep_d.dcut_upper);
         }
         v.statistic = acc.mean;
         v.pass = acc.mean <= v.threshold;
         return v;
       }},
      {"graphex_window",
       [](const ExperimentConfig& cfg, const IntensityMatrix& mu, const GrowthCurve&,
          const json& params) {
         Verdict v;
         v.check = "graphex_window";
         v.params = params;
         v.threshold = params.value("tolerance", 0.15);
         if (!mu.is_rank1()) throw schema_error("graphex_window: rank1 intensity required");
         double gamma = params.value("gamma", 2.0);
         double window = params.value("window", 5.0);
         double r = params.value("r", 1.0);
         auto seeds = params.value("seeds", 1000ULL);
         double t = cfg.schedule.back();
         double s = std::pow(t, 1.0 / (2.0 * gamma));
         double c = mu.rank1_data().q.q(1);
         auto cap = static_cast<label_t>(std::ceil(s * window)) + 64;
         auto ref = AnalyticGraphon::power_tail(c, gamma);
         std::vector<SimpleGraph> emp, refs;
         for (std::uint64_t sd = 0; sd < seeds; ++sd) {
           auto rng = make_stream(cfg.seed, sd, 7901);
           auto win = sample_presence_window(mu, t, cap, rng);
           emp.push_back(sample_gr_window(stretched_graphon(win, s), r, window, rng).graph);
           auto rng2 = make_stream(cfg.seed, sd, 7902);
           refs.push_back(sample_gr_window(ref, r, window, rng2).graph);
         }
         double worst = 0.0;
         for (auto& d : subgraph_stats_distance(emp, refs))
           if (d.stat == "vertices" || d.stat == "edges") worst = std::max(worst, d.rel_diff);
         v.statistic = worst;
         v.pass = worst <= v.threshold;
         return v;
       }},
      {"dust_domination",
       [](const ExperimentConfig& cfg, const IntensityMatrix& mu, const GrowthCurve&,
          const json& params) {
         Verdict v;
         v.check = "dust_domination";
         v.params = params;
         v.threshold = params.value("min_fraction", 0.9);
         std::uint64_t reps = params.value("replicates", 10ULL);
         MeanVar acc;
         for (std::uint64_t rep = 0; rep < reps; ++rep) {
           auto rng = make_stream(cfg.seed, rep, 7950);
           MultiGraph g = sample_poisson_multigraph(mu, cfg.schedule.back(), rng);
           auto dec = decompose(g);
           double fringe = static_cast<double>(dec.star_edge_total() + dec.dust_edges);
           double central = static_cast<double>(simplify(dec.central).edge_count());
           acc.add(fringe / std::max(1.0, fringe + central));
         }
         v.statistic = acc.mean;
         v.pass = acc.mean >= v.threshold;
         return v;
       }},
  };
  return registry;
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  for (auto& chk : cfg.checks) {
    std::string name = chk.at("name").get<std::string>();
    if (!check_registry().count(name))
      throw schema_error("config.checks: unknown check '" + name + "'");
  }
  ExperimentReport report;
  report.seed = cfg.seed;
  report.config = cfg;
  IntensityMatrix mu = build_intensity(cfg.intensity, cfg.seed);
  report.curve = detail::observe_curve(mu, cfg);
  if (cfg.mode == "presence_t") {
    for (std::size_t gi = 0; gi < cfg.schedule.size(); ++gi) {
      auto rng = make_stream(cfg.seed, 7700, gi);
      SimpleGraph g = sample_presence(mu, cfg.schedule[gi], rng);
      if (g.edge_count() > 0) report.tails.emplace_back(cfg.schedule[gi], degree_tail(g));
    }
  }
  for (auto& chk : cfg.checks) {
    std::string name = chk.at("name").get<std::string>();
    report.verdicts.push_back(check_registry().at(name)(cfg, mu, report.curve, chk));
  }
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

// JSON single file or CSV bundle; outputs are deterministic for a fixed
// (config, seed, version), so wall-clock stays out of the files.
inline std::vector<std::string> emit_report(const ExperimentReport& report,
                                            const std::string& format,
                                            const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw io_error("emit_report: cannot create " + out_dir);
  std::vector<std::string> written;
  auto write_file = [&](const std::string& name, const std::string& content) {
    fs::path p = fs::path(out_dir) / name;
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) throw io_error("emit_report: cannot write " + p.string());
    os << content;
    written.push_back(p.string());
  };
  write_file("report.json", report.to_json().dump(2) + "\n");
  if (format == "csv-bundle") {
    std::ostringstream curve;
    write_curve_csv(curve, report.curve);
    write_file("curve.csv", curve.str());
    for (auto& [t, tail] : report.tails) {
      std::ostringstream os;
      write_tail_csv(os, tail);
      std::ostringstream name;
      name << "tail_t" << t << ".csv";
      write_file(name.str(), os.str());
    }
  } else if (format != "json") {
    throw schema_error("emit_report: format must be json or csv-bundle");
  }
  return written;
}

}  // namespace edgex
