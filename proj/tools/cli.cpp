#include "cli.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aplclt/count.hpp"
#include "aplclt/decomp.hpp"
#include "aplclt/errors.hpp"
#include "aplclt/lattice.hpp"
#include "aplclt/scan.hpp"
#include "aplclt/selftest.hpp"
#include "aplclt/stats.hpp"
#include "aplclt/theta.hpp"

namespace aplclt::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kCacheEnv = "APLCLT_CACHE_DIR";

class IoError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string subcommand;
  std::uint32_t n = 101;
  std::uint32_t k = 3;
  double p = 0.5;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 20200101;
  int shards = 0;  // 0: all available threads
  std::string out;
  std::string format = "auto";
  double delta = 1.0 / 9.0;
  double window = 2.0;  // scan / predict half-width in units of sigma
  double work_budget = 1e13;
  std::string from_record;
};

struct Outcome {
  std::string primary;
  Json summary = Json::object();
  int exit_code = 0;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Everything that determines the primary output.
Json config_json(const Options& o) {
  Json j;
  j["subcommand"] = o.subcommand;
  j["n"] = o.n;
  j["k"] = o.k;
  j["p"] = o.p;
  j["samples"] = o.samples;
  j["seed"] = o.seed;
  j["format"] = o.format;
  j["delta"] = o.delta;
  j["window"] = o.window;
  return j;
}

std::string csv_config_line(const Options& o) { return "# config " + config_json(o).dump() + "\n"; }

std::string resolved_format(const Options& o, const char* fallback) {
  if (o.format == "auto") return fallback;
  if (o.format != "csv" && o.format != "json") {
    throw ParameterError("--format must be csv or json");
  }
  return o.format;
}

ExperimentConfig experiment(const Options& o, bool components) {
  ExperimentConfig cfg;
  cfg.n = o.n;
  cfg.k = o.k;
  cfg.p = o.p;
  cfg.num_samples = o.samples;
  cfg.seed = o.seed;
  cfg.shards = o.shards > 0 ? o.shards : omp_get_max_threads();
  cfg.record_components = components;
  cfg.work_budget = o.work_budget;
  return cfg;
}

std::optional<std::filesystem::path> cache_dir() {
  const char* env = std::getenv(kCacheEnv);
  if (env == nullptr || *env == '\0') return std::nullopt;
  return std::filesystem::path(env);
}

SigmaTable sigma_for(const Options& o) {
  const auto prm = APParams::make(o.n, o.k);
  prm.require_multilinear(o.subcommand);
  return cached_sigma_table(prm, o.p, cache_dir());
}

Json summary_json(const MCSummary& s) {
  Json j;
  j["samples"] = s.samples;
  j["mean"] = s.mean;
  j["variance"] = s.variance;
  j["stddev"] = s.stddev;
  j["min"] = s.min;
  j["max"] = s.max;
  j["mc_wall_seconds"] = s.wall_seconds;
  j["threads"] = s.threads;
  return j;
}

Json histogram_json(const Histogram& h) {
  Json rows = Json::array();
  for (const auto& [v, c] : h.counts()) rows.push_back({v, c});
  return rows;
}

// ------------------------------------------------------------- commands

Outcome cmd_sample(const Options& o) {
  const auto prm = APParams::make(o.n, o.k);
  if (!prm.gcd_ok) {
    std::cerr << "warning: gcd(n, (k-1)!) != 1 for n=" << o.n << ", k=" << o.k
              << "; the counting is fine but the degree decomposition does not apply\n";
  }
  const auto res = run_mc(experiment(o, false));
  Outcome out;
  if (resolved_format(o, "csv") == "csv") {
    out.primary = csv_config_line(o) + res.histogram.to_csv();
  } else {
    Json j;
    j["config"] = config_json(o);
    j["histogram"] = histogram_json(res.histogram);
    out.primary = j.dump(2) + "\n";
  }
  out.summary = summary_json(res.summary);
  return out;
}

Outcome cmd_decompose(const Options& o) {
  APParams::make(o.n, o.k).require_multilinear("decompose");
  const auto res = run_mc(experiment(o, true));
  const auto& cs = *res.components;
  Outcome out;
  if (resolved_format(o, "csv") == "csv") {
    std::ostringstream s;
    s << csv_config_line(o) << "sample";
    for (auto d : cs.degrees) s << ",deg" << d;
    s << ",tail\n";
    for (std::size_t i = 0; i < cs.size(); ++i) {
      s << i;
      for (double v : cs.coords.row(i)) s << ',' << num(v);
      s << ',' << num(cs.tail[i]) << '\n';
    }
    out.primary = s.str();
  } else {
    Json j;
    j["config"] = config_json(o);
    j["degrees"] = cs.degrees;
    Json rows = Json::array();
    for (std::size_t i = 0; i < cs.size(); ++i) {
      Json row(std::vector<double>(cs.coords.row(i).begin(), cs.coords.row(i).end()));
      row.push_back(cs.tail[i]);
      rows.push_back(row);
    }
    j["rows"] = rows;
    out.primary = j.dump(2) + "\n";
  }
  const auto cov = covariance(cs.coords);
  out.summary = summary_json(res.summary);
  out.summary["component_covariance"] = cov;
  return out;
}

Outcome cmd_sigma(const Options& o) {
  resolved_format(o, "json");
  const auto table = sigma_for(o);
  Json j;
  j["config"] = config_json(o);
  j["sigma_table"] = Json::parse(sigma_table_to_json(table));
  Outcome out;
  out.primary = j.dump(2) + "\n";
  out.summary["sigma_total"] = table.sigma_total;
  out.summary["sigma_Y"] = table.sigma_Y;
  return out;
}

Outcome cmd_lattice(const Options& o) {
  resolved_format(o, "json");
  const auto prm = APParams::make(o.n, o.k);
  const auto model = build_lattice_model(prm, o.p, sigma_for(o));
  Json j;
  j["config"] = config_json(o);
  j["lattice"] = Json::parse(lattice_model_to_json(model));
  Outcome out;
  out.primary = j.dump(2) + "\n";
  out.summary["G"] = model.G;
  out.summary["delta"] = model.delta;
  return out;
}

Outcome cmd_theta(const Options& o) {
  const ThetaEvaluator ev(o.delta);
  const auto ext = extremal_ratio(ev);
  const auto pars = variance_lower_bound(ev);
  Json rec;
  rec["delta"] = o.delta;
  rec["x_max"] = ext.x_max;
  rec["x_min"] = ext.x_min;
  rec["C"] = ext.ratio;
  rec["extremes_at_half_lattice"] = ext.extremes_at_half_lattice;
  rec["parseval_one_sided"] = pars.one_sided_sum;
  rec["variance_series"] = pars.variance_series;
  rec["variance_quadrature"] = pars.variance_quadrature;
  Outcome out;
  if (resolved_format(o, "csv") == "csv") {
    std::ostringstream s;
    s << csv_config_line(o) << "x,f_direct,f_fourier\n";
    for (int i = 0; i <= 1000; ++i) {
      const double x = i / 1000.0;
      s << num(x) << ',' << num(f_direct(x, ev)) << ',' << num(f_fourier(x, ev)) << '\n';
    }
    out.primary = s.str();
  } else {
    Json j;
    j["config"] = config_json(o);
    j["theta"] = rec;
    out.primary = j.dump(2) + "\n";
  }
  out.summary = rec;
  return out;
}

Outcome cmd_scan(const Options& o) {
  resolved_format(o, "json");
  const auto prm = APParams::make(o.n, o.k);
  const auto model = build_lattice_model(prm, o.p, sigma_for(o));
  const auto res = run_mc(experiment(o, false));
  const auto report = lclt_scan(res.histogram, model, o.window * model.sigma_total);
  Json j;
  j["config"] = config_json(o);
  j["report"] = Json::parse(scan_report_to_json(report));
  Outcome out;
  out.primary = j.dump(2) + "\n";
  out.summary = summary_json(res.summary);
  out.summary["max_scaled_deviation"] = report.max_scaled_deviation;
  out.summary["pooled_ratio"] = report.pooled.ratio;
  out.summary["pooled_p_value"] = report.pooled.p_value;
  out.summary["pooled_ratio_mod_g"] = report.pooled_mod_g.ratio;
  return out;
}

Outcome cmd_predict(const Options& o) {
  const auto prm = APParams::make(o.n, o.k);
  const auto model = build_lattice_model(prm, o.p, sigma_for(o));
  const auto size_pmf = binomial_pmf(model.n, model.p);
  const double hw = o.window * model.sigma_total;
  const auto lo = static_cast<std::int64_t>(std::ceil(model.mu - hw));
  const auto hi = static_cast<std::int64_t>(std::floor(model.mu + hw));
  double mass = 0.0;
  Outcome out;
  if (resolved_format(o, "csv") == "csv") {
    std::ostringstream s;
    s << csv_config_line(o) << "x,predicted,gaussian\n";
    for (std::int64_t x = lo; x <= hi; ++x) {
      const double pr = predicted_pmf(model, size_pmf, x);
      mass += pr;
      s << x << ',' << num(pr) << ','
        << num(normal_pdf(static_cast<double>(x), model.mu, model.sigma_total)) << '\n';
    }
    out.primary = s.str();
  } else {
    Json j;
    j["config"] = config_json(o);
    Json rows = Json::array();
    for (std::int64_t x = lo; x <= hi; ++x) {
      const double pr = predicted_pmf(model, size_pmf, x);
      mass += pr;
      rows.push_back({{"x", x}, {"predicted", pr}});
    }
    j["pmf"] = rows;
    out.primary = j.dump(2) + "\n";
  }
  out.summary["window_mass"] = mass;
  return out;
}

Outcome cmd_compare(const Options& o) {
  resolved_format(o, "json");
  const auto prm = APParams::make(o.n, o.k);
  const auto model = build_lattice_model(prm, o.p, sigma_for(o));
  const auto res = run_mc(experiment(o, false));
  const double hw = o.window * model.sigma_total;
  const auto report = lclt_scan(res.histogram, model, hw);
  const ThetaEvaluator ev(model.delta);

  double gauss_tv = 0.0;
  for (const auto& row : report.rows) gauss_tv += std::abs(row.p_hat - row.gaussian);
  gauss_tv *= 0.5;

  Json j;
  j["config"] = config_json(o);
  j["scan"] = {{"max_scaled_deviation", report.max_scaled_deviation},
               {"argmax", report.argmax},
               {"pooled_ratio", report.pooled.ratio},
               {"pooled_p_value", report.pooled.p_value},
               {"pooled_ratio_mod_g", report.pooled_mod_g.ratio}};
  j["predict"] = {{"total_variation", predicted_pmf_total_variation(res.histogram, model, hw)}};
  j["lclt_null"] = {{"total_variation", gauss_tv}};
  j["theta"] = {{"delta", model.delta}, {"C", extremal_ratio(ev).ratio}};

  IntervalFamily fam;
  fam.s = 3;
  fam.B = model.G / 8.0;
  fam.eta = model.eta;
  std::vector<double> empirical;
  std::vector<double> predicted;
  Json profile = Json::array();
  for (int i = 0; i < 10; ++i) {
    fam.alpha = i / 10.0;
    const double e = l_alpha_frequency(res.histogram, model, fam);
    const auto pr = predicted_L_probability(model, fam, ev);
    std::int64_t members = 0;
    for (auto x = static_cast<std::int64_t>(std::floor(model.mu - 4 * model.G * (fam.s + 1)));
         x <= static_cast<std::int64_t>(std::ceil(model.mu + 4 * model.G * (fam.s + 1))); ++x) {
      if (in_L_alpha(model, fam, static_cast<double>(x) - model.mu - model.x0)) ++members;
    }
    empirical.push_back(e);
    predicted.push_back(pr.value);
    profile.push_back({{"alpha", fam.alpha},
                       {"empirical", e},
                       {"predicted", pr.value},
                       {"extrapolated", pr.extrapolated},
                       {"lclt_null", lclt_interval_prediction(members, model.sigma_total)}});
  }
  const auto [mn, mx] = std::minmax_element(empirical.begin(), empirical.end());
  j["l_alpha"] = {{"s", fam.s},
                  {"B", fam.B},
                  {"profile", profile},
                  {"pearson", pearson_correlation(empirical, predicted)},
                  {"empirical_max_over_min", *mx / *mn}};
  Outcome out;
  out.primary = j.dump(2) + "\n";
  out.summary = summary_json(res.summary);
  out.summary["pooled_ratio"] = report.pooled.ratio;
  return out;
}

Outcome cmd_selftest(const Options& o) {
  resolved_format(o, "json");
  const auto results = run_selftest();
  Json rows = Json::array();
  bool all = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.detail.empty()) std::cout << ": " << r.detail;
    std::cout << '\n';
    rows.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    all = all && r.passed;
  }
  Json j;
  j["config"] = config_json(o);
  j["checks"] = rows;
  j["passed"] = all;
  Outcome out;
  out.primary = j.dump(2) + "\n";
  out.summary["passed"] = all;
  out.exit_code = all ? 0 : 3;
  return out;
}

Outcome dispatch(const Options& o) {
  if (o.subcommand == "sample") return cmd_sample(o);
  if (o.subcommand == "decompose") return cmd_decompose(o);
  if (o.subcommand == "sigma") return cmd_sigma(o);
  if (o.subcommand == "lattice") return cmd_lattice(o);
  if (o.subcommand == "theta") return cmd_theta(o);
  if (o.subcommand == "scan") return cmd_scan(o);
  if (o.subcommand == "predict") return cmd_predict(o);
  if (o.subcommand == "compare") return cmd_compare(o);
  if (o.subcommand == "selftest") return cmd_selftest(o);
  throw ParameterError("unknown subcommand: " + o.subcommand);
}

std::string default_out(const Options& o) {
  std::string ext = "json";
  if (o.format == "csv" ||
      (o.format == "auto" && (o.subcommand == "sample" || o.subcommand == "decompose" ||
                              o.subcommand == "theta" || o.subcommand == "predict"))) {
    ext = "csv";
  }
  return o.subcommand + "." + ext;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing " + path);
}

Options load_record(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read record " + path);
  Json rec;
  try {
    rec = Json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("malformed record " + path + ": " + e.what());
  }
  try {
    const auto& c = rec.at("config");
    Options o;
    o.subcommand = c.at("subcommand").get<std::string>();
    o.n = c.at("n").get<std::uint32_t>();
    o.k = c.at("k").get<std::uint32_t>();
    o.p = c.at("p").get<double>();
    o.samples = c.at("samples").get<std::uint64_t>();
    o.seed = c.at("seed").get<std::uint64_t>();
    o.format = c.at("format").get<std::string>();
    o.delta = c.at("delta").get<double>();
    o.window = c.at("window").get<double>();
    o.shards = rec.at("shards").get<int>();
    o.work_budget = rec.at("work_budget").get<double>();
    o.out = rec.at("output").get<std::string>();
    return o;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("record " + path + " is missing fields: " + e.what());
  }
}

int execute(Options o) {
  if (o.out.empty()) o.out = default_out(o);
  const auto start = std::chrono::steady_clock::now();
  Outcome res = dispatch(o);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  write_file(o.out, res.primary);
  Json rec;
  rec["tool"] = "aplclt";
  rec["version"] = APLCLT_VERSION;
  rec["config"] = config_json(o);
  rec["shards"] = o.shards;
  rec["work_budget"] = o.work_budget;
  rec["output"] = o.out;
  rec["wall_seconds"] = wall;
  rec["summary"] = res.summary;
  rec["exit_code"] = res.exit_code;
  write_file(o.out + ".record.json", rec.dump(2) + "\n");

  std::cout << o.subcommand << ": wrote " << o.out << '\n' << res.summary.dump() << '\n';
  return res.exit_code;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--n", o.n, "modulus n")->capture_default_str();
  sub->add_option("--k", o.k, "progression length k")->capture_default_str();
  sub->add_option("--p", o.p, "inclusion probability")->capture_default_str();
  sub->add_option("--samples", o.samples, "Monte Carlo samples")->capture_default_str();
  sub->add_option("--seed", o.seed, "base seed")->capture_default_str();
  sub->add_option("--shards", o.shards, "threads (0 = all available)")->capture_default_str();
  sub->add_option("--out", o.out, "primary output path");
  sub->add_option("--format", o.format, "csv, json or auto")
      ->check(CLI::IsMember({"auto", "csv", "json"}))
      ->capture_default_str();
  sub->add_option("--delta", o.delta, "theta width")->capture_default_str();
  sub->add_option("--window", o.window, "half-width in units of sigma")->capture_default_str();
  sub->add_option("--work-budget", o.work_budget, "limit on samples * n^2")
      ->capture_default_str();
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Monte Carlo and exact tools for arithmetic-progression counts in random subsets"};
  app.set_version_flag("--version", std::string(APLCLT_VERSION));
  Options opts;
  std::string from_record;
  std::string replay_out;
  app.add_option("--from-record", from_record, "re-run the command stored in a record file");
  app.add_option("--out", replay_out, "output path when replaying a record");
  app.require_subcommand(0, 1);

  const std::vector<std::pair<const char*, const char*>> commands = {
      {"sample", "histogram of the count"},
      {"decompose", "per-sample normalized degree components"},
      {"sigma", "normalization table"},
      {"lattice", "lattice model constants"},
      {"theta", "theta profile and its peak/trough ratio"},
      {"scan", "LCLT deviation scan"},
      {"predict", "heuristic discrete-Gaussian pmf"},
      {"compare", "scan vs prediction vs LCLT null"},
      {"selftest", "invariant suite"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, opts);
    sub->callback([&opts, name = std::string(name)] { opts.subcommand = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (!from_record.empty()) {
      if (!opts.subcommand.empty()) throw ParameterError("--from-record replaces the subcommand");
      Options o = load_record(from_record);
      if (!replay_out.empty()) o.out = replay_out;
      return execute(o);
    }
    if (opts.subcommand.empty()) {
      std::cerr << app.help();
      return 1;
    }
    return execute(opts);
  } catch (const ResourceGuardError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("aplclt");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  argv.push_back(nullptr);
  return run(static_cast<int>(storage.size()), argv.data());
}

}  // namespace aplclt::cli
