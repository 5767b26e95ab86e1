#include "aplclt/stats.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "aplclt/count.hpp"
#include "aplclt/errors.hpp"
#include "aplclt/subset.hpp"

namespace aplclt {

void ExperimentConfig::validate() const {
  const auto prm = params();
  validate_probability(p);
  if (num_samples < 1) throw ParameterError("num_samples must be >= 1");
  if (shards < 1) throw ParameterError("shards must be >= 1");
  if (record_components) prm.require_multilinear("component recording");
  const double work = static_cast<double>(num_samples) * n * static_cast<double>(n);
  if (work > work_budget) {
    throw ResourceGuardError("num_samples * n^2 = " + std::to_string(work) +
                             " exceeds the work budget " + std::to_string(work_budget));
  }
}

// ---------------------------------------------------------------- Histogram

void Histogram::add(std::int64_t value, std::uint64_t count) {
  if (count == 0) return;
  counts_[value] += count;
  total_ += count;
}

void Histogram::merge(const Histogram& other) {
  for (const auto& [v, c] : other.counts_) add(v, c);
}

std::uint64_t Histogram::count(std::int64_t value) const {
  auto it = counts_.find(value);
  return it == counts_.end() ? 0 : it->second;
}

double Histogram::probability(std::int64_t value) const {
  return total_ == 0 ? 0.0 : static_cast<double>(count(value)) / static_cast<double>(total_);
}

double Histogram::mean() const {
  long double sum = 0.0L;
  for (const auto& [v, c] : counts_) sum += static_cast<long double>(v) * c;
  return total_ == 0 ? 0.0 : static_cast<double>(sum / total_);
}

double Histogram::variance() const {
  if (total_ < 2) return 0.0;
  const long double m = mean();
  long double acc = 0.0L;
  for (const auto& [v, c] : counts_) {
    const long double dv = v - m;
    acc += dv * dv * c;
  }
  return static_cast<double>(acc / (total_ - 1));
}

std::string Histogram::to_csv() const {
  std::ostringstream out;
  out << "value,count\n";
  for (const auto& [v, c] : counts_) out << v << ',' << c << '\n';
  return out.str();
}

Histogram Histogram::from_csv(const std::string& text) {
  Histogram h;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "value,count") throw ParameterError("histogram CSV must start with value,count");
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParameterError("malformed histogram row: " + line);
    h.add(std::stoll(line.substr(0, comma)), std::stoull(line.substr(comma + 1)));
  }
  return h;
}

// ------------------------------------------------------------- components

void subset_components(const SubsetSample& s, std::uint64_t count, const APParams& params,
                       double p, const SigmaTable& sigma, std::span<double> coords,
                       double& tail) {
  const std::uint32_t k = params.k;
  if (k == 3) {
    const double q = 1.0 - p;
    const double ell = (static_cast<double>(s.popcount()) - p * params.n) / std::sqrt(p * q);
    const auto low = closed_form_low_degrees(ell, params, p);
    const double mu = std::pow(p, 3.0) * static_cast<double>(params.num_progressions());
    const double y = static_cast<double>(count) - mu - low.first - low.second;
    coords[0] = 3.0 * params.half() * ell / sigma.sigma[1];
    coords[1] = y / (degree_weight(3, 3, p) * sigma.sigma[3]);
    tail = y / sigma.sigma_Y;
    return;
  }
  const auto y = biased_transform(s, p);
  const auto sums = degree_sums(y.y, params);
  coords[0] = sums[1] / sigma.sigma[1];
  double tail_raw = 0.0;
  for (std::uint32_t l = 3; l <= k; ++l) {
    coords[l - 2] = sums[l] / sigma.sigma[l];
    tail_raw += degree_weight(k, l, p) * sums[l];
  }
  tail = tail_raw / sigma.sigma_Y;
}

// --------------------------------------------------------------- MC engine

namespace {

struct EngineSetup {
  APParams params;
  std::optional<SigmaTable> sigma;
  std::uint64_t num_blocks = 0;
  std::size_t dense_size = 0;
};

EngineSetup prepare(const ExperimentConfig& cfg, std::optional<ComponentSamples>& comps) {
  cfg.validate();
  EngineSetup setup;
  setup.params = cfg.params();
  setup.num_blocks = (cfg.num_samples + kSamplesPerBlock - 1) / kSamplesPerBlock;
  setup.dense_size = static_cast<std::size_t>(setup.params.num_progressions()) + 1;
  if (cfg.record_components) {
    setup.sigma = sigma_table(setup.params, cfg.p);
    ComponentSamples cs;
    cs.k = cfg.k;
    cs.degrees = DegreeComponents::normalized_degrees(cfg.k);
    cs.coords.dim = cs.degrees.size();
    cs.coords.values.assign(cfg.num_samples * cs.coords.dim, 0.0);
    cs.tail.assign(cfg.num_samples, 0.0);
    comps = std::move(cs);
  }
  return setup;
}

void run_block(std::uint64_t block, const ExperimentConfig& cfg, const EngineSetup& setup,
               std::vector<std::uint64_t>& dense, ComponentSamples* comps) {
  RandomStream stream(cfg.seed, block);
  const std::uint64_t first = block * kSamplesPerBlock;
  const std::uint64_t last = std::min(first + kSamplesPerBlock, cfg.num_samples);
  for (std::uint64_t i = first; i < last; ++i) {
    const SubsetSample s = sample_subset(setup.params, cfg.p, stream);
    const std::uint64_t c = count_kap_naive(s, setup.params);
    ++dense[c];
    if (comps != nullptr) {
      const std::size_t dim = comps->coords.dim;
      std::span<double> row(comps->coords.values.data() + i * dim, dim);
      subset_components(s, c, setup.params, cfg.p, *setup.sigma, row, comps->tail[i]);
    }
  }
}

MCSummary summarize(const Histogram& h) {
  MCSummary sum;
  sum.samples = h.total();
  sum.mean = h.mean();
  sum.variance = h.variance();
  sum.stddev = std::sqrt(sum.variance);
  if (!h.empty()) {
    sum.min = h.counts().begin()->first;
    sum.max = h.counts().rbegin()->first;
  }
  return sum;
}

Histogram from_dense(const std::vector<std::uint64_t>& dense) {
  Histogram h;
  for (std::size_t v = 0; v < dense.size(); ++v) h.add(static_cast<std::int64_t>(v), dense[v]);
  return h;
}

}  // namespace

MCResult run_mc(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  MCResult result;
  const EngineSetup setup = prepare(cfg, result.components);
  ComponentSamples* comps = result.components ? &*result.components : nullptr;

  const int threads = cfg.shards;
  std::vector<std::vector<std::uint64_t>> partial(static_cast<std::size_t>(threads));
  const auto nblocks = static_cast<std::int64_t>(setup.num_blocks);

#pragma omp parallel num_threads(threads)
  {
    auto& dense = partial[static_cast<std::size_t>(omp_get_thread_num())];
    dense.assign(setup.dense_size, 0);
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t b = 0; b < nblocks; ++b) {
      run_block(static_cast<std::uint64_t>(b), cfg, setup, dense, comps);
    }
  }

  std::vector<std::uint64_t> merged(setup.dense_size, 0);
  for (const auto& dense : partial) {
    for (std::size_t v = 0; v < dense.size(); ++v) merged[v] += dense[v];
  }
  result.histogram = from_dense(merged);
  result.summary = summarize(result.histogram);
  result.summary.threads = threads;
  result.summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

MCResult run_mc_serial(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  MCResult result;
  const EngineSetup setup = prepare(cfg, result.components);
  ComponentSamples* comps = result.components ? &*result.components : nullptr;
  std::vector<std::uint64_t> dense(setup.dense_size, 0);
  for (std::uint64_t b = 0; b < setup.num_blocks; ++b) run_block(b, cfg, setup, dense, comps);
  result.histogram = from_dense(dense);
  result.summary = summarize(result.histogram);
  result.summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// ---------------------------------------------------------- distributions

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

double kolmogorov_distance(std::vector<double> samples) {
  if (samples.size() < 1000) {
    throw ParameterError("Kolmogorov distance needs at least 1000 samples");
  }
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double dist = 0.0;
  for (std::size_t i = 0; i < samples.size();) {
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    const double phi = normal_cdf(samples[i]);
    dist = std::max({dist, std::abs(phi - i / n), std::abs(j / n - phi)});
    i = j;
  }
  return dist;
}

double kolmogorov_distance(const Histogram& hist, double mu, double sigma) {
  if (hist.total() < 1000) {
    throw ParameterError("Kolmogorov distance needs at least 1000 samples");
  }
  const double n = static_cast<double>(hist.total());
  double below = 0.0;
  double dist = 0.0;
  for (const auto& [v, c] : hist.counts()) {
    const double phi = normal_cdf((static_cast<double>(v) - mu) / sigma);
    const double above = below + static_cast<double>(c);
    dist = std::max({dist, std::abs(phi - below / n), std::abs(above / n - phi)});
    below = above;
  }
  return dist;
}

double joint_cdf_check(const ComponentSamples& cs, double a, double b) {
  if (cs.size() == 0) throw ParameterError("no component samples recorded");
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (cs.coords.row(i)[0] < a && cs.tail[i] < b) ++hits;
  }
  const double empirical = static_cast<double>(hits) / static_cast<double>(cs.size());
  return std::abs(empirical - normal_cdf(a) * normal_cdf(b));
}

double bump_test_function(std::span<const double> v) {
  double g = 1.0;
  for (double x : v) g *= 0.5 * (1.0 + std::tanh(x));
  return g;
}

SampleMatrix gaussian_reference(std::size_t dim, std::size_t count, std::uint64_t seed) {
  SampleMatrix m;
  m.dim = dim;
  m.values.resize(dim * count);
  RandomStream stream(seed, 0);
  for (double& x : m.values) x = stream.normal();
  return m;
}

namespace {

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;
};

MeanVar test_function_moments(const SampleMatrix& m) {
  const std::size_t n = m.size();
  if (n < 2) throw ParameterError("test-function check needs at least two samples");
  long double sum = 0.0L;
  long double sq = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = bump_test_function(m.row(i));
    sum += g;
    sq += static_cast<long double>(g) * g;
  }
  MeanVar mv;
  mv.mean = static_cast<double>(sum / n);
  mv.var = static_cast<double>((sq - sum * sum / n) / (n - 1));
  return mv;
}

}  // namespace

TestFunctionResult testfunction_check(const SampleMatrix& samples, const SampleMatrix& reference) {
  if (samples.dim != reference.dim) throw ParameterError("sample and reference dimensions differ");
  const MeanVar a = test_function_moments(samples);
  const MeanVar b = test_function_moments(reference);
  TestFunctionResult r;
  r.mean_samples = a.mean;
  r.mean_reference = b.mean;
  r.deviation = std::abs(a.mean - b.mean);
  r.standard_error = std::sqrt(a.var / static_cast<double>(samples.size()) +
                               b.var / static_cast<double>(reference.size()));
  return r;
}

std::vector<double> covariance(const SampleMatrix& m) {
  const std::size_t n = m.size();
  const std::size_t d = m.dim;
  if (n < 2) throw ParameterError("covariance needs at least two samples");
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < d; ++a) mean[a] += m.row(i)[a];
  }
  for (double& x : mean) x /= static_cast<double>(n);
  std::vector<double> cov(d * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = m.row(i);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) cov[a * d + b] += (r[a] - mean[a]) * (r[b] - mean[b]);
    }
  }
  for (double& x : cov) x /= static_cast<double>(n - 1);
  return cov;
}

double l_alpha_frequency(const Histogram& hist, const LatticeModel& model,
                         const IntervalFamily& fam) {
  if (hist.empty()) throw ParameterError("empty histogram");
  std::uint64_t hits = 0;
  for (const auto& [x, c] : hist.counts()) {
    if (in_L_alpha(model, fam, static_cast<double>(x) - model.mu - model.x0)) hits += c;
  }
  return static_cast<double>(hits) / static_cast<double>(hist.total());
}

double predicted_pmf_total_variation(const Histogram& hist, const LatticeModel& model,
                                     double halfwidth) {
  if (hist.empty()) throw ParameterError("empty histogram");
  const auto size_pmf = binomial_pmf(model.n, model.p);
  const auto lo = static_cast<std::int64_t>(std::ceil(model.mu - halfwidth));
  const auto hi = static_cast<std::int64_t>(std::floor(model.mu + halfwidth));
  double tv = 0.0;
  for (std::int64_t x = lo; x <= hi; ++x) {
    tv += std::abs(predicted_pmf(model, size_pmf, x) - hist.probability(x));
  }
  return 0.5 * tv;
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw ParameterError("correlation needs two equal-length series of length >= 2");
  }
  const double n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace aplclt
