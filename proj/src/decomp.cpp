#include "aplclt/decomp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "aplclt/errors.hpp"

namespace aplclt {

BiasedVector biased_transform(const SubsetSample& s, double p) {
  validate_probability(p);
  BiasedVector out;
  out.p = p;
  out.q = 1.0 - p;
  const double scale = std::sqrt(p * out.q);
  const double one = (1.0 - p) / scale;
  const double zero = -p / scale;
  out.y.resize(s.size());
  for (std::uint32_t i = 0; i < s.size(); ++i) out.y[i] = s.test(i) ? one : zero;
  return out;
}

double degree_weight(std::uint32_t k, std::uint32_t degree, double p) {
  const double q = 1.0 - p;
  return std::pow(p, static_cast<double>(k) - 0.5 * degree) * std::pow(q, 0.5 * degree);
}

double component_direct(const BiasedVector& y, std::uint32_t degree, const APParams& params) {
  params.require_multilinear("component_direct");
  if (degree > params.k) {
    throw ParameterError("degree " + std::to_string(degree) + " exceeds k=" +
                         std::to_string(params.k));
  }
  if (y.y.size() != params.n) throw ParameterError("biased vector length differs from n");

  const std::uint32_t n = params.n;
  const std::uint32_t k = params.k;
  std::vector<std::uint32_t> masks;
  for (std::uint32_t m = 0; m < (1U << k); ++m) {
    if (static_cast<std::uint32_t>(std::popcount(m)) == degree) masks.push_back(m);
  }

  std::vector<double> vals(k);
  double total = 0.0;
  for (std::uint32_t d = 1; d <= params.half(); ++d) {
    for (std::uint32_t a = 0; a < n; ++a) {
      for (std::uint32_t i = 0; i < k; ++i) {
        vals[i] = y.y[(a + static_cast<std::uint64_t>(i) * d) % n];
      }
      for (std::uint32_t m : masks) {
        double prod = 1.0;
        for (std::uint32_t i = 0; i < k; ++i) {
          if (m & (1U << i)) prod *= vals[i];
        }
        total += prod;
      }
    }
  }
  return degree_weight(k, degree, y.p) * total;
}

std::vector<double> degree_sums(std::span<const double> y, const APParams& params) {
  params.require_multilinear("degree_sums");
  if (y.size() != params.n) throw ParameterError("input length differs from n");
  const std::uint32_t n = params.n;
  const std::uint32_t k = params.k;
  std::vector<double> totals(k + 1, 0.0);
  std::vector<double> e(k + 1);
  for (std::uint32_t d = 1; d <= params.half(); ++d) {
    for (std::uint32_t a = 0; a < n; ++a) {
      std::fill(e.begin(), e.end(), 0.0);
      e[0] = 1.0;
      std::uint64_t idx = a;
      for (std::uint32_t i = 0; i < k; ++i) {
        const double v = y[idx];
        for (std::uint32_t j = i + 1; j >= 1; --j) e[j] += e[j - 1] * v;
        idx += d;
        if (idx >= n) idx -= n;
      }
      for (std::uint32_t j = 0; j <= k; ++j) totals[j] += e[j];
    }
  }
  return totals;
}

std::vector<std::uint32_t> DegreeComponents::normalized_degrees(std::uint32_t k) {
  std::vector<std::uint32_t> degrees{1};
  for (std::uint32_t l = 3; l <= k; ++l) degrees.push_back(l);
  return degrees;
}

DegreeComponents decompose(const BiasedVector& y, const APParams& params,
                           const SigmaTable& sigma) {
  const auto sums = degree_sums(y.y, params);
  DegreeComponents out;
  out.raw.resize(params.k + 1);
  for (std::uint32_t l = 0; l <= params.k; ++l) {
    out.raw[l] = degree_weight(params.k, l, y.p) * sums[l];
  }
  for (std::uint32_t l : DegreeComponents::normalized_degrees(params.k)) {
    out.normalized.push_back(sums[l] / sigma.sigma[l]);
  }
  return out;
}

LowDegreeValues closed_form_low_degrees(double ellsum, const APParams& params, double p) {
  params.require_multilinear("closed_form_low_degrees");
  validate_probability(p);
  const double q = 1.0 - p;
  const double n = params.n;
  const double k = params.k;
  LowDegreeValues v;
  v.first = k * (n - 1.0) / 2.0 * std::pow(p, k - 0.5) * std::sqrt(q) * ellsum;
  const double pairs = k * (k - 1.0) / 2.0;
  v.second = pairs * std::pow(p, k - 1.0) * q / 2.0 *
             (ellsum * ellsum - n - (1.0 - 2.0 * p) / std::sqrt(p * q) * ellsum);
  return v;
}

std::uint64_t sigma_squared_exact(std::uint32_t degree, const APParams& params) {
  params.require_multilinear("sigma_exact");
  if (degree < 1 || degree > params.k) {
    throw ParameterError("sigma degree must lie in 1..k");
  }
  const std::uint32_t n = params.n;
  const std::uint32_t k = params.k;
  // Sorted residues packed in base n must fit in 64 bits.
  const double key_bits = degree * std::log2(static_cast<double>(n));
  if (key_bits >= 63.0) {
    throw UnsupportedParameters("index-set keys do not fit 64 bits for this (n, degree)");
  }

  std::vector<std::uint32_t> masks;
  for (std::uint32_t m = 0; m < (1U << k); ++m) {
    if (static_cast<std::uint32_t>(std::popcount(m)) == degree) masks.push_back(m);
  }
  const std::size_t per_d = static_cast<std::size_t>(n) * masks.size();
  const std::int64_t half = params.half();
  std::vector<std::uint64_t> keys(per_d * params.half());

#pragma omp parallel for schedule(static)
  for (std::int64_t dd = 1; dd <= half; ++dd) {
    const auto d = static_cast<std::uint64_t>(dd);
    std::vector<std::uint64_t> residues;
    residues.reserve(degree);
    std::size_t slot = per_d * (d - 1);
    for (std::uint32_t a = 0; a < n; ++a) {
      for (std::uint32_t m : masks) {
        residues.clear();
        for (std::uint32_t i = 0; i < k; ++i) {
          if (m & (1U << i)) residues.push_back((a + i * d) % n);
        }
        std::sort(residues.begin(), residues.end());
        std::uint64_t key = 0;
        for (std::uint64_t r : residues) key = key * n + r;
        keys[slot++] = key;
      }
    }
  }

  std::sort(keys.begin(), keys.end());
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    const std::uint64_t r = j - i;
    total += r * r;
    i = j;
  }
  return total;
}

double sigma_exact(std::uint32_t degree, const APParams& params) {
  return std::sqrt(static_cast<double>(sigma_squared_exact(degree, params)));
}

SigmaTable sigma_table_from_squares(const APParams& params, double p,
                                    std::vector<std::uint64_t> squares) {
  params.require_multilinear("sigma_table");
  validate_probability(p);
  if (squares.size() != params.k + 1) {
    throw ParameterError("sigma_squared must have k+1 entries");
  }
  const double q = 1.0 - p;
  const std::uint32_t k = params.k;
  SigmaTable t;
  t.n = params.n;
  t.k = k;
  t.p = p;
  t.sigma_squared = std::move(squares);
  t.sigma.assign(k + 1, 0.0);
  double var_total = 0.0;
  double var_tail = 0.0;
  for (std::uint32_t l = 1; l <= k; ++l) {
    t.sigma[l] = std::sqrt(static_cast<double>(t.sigma_squared[l]));
    const double term = std::pow(p, 2.0 * k - l) * std::pow(q, static_cast<double>(l)) *
                        static_cast<double>(t.sigma_squared[l]);
    var_total += term;
    if (l >= 3) var_tail += term;
  }
  t.sigma_total = std::sqrt(var_total);
  t.sigma_Y = std::sqrt(var_tail);

  // Brackets: sigma_1 = k floor(n/2) sqrt(n) and n floor(n/2) <= sigma_l^2 <=
  // k(k-1) C(k,l) n floor(n/2), since two residues fix (a, d) up to the
  // choice of their positions.
  const double n = params.n;
  const double ratio1 = t.sigma[1] / std::pow(n, 1.5);
  if (ratio1 < k / 3.0 - 1e-12 || ratio1 > k / 2.0 + 1e-12) {
    throw InternalError("sigma_1 / n^{3/2} outside [k/3, k/2]");
  }
  const double base = static_cast<double>(params.num_progressions());
  for (std::uint32_t l = 2; l <= k; ++l) {
    const double r = static_cast<double>(t.sigma_squared[l]) / base;
    if (r < 1.0 || r > static_cast<double>(k) * (k - 1) * binomial(k, l)) {
      throw InternalError("sigma_" + std::to_string(l) + "^2 / (n floor(n/2)) out of bracket");
    }
  }
  return t;
}

SigmaTable sigma_table(const APParams& params, double p) {
  params.require_multilinear("sigma_table");
  validate_probability(p);
  std::vector<std::uint64_t> squares(params.k + 1, 0);
  for (std::uint32_t l = 1; l <= params.k; ++l) squares[l] = sigma_squared_exact(l, params);
  return sigma_table_from_squares(params, p, std::move(squares));
}

std::string sigma_table_to_json(const SigmaTable& table) {
  nlohmann::ordered_json j;
  j["n"] = table.n;
  j["k"] = table.k;
  j["p"] = table.p;
  j["sigma"] = std::vector<double>(table.sigma.begin() + 1, table.sigma.end());
  j["sigma_squared"] =
      std::vector<std::uint64_t>(table.sigma_squared.begin() + 1, table.sigma_squared.end());
  j["sigma_total"] = table.sigma_total;
  j["sigma_Y"] = table.sigma_Y;
  return j.dump(2);
}

SigmaTable sigma_table_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("malformed sigma table JSON: ") + e.what());
  }
  const auto params = APParams::make(j.at("n").get<std::uint32_t>(), j.at("k").get<std::uint32_t>());
  std::vector<std::uint64_t> squares{0};
  for (const auto& v : j.at("sigma_squared")) squares.push_back(v.get<std::uint64_t>());
  return sigma_table_from_squares(params, j.at("p").get<double>(), std::move(squares));
}

SigmaTable cached_sigma_table(const APParams& params, double p,
                              const std::optional<std::filesystem::path>& dir) {
  if (!dir) return sigma_table(params, p);
  const auto path = *dir / ("sigma_n" + std::to_string(params.n) + "_k" +
                            std::to_string(params.k) + ".json");
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    auto cached = sigma_table_from_json(buf.str());
    if (cached.n == params.n && cached.k == params.k) {
      return sigma_table_from_squares(params, p, std::move(cached.sigma_squared));
    }
  }
  auto table = sigma_table(params, p);
  std::error_code ec;
  std::filesystem::create_directories(*dir, ec);
  std::ofstream out(path);
  if (out) out << sigma_table_to_json(table) << '\n';
  return table;
}

}  // namespace aplclt
