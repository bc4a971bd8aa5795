#include "invbo/benchmarks.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

namespace invbo::benchmarks {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

double ackley(const Vector& x, double a, double b, double c) {
  const double d = static_cast<double>(x.size());
  const double rms = std::sqrt(x.squaredNorm() / d);
  double cos_sum = 0.0;
  for (int i = 0; i < x.size(); ++i) cos_sum += std::cos(c * x[i]);
  return -a * std::exp(-b * rms) - std::exp(cos_sum / d) + a + std::numbers::e;
}

double griewank(const Vector& x) {
  double quad = 0.0, prod = 1.0;
  for (int i = 0; i < x.size(); ++i) {
    quad += x[i] * x[i];
    prod *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
  }
  return quad / 4000.0 - prod + 1.0;
}

double rastrigin(const Vector& x) {
  double s = 10.0 * static_cast<double>(x.size());
  for (int i = 0; i < x.size(); ++i) {
    s += x[i] * x[i] - 10.0 * std::cos(kTwoPi * x[i]);
  }
  return s;
}

double rastrigin1d(double z) { return 10.0 + z * z - 10.0 * std::cos(kTwoPi * z); }

double radial(const Vector& x) {
  if (x.size() != 2) throw DimensionError("radial: expects 2-D input");
  const double a = 10.0 * std::numbers::sqrt2;
  const double b = 0.8;
  return rastrigin1d(x.norm() / a - b);
}

double scaling(const Vector& x) {
  if (x.size() != 2) throw DimensionError("scaling: expects 2-D input");
  const double r = x[0] / x[1] - 1.0;
  return r * r;
}

WlanScenario scenario_fixture(std::uint64_t seed) {
  WlanScenario s;
  Rng rng(seed);
  s.users.resize(16, 2);
  for (int i = 0; i < 16; ++i) {
    s.users(i, 0) = rng.uniform(-50.0, 50.0);
    s.users(i, 1) = rng.uniform(-50.0, 50.0);
  }
  return s;
}

std::string serialize_scenario(const WlanScenario& scenario) {
  nlohmann::json j;
  j["ap_count"] = scenario.ap_count;
  j["bandwidth_mhz"] = scenario.bandwidth_mhz;
  j["path_loss_db"] = scenario.path_loss_db;
  j["path_loss_exponent"] = scenario.path_loss_exponent;
  j["noise_mw"] = scenario.noise_mw;
  auto users = nlohmann::json::array();
  for (int i = 0; i < scenario.users.rows(); ++i) {
    users.push_back({scenario.users(i, 0), scenario.users(i, 1)});
  }
  j["users"] = std::move(users);
  return j.dump(2) + "\n";
}

WlanScenario parse_scenario(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  WlanScenario s;
  s.ap_count = j.at("ap_count").get<int>();
  s.bandwidth_mhz = j.at("bandwidth_mhz").get<double>();
  s.path_loss_db = j.at("path_loss_db").get<double>();
  s.path_loss_exponent = j.at("path_loss_exponent").get<double>();
  s.noise_mw = j.at("noise_mw").get<double>();
  const auto& users = j.at("users");
  s.users.resize(static_cast<Eigen::Index>(users.size()), 2);
  for (std::size_t i = 0; i < users.size(); ++i) {
    s.users(static_cast<Eigen::Index>(i), 0) = users[i][0].get<double>();
    s.users(static_cast<Eigen::Index>(i), 1) = users[i][1].get<double>();
  }
  return s;
}

void save_scenario(const WlanScenario& scenario, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write scenario file: " + path);
  out << serialize_scenario(scenario);
}

double wlan_throughput(const WlanScenario& scenario, const Vector& placement) {
  const int m = scenario.ap_count;
  if (placement.size() != 2 * m) throw DimensionError("wlan_throughput: placement must be 2m-dim");
  const int p = static_cast<int>(scenario.users.rows());
  const double rx_const = std::pow(10.0, -scenario.path_loss_db / 10.0);

  double total = 0.0;
  std::vector<double> power(static_cast<std::size_t>(m));
  for (int j = 0; j < p; ++j) {
    const double ux = scenario.users(j, 0), uy = scenario.users(j, 1);
    int assoc = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      const double dx = placement[i] - ux;
      const double dy = placement[m + i] - uy;
      const double d2 = dx * dx + dy * dy;
      // Lowest AP index wins ties (strict improvement required).
      if (d2 < best_d2) {
        best_d2 = d2;
        assoc = i;
      }
      const double dist = std::sqrt(d2);
      const double gain = std::min(std::pow(dist, -scenario.path_loss_exponent), 1.0);
      power[static_cast<std::size_t>(i)] = rx_const * gain;
    }
    double interference = 0.0;
    for (int i = 0; i < m; ++i) {
      if (i != assoc) interference += power[static_cast<std::size_t>(i)];
    }
    const double gamma = power[static_cast<std::size_t>(assoc)] / (scenario.noise_mw + interference);
    total += scenario.bandwidth_mhz * std::log2(1.0 + gamma);
  }
  return total;
}

namespace {

Benchmark synthetic(std::string name, int d, Box box, groups::GroupAction group,
                    kernels::Family family, std::function<double(const Vector&)> raw) {
  Benchmark b{std::move(name), std::move(box), std::move(group), 0.0, family, nullptr};
  b.evaluate = [raw = std::move(raw), d](const Vector& x) {
    if (x.size() != d) throw DimensionError("benchmark: input dimension mismatch");
    return -raw(x);
  };
  return b;
}

}  // namespace

Benchmark make_benchmark(const std::string& name) {
  const std::string key = lower(name);
  auto dim_suffix = [&](const std::string& prefix) -> int {
    // "<prefix><d>d" -> d, or -1 if the key does not match.
    if (key.size() < prefix.size() + 2 || key.compare(0, prefix.size(), prefix) != 0 ||
        key.back() != 'd') {
      return -1;
    }
    const std::string digits = key.substr(prefix.size(), key.size() - prefix.size() - 1);
    if (digits.empty() ||
        !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) {
      return -1;
    }
    return std::stoi(digits);
  };

  if (int d = dim_suffix("ackley"); d > 0) {
    return synthetic("Ackley" + std::to_string(d) + "d", d, Box::cube(d, -16.0, 16.0),
                     groups::GroupAction::hyperoctahedral(d), kernels::Family::kMatern52,
                     [](const Vector& x) { return ackley(x); });
  }
  if (int d = dim_suffix("griewank"); d > 0) {
    return synthetic("Griewank" + std::to_string(d) + "d", d, Box::cube(d, -600.0, 600.0),
                     groups::GroupAction::sign_flips(d), kernels::Family::kMatern52, &griewank);
  }
  if (int d = dim_suffix("rastrigin"); d > 0) {
    return synthetic("Rastrigin" + std::to_string(d) + "d", d, Box::cube(d, -5.12, 5.12),
                     groups::GroupAction::hyperoctahedral(d), kernels::Family::kMatern52,
                     &rastrigin);
  }
  if (key == "radial2d") {
    return synthetic("Radial2d", 2, Box::cube(2, -10.0, 10.0),
                     groups::GroupAction::planar_rotations(), kernels::Family::kRbf, &radial);
  }
  if (key == "scaling2d") {
    return synthetic("Scaling2d", 2, Box::cube(2, 0.1, 10.0), groups::GroupAction::scalings(),
                     kernels::Family::kRbf, &scaling);
  }
  if (key == "wlan8d") {
    Benchmark b{"WLAN8d", Box::cube(8, -50.0, 50.0), groups::GroupAction::block_permutations(4, 2),
                std::nullopt, kernels::Family::kMatern32, nullptr};
    b.evaluate = [scenario = scenario_fixture(kWlanFixtureSeed)](const Vector& x) {
      return wlan_throughput(scenario, x);
    };
    return b;
  }
  throw ConfigError("unknown benchmark: " + name);
}

std::vector<std::string> benchmark_names() {
  return {"Ackley2d", "Griewank6d", "Rastrigin5d", "Radial2d", "Scaling2d", "WLAN8d"};
}

}  // namespace invbo::benchmarks
