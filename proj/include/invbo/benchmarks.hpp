#pragma once

// Objective suite: five synthetic functions with known optima plus the WLAN
// access-point placement simulator. Everything is exposed to the optimizer as
// a maximization problem (minimization formulas are negated at the boundary).

#include "invbo/common.hpp"
#include "invbo/groups.hpp"
#include "invbo/kernels.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace invbo::benchmarks {

// Minimization-form formula values.
double ackley(const Vector& x, double a = 20.0, double b = 0.2,
              double c = 6.283185307179586476925286766559);
double griewank(const Vector& x);
double rastrigin(const Vector& x);
double rastrigin1d(double z);
double radial(const Vector& x);   // [-10,10]^2, rotation-invariant
double scaling(const Vector& x);  // [0.1,10]^2, scale-invariant

struct WlanScenario {
  Matrix users;  // p x 2 positions in [-50,50]^2
  int ap_count = 4;
  double bandwidth_mhz = 1.0;
  double path_loss_db = 46.67;
  double path_loss_exponent = 3.0;
  double noise_mw = 3.16227766016837933e-9;  // -85 dBm
};

// Named fixture seed: every run shares one user layout.
inline constexpr std::uint64_t kWlanFixtureSeed = 4242;

// 16 users uniform in [-50,50]^2 from the given seed.
WlanScenario scenario_fixture(std::uint64_t seed);

// Deterministic JSON round-trip (same scenario -> same bytes), used for the
// persisted fixture file.
std::string serialize_scenario(const WlanScenario& scenario);
WlanScenario parse_scenario(const std::string& text);
void save_scenario(const WlanScenario& scenario, const std::string& path);

// Total downlink Shannon capacity (Mbps) of the placement
// (x_1..x_m, y_1..y_m): nearest-AP association (lowest index on ties),
// received power 10^(-L/10) min(d^-lambda, 1) mW, SINR against all other APs.
double wlan_throughput(const WlanScenario& scenario, const Vector& placement);

struct Benchmark {
  std::string name;
  Box box;
  groups::GroupAction group;
  std::optional<double> known_max;  // 0 for the synthetic five, absent for WLAN
  kernels::Family default_family;
  std::function<double(const Vector&)> evaluate;  // maximization form
};

// "Ackley<d>d", "Griewank<d>d", "Rastrigin<d>d", "Radial2d", "Scaling2d",
// "WLAN8d"; case-insensitive.
Benchmark make_benchmark(const std::string& name);

// Canonical names of the experiment suite.
std::vector<std::string> benchmark_names();

}  // namespace invbo::benchmarks
