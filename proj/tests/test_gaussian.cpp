#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "mechlink/gaussian.hpp"

using namespace mechlink;

namespace {

GaussianChannel beam_splitter_50_50() {
  GaussianChannel bs;
  const double s = 1.0 / std::sqrt(2.0);
  bs.K = Mat::Zero(4, 4);
  bs.K(0, 0) = s; bs.K(0, 2) = s;
  bs.K(1, 1) = s; bs.K(1, 3) = s;
  bs.K(2, 0) = -s; bs.K(2, 2) = s;
  bs.K(3, 1) = -s; bs.K(3, 3) = s;
  bs.N = Mat::Zero(4, 4);
  return bs;
}

}  // namespace

TEST_CASE("vacuum state covariance is I/2 for one to three modes") {
  for (int n = 1; n <= 3; ++n) {
    GaussianState v = vacuum_state(n);
    CHECK(v.modes() == n);
    CHECK(v.means.cwiseAbs().maxCoeff() == 0.0);
    CHECK((v.cov - 0.5 * Mat::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("thermal state variance is n_T + 1/2") {
  CHECK((thermal_state(0.0).cov - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() ==
        0.0);
  GaussianState t = thermal_state(41.2);
  CHECK(t.cov(0, 0) == doctest::Approx(41.7).epsilon(1e-14));
  CHECK(t.cov(1, 1) == doctest::Approx(41.7).epsilon(1e-14));
  CHECK(thermal_state(1.0).cov(0, 0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK_THROWS_AS(thermal_state(-0.1), std::invalid_argument);
}

TEST_CASE("thermal occupation at 2 K and 1 GHz") {
  const double omega = 2.0 * M_PI * 1e9;
  double n = thermal_occupation(omega, 2.0);
  CHECK(n == doctest::Approx(41.175237937611165).epsilon(1e-13));
  // high-temperature expansion cross-check
  double high_t = k_boltzmann_si * 2.0 / (hbar_si * omega) - 0.5;
  CHECK(n == doctest::Approx(high_t).epsilon(2e-4));
  CHECK(thermal_occupation(omega, 0.0) == 0.0);
  // hbar*omega/(kB*T) = ln 2 gives exactly one quantum
  double t_ln2 = hbar_si * omega / (k_boltzmann_si * std::log(2.0));
  CHECK(thermal_occupation(omega, t_ln2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(thermal_occupation(omega, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(thermal_occupation(-omega, 1.0), std::invalid_argument);
}

TEST_CASE("thermal occupation is monotone in T and in omega") {
  const double omega = 2.0 * M_PI * 1e9;
  double prev = thermal_occupation(omega, 0.01);
  for (double t : {0.1, 0.5, 1.0, 2.0, 8.0}) {
    double n = thermal_occupation(omega, t);
    CHECK(n > prev);
    prev = n;
  }
  prev = thermal_occupation(0.5 * omega, 1.0);
  for (double f : {0.8, 1.0, 2.0, 5.0}) {
    double n = thermal_occupation(f * omega, 1.0);
    CHECK(n < prev);
    prev = n;
  }
}

TEST_CASE("coherent state means encode alpha in quadrature units") {
  std::complex<double> alpha(0.5, 0.25);
  GaussianState c = coherent_state(alpha);
  CHECK(c.means(0) == doctest::Approx(std::sqrt(2.0) * 0.5).epsilon(1e-15));
  CHECK(c.means(1) == doctest::Approx(std::sqrt(2.0) * 0.25).epsilon(1e-15));
  CHECK((c.cov - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("tensor product concatenates means and covariances") {
  GaussianState t = tensor(thermal_state(2.0), coherent_state({1.0, 0.0}));
  CHECK(t.modes() == 2);
  CHECK(t.means(2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(t.cov(0, 0) == doctest::Approx(2.5));
  CHECK(t.cov(2, 2) == doctest::Approx(0.5));
  CHECK(t.cov(0, 2) == 0.0);
}

TEST_CASE("identity channel returns the same state") {
  GaussianState s = tensor(thermal_state(3.0), coherent_state({0.3, -0.4}));
  GaussianState out = apply_channel(s, identity_channel(2));
  CHECK((out.means - s.means).cwiseAbs().maxCoeff() == 0.0);
  CHECK((out.cov - s.cov).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("full replacement channel maps thermal to vacuum") {
  GaussianChannel repl;
  repl.K = Mat::Zero(2, 2);
  repl.N = 0.5 * Mat::Identity(2, 2);
  GaussianState out = apply_channel(thermal_state(10.0), repl);
  CHECK(out.means.cwiseAbs().maxCoeff() == 0.0);
  CHECK((out.cov - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("50/50 beam splitter preserves two-mode vacuum") {
  GaussianState out = apply_channel(vacuum_state(2), beam_splitter_50_50());
  CHECK((out.cov - 0.5 * Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(symplectic_defect(beam_splitter_50_50().K) < 1e-15);
}

TEST_CASE("channel composition matches sequential application to 1e-12") {
  GaussianChannel c1 = beam_splitter_50_50();
  GaussianChannel c2;
  c2.K = Mat::Zero(4, 4);
  c2.K << 1.2, 0.1, 0.0, 0.3,
          0.0, 0.9, -0.2, 0.0,
          0.1, 0.0, 0.8, 0.0,
          0.0, -0.3, 0.0, 1.1;
  Mat root(4, 4);
  root << 0.5, 0.1, 0.0, 0.2,
          0.0, 0.4, 0.1, 0.0,
          0.2, 0.0, 0.6, 0.1,
          0.1, 0.3, 0.0, 0.5;
  c2.N = root * root.transpose();
  GaussianState s = tensor(thermal_state(1.3), coherent_state({0.7, -0.2}));

  GaussianState seq = apply_channel(apply_channel(s, c1), c2);
  GaussianState once = apply_channel(s, compose(c2, c1));
  CHECK((seq.means - once.means).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((seq.cov - once.cov).cwiseAbs().maxCoeff() < 1e-12);

  // associativity of compose itself
  GaussianChannel left = compose(compose(c2, c1), c2);
  GaussianChannel right = compose(c2, compose(c1, c2));
  CHECK((left.K - right.K).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((left.N - right.N).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("embedding acts on the chosen slots only") {
  GaussianChannel squeeze;
  squeeze.K = Mat::Zero(2, 2);
  squeeze.K(0, 0) = 2.0;
  squeeze.K(1, 1) = 0.5;
  squeeze.N = Mat::Zero(2, 2);
  GaussianChannel emb = embed_channel(squeeze, 3, {1});
  GaussianState s = vacuum_state(3);
  s.means << 1, 2, 3, 4, 5, 6;
  GaussianState out = apply_channel(s, emb);
  CHECK(out.means(0) == 1.0);
  CHECK(out.means(2) == 6.0);
  CHECK(out.means(3) == 2.0);
  CHECK(out.means(4) == 5.0);
  CHECK(out.cov(2, 2) == doctest::Approx(2.0));
  CHECK(out.cov(3, 3) == doctest::Approx(0.125));
  CHECK(out.cov(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("epr variance of product states") {
  CHECK(epr_variance(vacuum_state(2), 0, 1) == doctest::Approx(2.0).epsilon(1e-15));
  for (double n : {0.0, 0.7, 3.0}) {
    GaussianState two = tensor(thermal_state(n), thermal_state(n));
    CHECK(epr_variance(two, 0, 1) == doctest::Approx(4.0 * n + 2.0).epsilon(1e-13));
  }
  // any product of single-mode states with cov >= I/2 stays at or above 2
  std::mt19937 rng(7u);
  std::uniform_real_distribution<double> occ(0.0, 5.0), disp(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    GaussianState a = thermal_state(occ(rng));
    GaussianState b = thermal_state(occ(rng));
    a.means << disp(rng), disp(rng);
    b.means << disp(rng), disp(rng);
    CHECK(epr_variance(tensor(a, b), 0, 1) >= 2.0 - 1e-12);
  }
}

TEST_CASE("coherent fidelity is one for an exact match") {
  std::complex<double> alpha(1.3, -0.4);
  CHECK(coherent_fidelity(coherent_state(alpha), alpha) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(coherent_fidelity(vacuum_state(1), {0.0, 0.0}) ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("coherent fidelity of vacuum against a sqrt(50) X displacement") {
  // quadrature mean sqrt(50) corresponds to alpha = 5
  double f = coherent_fidelity(vacuum_state(1), {5.0, 0.0});
  CHECK(f == doctest::Approx(std::exp(-25.0)).epsilon(1e-8));
}

TEST_CASE("coherent fidelity depends only on the displacement difference") {
  GaussianState s = thermal_state(0.8);
  s.means << 0.4, -1.1;
  double base = coherent_fidelity(s, {0.9, 0.2});
  GaussianState shifted = s;
  shifted.means(0) += std::sqrt(2.0) * 0.33;
  shifted.means(1) += std::sqrt(2.0) * (-0.5);
  double moved = coherent_fidelity(shifted, {0.9 + 0.33, 0.2 - 0.5});
  CHECK(base == doctest::Approx(moved).epsilon(1e-12));
}

TEST_CASE("coherent fidelity of a centered thermal state is 1/(n+1)") {
  CHECK(coherent_fidelity(thermal_state(1.0), {0.0, 0.0}) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(coherent_fidelity(thermal_state(4.0), {0.0, 0.0}) ==
        doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("channel validation rejects a negative noise matrix") {
  GaussianChannel bad;
  bad.K = Mat::Identity(2, 2);
  bad.N = Mat::Identity(2, 2);
  bad.N(0, 0) = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  GaussianChannel asym;
  asym.K = Mat::Identity(2, 2);
  asym.N = Mat::Zero(2, 2);
  asym.N(0, 1) = 0.5;
  CHECK_THROWS_AS(asym.validate(), std::invalid_argument);
}

TEST_CASE("symplectic form blocks") {
  Mat omega = symplectic_form(2);
  CHECK(omega(0, 1) == 1.0);
  CHECK(omega(1, 0) == -1.0);
  CHECK(omega(2, 3) == 1.0);
  CHECK(omega(0, 2) == 0.0);
  CHECK((omega + omega.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("thermal environment carries its source") {
  ThermalEnvironment occ = ThermalEnvironment::from_occupation(3.5);
  CHECK(occ.n_T == 3.5);
  CHECK(!occ.temperature.has_value());
  ThermalEnvironment temp =
      ThermalEnvironment::from_temperature(2.0 * M_PI * 1e9, 2.0);
  CHECK(temp.temperature.value() == 2.0);
  CHECK(temp.n_T == doctest::Approx(41.175237937611165).epsilon(1e-13));
}
