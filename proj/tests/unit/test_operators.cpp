#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "dirac/csv.hpp"
#include "dirac/error.hpp"
#include "dirac/operators.hpp"

using namespace dirac;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Config;
}

std::vector<cplx> constant(std::size_t n, cplx v) { return std::vector<cplx>(n, v); }

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// Random superposition of interior Gaussian packets, flat [upper, lower] layout.
std::vector<cplx> smooth_field(const Grid1D& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> f(2 * g.size());
  for (int c = 0; c < 4; ++c) {
    const double xc = 0.3 * u(rng), s = 0.04 + 0.01 * u(rng), k = 30.0 * u(rng);
    const cplx a{u(rng), u(rng)}, b{u(rng), u(rng)};
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double x = g.x(j);
      const cplx e = std::exp(cplx(-(x - xc) * (x - xc) / (4 * s * s), k * x));
      f[j] += a * e;
      f[g.size() + j] += b * e;
    }
  }
  return f;
}

}  // namespace

TEST_CASE("derivative of constants and ramps") {
  const Grid1D g(-1.0, 1.0, 257);
  const DerivativeOperator d(g.size(), g.dx());
  // S 1 = e_0 - e_{n-1}; M^{-1} does not decay, so D 1 is an alternating
  // mode across the whole lattice while its local average M (D 1) vanishes
  const std::size_t n = g.size();
  const auto one = d.apply(constant(n, 1.0));
  for (std::size_t j = 0; j < n; ++j) {
    const double sign = j % 2 == 0 ? 1.0 : -1.0;
    const double expect = 2.0 / g.dx() * sign * (static_cast<double>(n - j) - static_cast<double>(j + 1)) /
                          static_cast<double>(n + 1);
    CHECK(std::abs(one[j] - expect) < 1e-9 * std::abs(2.0 / g.dx()));
  }
  for (std::size_t j = 2; j + 3 <= n; ++j) CHECK(std::abs(one[j - 1] + 2.0 * one[j] + one[j + 1]) < 1e-10);

  std::vector<cplx> ramp(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) ramp[j] = g.x(j);
  const auto dr = d.apply(ramp);
  // the zero extension disturbs interior values through M^{-1}, which does not decay;
  // the disturbance alternates in sign, so compare neighbour averages far from the ends
  for (std::size_t j = 2; j + 3 <= g.size(); ++j) {
    const cplx avg = 0.25 * (dr[j - 1] + 2.0 * dr[j] + dr[j + 1]);
    CHECK(std::abs(avg - 1.0) < 1e-8);
  }
}

TEST_CASE("two-node derivative matrix") {
  const double dx = 0.3;
  const auto m = dense_derivative_matrix(2, dx);
  const double c = 2.0 / (3.0 * dx);
  CHECK(m(0, 0) == doctest::Approx(c));
  CHECK(m(0, 1) == doctest::Approx(2 * c));
  CHECK(m(1, 0) == doctest::Approx(-2 * c));
  CHECK(m(1, 1) == doctest::Approx(-c));

  const DerivativeOperator d(2, dx);
  const auto col0 = d.apply(std::vector<cplx>{1.0, 0.0});
  CHECK(std::abs(col0[0] - c) < 1e-12);
  CHECK(std::abs(col0[1] + 2 * c) < 1e-12);
}

TEST_CASE("dense matrix agrees with the tridiagonal solve") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (std::size_t n : {2u, 3u, 8u, 64u, 129u, 512u}) {
    const double dx = 1.0 / static_cast<double>(n);
    const auto m = dense_derivative_matrix(n, dx);
    const DerivativeOperator d(n, dx);
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<cplx> y(n);
      for (auto& v : y) v = {nd(rng), nd(rng)};
      const auto f = d.apply(y);
      double worst = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cplx s{};
        for (std::size_t j = 0; j < n; ++j) s += m(i, j) * y[j];
        worst = std::max(worst, std::abs(s - f[i]));
        scale = std::max(scale, std::abs(f[i]));
      }
      CHECK(worst < 1e-10 * std::max(1.0, scale));
    }
  }
  CHECK(kind_of([] { dense_derivative_matrix(kDenseGuard + 1, 0.1); }) == ErrorKind::SizeGuardExceeded);
  CHECK(kind_of([] { dense_derivative_matrix(1, 0.1); }) == ErrorKind::SizeGuardExceeded);
}

TEST_CASE("dense derivative on a ramp") {
  const std::size_t n = 8;
  const double dx = 0.125;
  const auto m = dense_derivative_matrix(n, dx);
  const DerivativeOperator d(n, dx);
  std::vector<cplx> ramp(n);
  for (std::size_t j = 0; j < n; ++j) ramp[j] = j * dx;
  const auto f = d.apply(ramp);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += m(i, j) * ramp[j].real();
    CHECK(s == doctest::Approx(f[i].real()).epsilon(1e-12));
  }
}

TEST_CASE("averaging matrix times D is the antisymmetric stencil") {
  const std::size_t n = 40;
  const double dx = 0.05;
  const auto m = dense_derivative_matrix(n, dx);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double md = 2.0 * m(i, j);
      if (i > 0) md += m(i - 1, j);
      if (i + 1 < n) md += m(i + 1, j);
      const double stencil = (j == i + 1 ? 1.0 : 0.0) - (j + 1 == i ? 1.0 : 0.0);
      CHECK(md == doctest::Approx(2.0 / dx * stencil).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("D + D^T is a rank-2 corner term") {
  // D + D^T = (2/dx) M^{-1} (S M - M S) M^{-1}, and S M - M S = 2 (e_0 e_0^T - e_{n-1} e_{n-1}^T)
  const std::size_t n = 33;
  const double dx = 0.1;
  const auto d = dense_derivative_matrix(n, dx);
  auto minv = [&](std::size_t i, std::size_t k) {
    const double sign = ((i + k) % 2 == 0) ? 1.0 : -1.0;
    return sign * static_cast<double>(std::min(i, k) + 1) * static_cast<double>(n - std::max(i, k)) /
           static_cast<double>(n + 1);
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double expect = 4.0 / dx * (minv(i, 0) * minv(0, j) - minv(i, n - 1) * minv(n - 1, j));
      CHECK(d(i, j) + d(j, i) == doctest::Approx(expect).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("eigenvalues of D and the spectral radius") {
  const std::size_t n = 16;
  const double dx = 0.2;
  const auto d = dense_derivative_matrix(n, dx);
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = d(i, j);
  const Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  std::vector<double> got, want;
  for (std::size_t l = 0; l < n; ++l) {
    CHECK(std::abs(es.eigenvalues()[l].real()) < 1e-10);
    got.push_back(es.eigenvalues()[l].imag());
    want.push_back(-(2.0 / dx) / std::tan(std::numbers::pi * (l + 1.0) / (n + 1.0)));
  }
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  for (std::size_t l = 0; l < n; ++l) CHECK(got[l] == doctest::Approx(want[l]).epsilon(1e-10));
  CHECK(derivative_spectral_radius(n, dx) == doctest::Approx(2.0 / dx / std::tan(std::numbers::pi / (n + 1.0))));
}

TEST_CASE("fused pair solve equals two single solves") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  const DerivativeOperator d(300, 0.01);
  std::vector<cplx> a(300), b(300), oa(300), ob(300);
  for (auto& v : a) v = {nd(rng), nd(rng)};
  for (auto& v : b) v = {nd(rng), nd(rng)};
  d.apply_pair(a, b, oa, ob);
  CHECK(oa == d.apply(a));
  CHECK(ob == d.apply(b));
}

TEST_CASE("Hamiltonian block structure") {
  const Grid1D g(-1.0, 1.0, 64);
  const double m0 = 7.0;
  const auto h = assemble_hamiltonian(g, std::vector<double>(64, 0.0), std::vector<double>(64, m0));
  const DerivativeOperator& d = h.derivative();
  SpinorField f(g);
  f.upper[20] = 1.0;
  const auto hf = h.apply(f);
  std::vector<cplx> e(64);
  e[20] = 1.0;
  const auto col = d.apply(e);
  for (std::size_t j = 0; j < 64; ++j) {
    CHECK(hf.upper[j] == (j == 20 ? cplx(m0) : cplx{}));
    CHECK(std::abs(hf.lower[j] - cplx(0.0, -1.0) * col[j]) < 1e-12);
  }

  SpinorField l(g);
  l.lower[3] = 1.0;
  std::vector<double> v(64, 2.5);
  const auto hv = assemble_hamiltonian(g, v, std::vector<double>(64, m0)).apply(l);
  CHECK(hv.lower[3] == cplx(2.5 - m0));

  CHECK(kind_of([&] { assemble_hamiltonian(g, std::vector<double>(63), std::vector<double>(64)); }) ==
        ErrorKind::LengthMismatch);
}

TEST_CASE("flat apply matches the spinor apply with shift and scale") {
  const Grid1D g(-1.0, 1.0, 128);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(128), m(128);
  for (auto& x : v) x = 5 * u(rng);
  for (auto& x : m) x = 30 + 3 * u(rng);
  const auto h = assemble_hamiltonian(g, v, m);
  const auto in = smooth_field(g, rng);
  std::vector<cplx> out(in.size());
  h.apply(in, out, 1.5, 0.25);
  SpinorField f(g, {in.begin(), in.begin() + 128}, {in.begin() + 128, in.end()});
  const auto hf = h.apply(f);
  for (std::size_t j = 0; j < 128; ++j) {
    CHECK(std::abs(out[j] - 0.25 * (hf.upper[j] - 1.5 * f.upper[j])) < 1e-10);
    CHECK(std::abs(out[128 + j] - 0.25 * (hf.lower[j] - 1.5 * f.lower[j])) < 1e-10);
  }
}

TEST_CASE("Hermiticity on smooth interior fields") {
  const Grid1D g(-1.0, 1.0, 512);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(512), m(512);
  for (auto& x : v) x = 8 * u(rng);
  for (auto& x : m) x = 500 + 4 * u(rng);
  const auto h = assemble_hamiltonian(g, v, m);
  for (int pair = 0; pair < 32; ++pair) {
    const auto phi = smooth_field(g, rng);
    const auto psi = smooth_field(g, rng);
    std::vector<cplx> hphi(phi.size()), hpsi(psi.size());
    h.apply(phi, hphi);
    h.apply(psi, hpsi);
    const cplx lhs = dot(phi, hpsi), rhs = dot(hphi, psi);
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("relativistic dispersion of a wide packet") {
  // <psi, H^2 psi> / <psi, psi> for g(x) e^{ikx} (1, 0): k^2 + m^2 + 1/(4 sigma^2) in the continuum
  const Grid1D g(-1.0, 1.0, 1024);
  const double m0 = 30.0, k = 20.0, s = 0.15;
  const auto h = assemble_hamiltonian(g, std::vector<double>(g.size(), 0.0), std::vector<double>(g.size(), m0));
  SpinorField f(g);
  for (std::size_t j = 0; j < g.size(); ++j) f.upper[j] = std::exp(cplx(-g.x(j) * g.x(j) / (4 * s * s), k * g.x(j)));
  const auto hf = h.apply(f);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    num += std::norm(hf.upper[j]) + std::norm(hf.lower[j]);
    den += std::norm(f.upper[j]);
  }
  CHECK(num / den == doctest::Approx(k * k + m0 * m0 + 1.0 / (4 * s * s)).epsilon(1e-3));
}

TEST_CASE("paper spectral bounds") {
  const auto b = spectral_bounds(0.0, 0.0, 30.0, 0.01);
  CHECK(b.e_max == doctest::Approx(std::sqrt(std::numbers::pi * std::numbers::pi * 1e4 + 900.0)).epsilon(1e-14));
  CHECK(std::abs(b.e_max - 315.588) < 1e-3);
  CHECK(b.e_min == -b.e_max);
  const auto z = spectral_bounds(0.0, 0.0, 0.0, 0.02);
  CHECK(z.e_max == doctest::Approx(std::numbers::pi / 0.02));
  CHECK(z.e_min == -z.e_max);
  const auto s = spectral_bounds(3.0, 3.0, 30.0, 0.01);
  CHECK(s.e_max == doctest::Approx(b.e_max + 3.0));
  CHECK(s.e_min == doctest::Approx(b.e_min + 3.0));

  const auto w = with_margin(b, 0.05);
  CHECK(w.center() == doctest::Approx(b.center()).scale(1.0));
  CHECK(w.half_width() == doctest::Approx(1.05 * b.half_width()));
}

TEST_CASE("site-wise bounds use the extrema of V and |m|") {
  const Grid1D g(-1.0, 1.0, 64);
  std::vector<double> v(64, 0.0), m(64, 10.0);
  v[5] = -4.0;
  v[7] = 6.0;
  m[9] = -12.0;
  const auto h = assemble_hamiltonian(g, v, m);
  CHECK(h.v_min() == -4.0);
  CHECK(h.v_max() == 6.0);
  CHECK(h.m_abs_max() == 12.0);
  const auto p = paper_spectral_bounds(h);
  const auto ref = spectral_bounds(-4.0, 6.0, 12.0, g.dx());
  CHECK(p.e_min == ref.e_min);
  CHECK(p.e_max == ref.e_max);
  const auto l = lattice_spectral_bounds(h);
  const double r = std::hypot(derivative_spectral_radius(64, g.dx()), 12.0);
  CHECK(l.e_max == doctest::Approx(6.0 + r));
  CHECK(l.e_min == doctest::Approx(-4.0 - r));
}

TEST_CASE("random-probe Rayleigh quotients lie inside the lattice interval") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t n : {64u, 512u}) {
    const Grid1D g(-1.0, 1.0, n);
    std::vector<double> v(n), m(n);
    for (auto& x : v) x = 12 * u(rng);
    for (auto& x : m) x = 500 + 11 * u(rng);
    const auto h = assemble_hamiltonian(g, v, m);
    const auto b = with_margin(lattice_spectral_bounds(h), kSpectralMargin);
    for (int probe = 0; probe < 200; ++probe) {
      std::vector<cplx> in(2 * n), out(2 * n);
      if (probe % 2 == 0)
        for (auto& c : in) c = {nd(rng), nd(rng)};
      else
        in = smooth_field(g, rng);
      h.apply(in, out);
      const double q = (dot(in, out) / dot(in, in)).real();
      CHECK(q > b.e_min);
      CHECK(q < b.e_max);
    }
  }
}

TEST_CASE("translation covariance in the interior") {
  const Grid1D g(-1.0, 1.0, 400);
  std::mt19937_64 rng(2);
  const auto h = assemble_hamiltonian(g, std::vector<double>(400, 1.5), std::vector<double>(400, 20.0));
  const auto f = smooth_field(g, rng);
  std::vector<cplx> shifted(f.size());
  for (std::size_t j = 1; j < 400; ++j) {
    shifted[j] = f[j - 1];
    shifted[400 + j] = f[400 + j - 1];
  }
  std::vector<cplx> hf(f.size()), hs(f.size());
  h.apply(f, hf);
  h.apply(shifted, hs);
  double worst = 0.0, scale = 0.0;
  for (std::size_t j = 50; j + 50 < 400; ++j) {
    worst = std::max({worst, std::abs(hs[j] - hf[j - 1]), std::abs(hs[400 + j] - hf[400 + j - 1])});
    scale = std::max(scale, std::abs(hf[j]));
  }
  CHECK(worst < 1e-9 * scale);
}

TEST_CASE("disorder dump columns") {
  const Grid1D g(0.0, 1.0, 16);
  std::vector<double> v(16, 0.25), m(16, 3.0);
  std::stringstream ss;
  write_disorder_csv(ss, assemble_hamiltonian(g, v, m));
  const auto t = read_csv(ss);
  REQUIRE(t.columns == std::vector<std::string>{"x", "V", "m"});
  REQUIRE(t.rows.size() == 16);
  CHECK(t.rows[3][0] == g.x(3));
  CHECK(t.rows[3][1] == 0.25);
  CHECK(t.rows[3][2] == 3.0);
}
