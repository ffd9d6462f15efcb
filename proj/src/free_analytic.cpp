#include "dirac/free_analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dirac/error.hpp"

namespace dirac {

namespace {

constexpr double kPi = std::numbers::pi;

// Spinor weights of the two eigenbases, normalized by 1/sqrt(4 pi):
//   psi_k ~ (pos_a, pos_b),  phi_k ~ (neg_a, neg_b).
struct BasisWeights {
  double pos_a, pos_b, neg_a, neg_b;
};

double sign_right(double k) { return k < 0.0 ? -1.0 : 1.0; }

BasisWeights basis_weights(double k, double m, bool limit_handling) {
  const double omega = std::hypot(k, m);
  if (k == 0.0) {
    if (!limit_handling) throw Error(ErrorKind::SingularSample, "k = 0 sample hits the negative-branch singularity");
    // right-hand limits k -> 0+
    if (m > 0.0) return {std::sqrt(2.0), 0.0, 0.0, std::sqrt(2.0)};
    return {1.0, 1.0, -1.0, 1.0};
  }
  const double root_plus = std::sqrt(omega * (omega + m));
  return {std::sqrt((omega + m) / omega), k / root_plus, -std::abs(k) / root_plus,
          sign_right(k) * std::sqrt((omega + m) / omega)};
}

double simpson_weight(std::size_t i, std::size_t n) {
  if (i == 0 || i == n - 1) return 1.0;
  return (i % 2 == 1) ? 4.0 : 2.0;
}

// Gaussian moments of q^p e^{i xi q - s2 q^2}, p = 0, 1, 2.
std::array<cplx, 3> gaussian_moments(double xi, cplx s2) {
  const cplx m0 = std::sqrt(kPi / s2) * std::exp(-xi * xi / (4.0 * s2));
  const cplx m1 = cplx(0.0, xi) / (2.0 * s2) * m0;
  const cplx m2 = (1.0 / (2.0 * s2) - xi * xi / (4.0 * s2 * s2)) * m0;
  return {m0, m1, m2};
}

struct Quadratic {
  double c0, c1, c2;
  Quadratic operator-() const { return {-c0, -c1, -c2}; }
  cplx integrate(const std::array<cplx, 3>& mom) const { return c0 * mom[0] + c1 * mom[1] + c2 * mom[2]; }
};

// f(k) = k/omega and f(k) = (omega + s m)/omega with s = +-1, and their third derivatives.
double ratio_k(double k, double m) {
  const double w = std::hypot(k, m);
  return w == 0.0 ? 0.0 : k / w;
}
double ratio_k_d3(double k, double m) {
  const double w = std::hypot(k, m);
  return -3.0 * m * m * (m * m - 4.0 * k * k) / std::pow(w, 7);
}
double ratio_mass(double k, double m, double s) {
  const double w = std::hypot(k, m);
  return w == 0.0 ? 1.0 : (w + s * m) / w;
}
double ratio_mass_d3(double k, double m, double s) {
  const double w = std::hypot(k, m);
  return s * 3.0 * m * k * (3.0 * m * m - 2.0 * k * k) / std::pow(w, 7);
}

}  // namespace

double PlaneWaveMode::omega() const noexcept { return std::hypot(k, m); }

std::array<cplx, 2> eigenspinor(const PlaneWaveMode& mode, double x) {
  if (mode.m < 0.0) throw Error(ErrorKind::InvalidSpec, "mass must be non-negative");
  const double omega = mode.omega();
  const cplx phase = std::polar(1.0 / std::sqrt(4.0 * kPi), mode.k * x);
  if (mode.branch == EnergyBranch::Positive) {
    if (omega + mode.m <= 0.0) throw Error(ErrorKind::DegenerateMode, "omega + m = 0");
    const double root = std::sqrt(omega * (omega + mode.m));
    return {phase * ((omega + mode.m) / root), phase * (mode.k / root)};
  }
  if (mode.k == 0.0) throw Error(ErrorKind::DegenerateMode, "negative branch with k = 0 has omega - m = 0");
  const double root_plus = std::sqrt(omega * (omega + mode.m));
  return {phase * (-std::abs(mode.k) / root_plus), phase * (sign_right(mode.k) * std::sqrt((omega + mode.m) / omega))};
}

double eigenspinor_pointwise_norm(const PlaneWaveMode& mode) {
  const auto s = eigenspinor(mode, 0.0);
  return std::norm(s[0]) + std::norm(s[1]);
}

MomentumCoefficients project_gaussian(const GaussianSpec& spec, double m, std::span<const double> k_samples,
                                      bool limit_handling) {
  spec.validate();
  if (m < 0.0) throw Error(ErrorKind::InvalidSpec, "mass must be non-negative");
  for (std::size_t i = 1; i < k_samples.size(); ++i)
    if (!(k_samples[i] > k_samples[i - 1])) throw Error(ErrorKind::InvalidSpec, "k samples must be strictly increasing");

  const double pref = gaussian_normalization(spec.sigma) * spec.sigma;
  const double s2 = spec.sigma * spec.sigma;
  MomentumCoefficients out;
  out.k_samples.assign(k_samples.begin(), k_samples.end());
  out.pi_plus.resize(k_samples.size());
  out.pi_minus.resize(k_samples.size());
  for (std::size_t i = 0; i < k_samples.size(); ++i) {
    const double k = k_samples[i];
    const auto w = basis_weights(k, m, limit_handling);
    const double d1 = k - spec.k1;
    const double d2 = k - spec.k2;
    const cplx e1 = spec.sigma0 * std::polar(pref * std::exp(-d1 * d1 * s2), -d1 * spec.x_center);
    const cplx e2 = spec.chi0 * std::polar(pref * std::exp(-d2 * d2 * s2), -d2 * spec.x_center);
    out.pi_plus[i] = w.pos_a * e1 + w.pos_b * e2;
    out.pi_minus[i] = w.neg_a * e1 + w.neg_b * e2;
  }
  return out;
}

SpinorField spectral_propagate(const GaussianSpec& spec, double m, double t, const Grid1D& grid,
                               const QuadratureSpec& quad) {
  spec.validate();
  if (m < 0.0) throw Error(ErrorKind::InvalidSpec, "mass must be non-negative");
  if (quad.nodes < 17 || !(quad.window_multiplier > 0.0))
    throw Error(ErrorKind::InvalidSpec, "quadrature needs >= 17 nodes and a positive window");

  const std::size_t nk = quad.nodes | 1U;
  const double half = quad.window_multiplier / spec.sigma;
  const double k_lo = std::min(spec.k1, spec.k2) - half;
  const double k_hi = std::max(spec.k1, spec.k2) + half;
  const double dk = (k_hi - k_lo) / static_cast<double>(nk - 1);
  const double s2 = spec.sigma * spec.sigma;
  const double pref = gaussian_normalization(spec.sigma) * spec.sigma / std::sqrt(4.0 * kPi);
  // shift to a packet centred at the origin; the plane-wave phases move into the amplitudes
  const cplx a1 = spec.sigma0 * std::polar(1.0, spec.k1 * spec.x_center);
  const cplx a2 = spec.chi0 * std::polar(1.0, spec.k2 * spec.x_center);

  auto evaluate = [&](double time) {
    std::vector<double> ks;
    std::vector<cplx> up_k, lo_k;
    ks.reserve(nk);
    up_k.reserve(nk);
    lo_k.reserve(nk);
    for (std::size_t i = 0; i < nk; ++i) {
      const double k = k_lo + static_cast<double>(i) * dk;
      const double g1 = std::exp(-(k - spec.k1) * (k - spec.k1) * s2);
      const double g2 = std::exp(-(k - spec.k2) * (k - spec.k2) * s2);
      if (g1 < 1e-300 && g2 < 1e-300) continue;
      const double omega = std::hypot(k, m);
      const double r_k = ratio_k(k, m);
      const double r_plus = ratio_mass(k, m, +1.0);
      const double r_minus = ratio_mass(k, m, -1.0);
      const cplx fwd = std::polar(1.0, -omega * time);  // positive energy
      const cplx bwd = std::conj(fwd);                   // negative energy
      const double w = pref * simpson_weight(i, nk) * dk / 3.0;
      const cplx c1 = w * g1 * a1;
      const cplx c2 = w * g2 * a2;
      ks.push_back(k);
      up_k.push_back(c1 * (r_plus * fwd + r_minus * bwd) + c2 * (r_k * (fwd - bwd)));
      lo_k.push_back(c1 * (r_k * (fwd - bwd)) + c2 * (r_minus * fwd + r_plus * bwd));
    }
    SpinorField field(grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double u = grid.x(j) - spec.x_center;
      cplx su{}, sl{};
      for (std::size_t i = 0; i < ks.size(); ++i) {
        const cplx e = std::polar(1.0, ks[i] * u);
        su += up_k[i] * e;
        sl += lo_k[i] * e;
      }
      field.upper[j] = su;
      field.lower[j] = sl;
    }
    return field;
  };

  SpinorField result = evaluate(t);
  if (quad.self_check) {
    SpinorField initial = (t == 0.0) ? result : evaluate(0.0);
    SpinorField exact(grid);
    const double ng = gaussian_normalization(spec.sigma);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double x = grid.x(j);
      const double u = x - spec.x_center;
      const double env = ng * std::exp(-u * u / (4.0 * s2));
      exact.upper[j] = spec.sigma0 * std::polar(env, spec.k1 * x);
      exact.lower[j] = spec.chi0 * std::polar(env, spec.k2 * x);
    }
    const double err = relative_l2_distance(initial, exact);
    if (!(err <= quad.self_check_tolerance))
      throw Error(ErrorKind::InsufficientQuadrature, "t = 0 reconstruction error " + std::to_string(err));
  }
  return result;
}

double ultra_relativistic_density(double x, double t, const GaussianSpec& spec) {
  const double ng2 = 1.0 / std::sqrt(2.0 * kPi * spec.sigma * spec.sigma);
  const double u = x - spec.x_center;
  const double two_s2 = 2.0 * spec.sigma * spec.sigma;
  return 0.5 * ng2 * std::norm(spec.sigma0 - spec.chi0) * std::exp(-(u + t) * (u + t) / two_s2) +
         0.5 * ng2 * std::norm(spec.sigma0 + spec.chi0) * std::exp(-(u - t) * (u - t) / two_s2);
}

LargeSigmaCoeffs large_sigma_coeffs(double k_j, double m, double sigma, double t) {
  const double w = std::hypot(k_j, m);
  if (w == 0.0) throw Error(ErrorKind::ZeroFrequency, "omega_j = 0 (k_j = m = 0)");
  const double w2 = w * w;
  const double w3 = w2 * w;
  const double w5 = w3 * w2;
  LargeSigmaCoeffs c;
  c.omega = w;
  c.A = k_j / w;
  c.B = m * m / w3;
  c.C = -1.5 * k_j * m * m / w5;
  c.D_plus = (w + m) / w;
  c.D_minus = (w - m) / w;
  c.E_plus = -k_j * m / w3;
  c.E_minus = k_j * m / w3;
  c.F_plus = -0.5 * m * (m * m - 2.0 * k_j * k_j) / w5;
  c.F_minus = 0.5 * m * (m * m - 2.0 * k_j * k_j) / w5;
  c.phi_plus = w * t;
  c.phi_minus = -w * t;
  c.xi_plus = k_j * t / w;
  c.xi_minus = -k_j * t / w;
  const double beta = m * m * t / (2.0 * w3);
  c.sigma2_plus = cplx(sigma * sigma, -beta);
  c.sigma2_minus = cplx(sigma * sigma, beta);
  return c;
}

SpinorField large_sigma_propagate(const GaussianSpec& spec, double m, double t, const Grid1D& grid,
                                  const WarningSink& warn) {
  spec.validate();
  if (m < 0.0) throw Error(ErrorKind::InvalidSpec, "mass must be non-negative");
  for (double kj : {spec.k1, spec.k2})
    if (std::max(m, std::abs(kj)) * spec.sigma < 1.0)
      throw Error(ErrorKind::ApproximationDomain, "both k_j and m are small compared with 1/sigma");
  if (warn) {
    try {
      const double sigma_min = select_sigma_min(m, spec.k1, spec.k2);
      if (spec.sigma < sigma_min)
        warn("sigma = " + std::to_string(spec.sigma) + " is below the Taylor validity bound " +
             std::to_string(sigma_min));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotApplicable) throw;
    }
  }

  const auto c1 = large_sigma_coeffs(spec.k1, m, spec.sigma, t);
  const auto c2 = large_sigma_coeffs(spec.k2, m, spec.sigma, t);
  const double pref = gaussian_normalization(spec.sigma) * spec.sigma / std::sqrt(4.0 * kPi);
  const cplx a1 = spec.sigma0 * std::polar(1.0, spec.k1 * spec.x_center);
  const cplx a2 = spec.chi0 * std::polar(1.0, spec.k2 * spec.x_center);

  const Quadratic g1{c1.A, c1.B, c1.C}, dp1{c1.D_plus, c1.E_plus, c1.F_plus}, dm1{c1.D_minus, c1.E_minus, c1.F_minus};
  const Quadratic g2{c2.A, c2.B, c2.C}, dp2{c2.D_plus, c2.E_plus, c2.F_plus}, dm2{c2.D_minus, c2.E_minus, c2.F_minus};

  SpinorField field(grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double u = grid.x(j) - spec.x_center;
    // Sigma0 terms around k1
    const auto mp1 = gaussian_moments(u + c1.xi_minus, c1.sigma2_minus);
    const auto mn1 = gaussian_moments(u + c1.xi_plus, c1.sigma2_plus);
    const cplx ep1 = std::polar(1.0, spec.k1 * u + c1.phi_minus);
    const cplx en1 = std::polar(1.0, spec.k1 * u + c1.phi_plus);
    // X0 terms around k2
    const auto mp2 = gaussian_moments(u + c2.xi_minus, c2.sigma2_minus);
    const auto mn2 = gaussian_moments(u + c2.xi_plus, c2.sigma2_plus);
    const cplx ep2 = std::polar(1.0, spec.k2 * u + c2.phi_minus);
    const cplx en2 = std::polar(1.0, spec.k2 * u + c2.phi_plus);

    const cplx up = a1 * (ep1 * dp1.integrate(mp1) + en1 * dm1.integrate(mn1)) +
                    a2 * (ep2 * g2.integrate(mp2) + en2 * (-g2).integrate(mn2));
    const cplx lo = a1 * (ep1 * g1.integrate(mp1) + en1 * (-g1).integrate(mn1)) +
                    a2 * (ep2 * dm2.integrate(mp2) + en2 * dp2.integrate(mn2));
    field.upper[j] = pref * up;
    field.lower[j] = pref * lo;
  }
  return field;
}

double select_sigma_min(double m, double k1, double k2, double n, double eps) {
  if (m < 0.0 || !(n > 0.0) || !(eps > 0.0)) throw Error(ErrorKind::InvalidSpec, "select_sigma_min needs m >= 0, n > 0, eps > 0");

  struct Candidate {
    std::function<double(double)> f;
    std::function<double(double)> d3;
  };
  const std::array<Candidate, 3> functions{{
      {[m](double k) { return ratio_k(k, m); }, [m](double k) { return ratio_k_d3(k, m); }},
      {[m](double k) { return ratio_mass(k, m, +1.0); }, [m](double k) { return ratio_mass_d3(k, m, +1.0); }},
      {[m](double k) { return ratio_mass(k, m, -1.0); }, [m](double k) { return ratio_mass_d3(k, m, -1.0); }},
  }};

  double best = -1.0;
  for (double kj : {k1, k2}) {
    const double scale = std::max({std::abs(kj), m, 1.0});
    for (const auto& cand : functions) {
      const double d3 = std::abs(cand.d3(kj));
      if (!(d3 > 1e-14 / std::pow(scale, 3))) continue;  // flat to third order: no constraint
      auto excess = [&](double sk) {
        const double h = n * sk;
        const double fv = std::abs(cand.f(kj + h));
        if (fv == 0.0) return std::numeric_limits<double>::infinity();
        return d3 * h * h * h / (6.0 * fv) - eps;
      };
      // locate the first sign change on a log scan, then bisect
      const double lo_end = 1e-8 * scale;
      const double hi_end = 1e8 * scale;
      constexpr int kScan = 640;
      double lo = lo_end;
      double hi = -1.0;
      if (excess(lo) >= 0.0) continue;
      for (int i = 1; i <= kScan; ++i) {
        const double s = lo_end * std::pow(hi_end / lo_end, static_cast<double>(i) / kScan);
        if (excess(s) >= 0.0) {
          hi = s;
          break;
        }
        lo = s;
      }
      if (hi < 0.0) continue;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) < 0.0 ? lo : hi) = mid;
      }
      const double sigma_k = 0.5 * (lo + hi);
      best = std::max(best, 1.0 / (2.0 * sigma_k));
    }
  }
  if (best < 0.0) throw Error(ErrorKind::NotApplicable, "no Taylor-remainder constraint applies (third derivatives vanish)");
  return best;
}

double dispersion_width(double t, double sigma, double m, double k_j) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::InvalidSpec, "sigma must be positive");
  const double w2 = m * m + k_j * k_j;
  if (w2 == 0.0) return sigma;  // massless limit
  const double m2 = m * m;
  return std::sqrt(sigma * sigma + m2 * m2 * t * t / (w2 * w2 * w2 * sigma * sigma));
}

double dispersion_rate(double m, double sigma, double k_j) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::InvalidSpec, "sigma must be positive");
  const double w2 = m * m + k_j * k_j;
  if (w2 == 0.0) throw Error(ErrorKind::ZeroFrequency, "dispersion rate undefined at m = k_j = 0");
  return m * m / (sigma * std::pow(w2, 1.5));
}

double complex_width_density_width(double t, double sigma, double m, double k_j) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::InvalidSpec, "sigma must be positive");
  const double w = std::hypot(k_j, m);
  if (w == 0.0) return sigma;
  const double beta = m * m * t / (2.0 * w * w * w);
  return std::sqrt(sigma * sigma + beta * beta / (sigma * sigma));
}

}  // namespace dirac
