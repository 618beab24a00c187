#include "indef/radial.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>

#include "indef/errors.hpp"

namespace indef {

void Annulus::validate() const {
  if (N < 2) throw Error(ErrorCode::InvalidArgument, "annulus dimension must be at least 2");
  if (!(R1 > 0.0) || !(R1 < R2) || !std::isfinite(R2)) {
    throw Error(ErrorCode::InvalidArgument, "annulus needs 0 < R1 < R2");
  }
}

double Annulus::h(double r) const {
  if (N == 2) return std::log(r / R1);
  const double k = N - 2.0;
  return (std::pow(R1, -k) - std::pow(r, -k)) / k;
}

double Annulus::T() const { return h(R2); }

double Annulus::radius(double t) const {
  if (t <= 0.0) return R1;
  if (t >= T()) return R2;
  if (N == 2) return R1 * std::exp(t);
  const double k = N - 2.0;
  return std::pow(std::pow(R1, -k) - k * t, -1.0 / k);
}

RadialWeight RadialWeight::constant(double value) {
  return {[value](double) { return value; }, "constant"};
}

RadialWeight RadialWeight::log_sin_plus_k(double k, double power, double omega) {
  return {[k, power, omega](double r) { return (std::sin(omega * std::log(r)) + k) * std::pow(r, power); },
          "log_sin_plus_k"};
}

RadialWeight RadialWeight::polynomial(std::vector<double> coeffs) {
  return {[coeffs](double r) {
            double acc = 0.0;
            for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * r + *it;
            return acc;
          },
          "polynomial"};
}

ProblemSpec ReducedProblem::problem(const ProblemSpec& base) const {
  ProblemSpec p = base;
  p.weight = weight;
  p.bc = BoundaryKind::Neumann;
  return p;
}

ReducedProblem reduce(const Annulus& ann, const RadialWeight& Q) {
  ann.validate();
  ReducedProblem out;
  out.annulus = ann;
  out.T = ann.T();
  const double e = 2.0 * (ann.N - 1);
  out.weight = PeriodicWeight::composite(
      [ann, Q, e](double t) {
        const double r = ann.radius(t);
        return std::pow(r, e) * Q(r);
      },
      out.T, {}, "radial:" + Q.label);
  return out;
}

QStarReport check_q_star(const Annulus& ann, const RadialWeight& Q) {
  ann.validate();
  const int N = ann.N;
  const auto f = [&](double r) { return std::pow(r, N - 1) * Q(r); };
  // Split in pieces of bounded log-length so oscillating profiles resolve.
  const int pieces = std::max(1, static_cast<int>(std::ceil(std::log(ann.R2 / ann.R1) / 0.5)));
  double total = 0.0;
  for (int i = 0; i < pieces; ++i) {
    const double a = ann.R1 * std::pow(ann.R2 / ann.R1, static_cast<double>(i) / pieces);
    const double b = i + 1 == pieces ? ann.R2 : ann.R1 * std::pow(ann.R2 / ann.R1, (i + 1.0) / pieces);
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-14);
  }
  return {total, total < 0.0};
}

RadialProfile lift(const Solution& sol, const Annulus& ann, const RadialWeight& Q, int n, double tol) {
  ann.validate();
  if (n < 5) throw Error(ErrorCode::InvalidArgument, "lift needs at least 5 radii");
  const ProblemSpec& p = sol.problem;
  const double T = ann.T();
  if (std::abs(p.period() - T) > 1e-12 * (1.0 + T)) {
    throw Error(ErrorCode::InvalidArgument, "solution period does not match the annulus");
  }
  IntegrateOptions o;
  o.tol = tol;
  Trajectory traj;
  const auto& mesh = sol.mesh;
  for (std::size_t k = 0; k < mesh.times.size(); ++k) {
    const double t1 = k + 1 < mesh.times.size() ? mesh.times[k + 1] : T;
    traj.append(integrate(p, mesh.states[k], mesh.times[k], t1, o));
  }

  const int N = ann.N;
  const auto un = static_cast<std::size_t>(n);
  RadialProfile out;
  out.r.resize(un);
  out.U.resize(un);
  out.dU.resize(un);
  std::vector<double> ts(un);
  for (std::size_t i = 0; i < un; ++i) {
    ts[i] = T * static_cast<double>(i) / (n - 1);
    const State x = traj.at(ts[i]);
    out.r[i] = ann.radius(ts[i]);
    out.U[i] = x.u;
    out.dU[i] = x.v * std::pow(out.r[i], 1.0 - N);
  }
  out.dU_R1 = out.dU.front();
  out.dU_R2 = out.dU.back();

  double res = 0.0;
  double scale = 0.0;
  for (std::size_t i = 1; i + 1 < un; ++i) {
    const double hm = out.r[i] - out.r[i - 1];
    const double hp = out.r[i + 1] - out.r[i];
    // Second-order derivative on a nonuniform stencil.
    const double d2 = (hm * hm * out.dU[i + 1] - hp * hp * out.dU[i - 1] +
                       (hp * hp - hm * hm) * out.dU[i]) /
                      (hm * hp * (hm + hp));
    const double w = std::pow(out.r[i], 2.0 - 2.0 * N);
    // Reaction term in radial form, from Q directly rather than the reduced weight.
    const double f = out.U[i] >= 0.0
                         ? p.theta * p.lambda * Q(out.r[i]) * p.nonlinearity.g(out.U[i]) + p.alpha * w
                         : extended_rhs(p, ts[i], out.U[i]) * w;
    res = std::max(res, std::abs(d2 + (N - 1.0) / out.r[i] * out.dU[i] + f));
    scale = std::max(scale, std::abs(f));
  }
  out.residual_abs = res;
  out.residual_scaled = res / (1.0 + scale);
  return out;
}

}  // namespace indef
