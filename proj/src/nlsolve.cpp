#include "rocketopt/nlsolve.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace rocketopt {
namespace {

bool finite(const VecX& v) { return v.allFinite(); }

double cond_estimate(const MatX& j) {
  Eigen::JacobiSVD<MatX> svd(j);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0.0;
  const double smin = s[s.size() - 1];
  return smin > 0.0 ? s[0] / smin : std::numeric_limits<double>::infinity();
}

// Dogleg step for the model ||f + J p|| within ||p|| <= radius.
VecX dogleg(const MatX& j, const VecX& f, double radius) {
  Eigen::ColPivHouseholderQR<MatX> qr(j);
  VecX gn = -qr.solve(f);
  if (qr.rank() == j.cols() && finite(gn) && gn.norm() <= radius) return gn;

  const VecX g = j.transpose() * f;
  const double jg = (j * g).squaredNorm();
  if (jg == 0.0 || g.norm() == 0.0) {
    return finite(gn) ? VecX(gn * (radius / std::max(gn.norm(), radius)))
                      : VecX(VecX::Zero(f.size()));
  }
  const VecX sd = -(g.squaredNorm() / jg) * g;
  if (sd.norm() >= radius || qr.rank() < j.cols() || !finite(gn)) {
    return sd * (radius / sd.norm());
  }
  // Point on the segment sd -> gn at distance radius.
  const VecX d = gn - sd;
  const double a = d.squaredNorm();
  const double b = 2.0 * sd.dot(d);
  const double c = sd.squaredNorm() - radius * radius;
  const double tau = (-b + std::sqrt(std::max(0.0, b * b - 4.0 * a * c))) /
                     (2.0 * a);
  return sd + tau * d;
}

}  // namespace

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kStalled: return "stalled";
    case SolveStatus::kMaxIter: return "max_iter";
    case SolveStatus::kNanEncountered: return "nan_encountered";
  }
  return "?";
}

MatX fd_jacobian(const Residual& f, const VecX& x, const VecX& fx,
                 double rel_step, const VecX& scale, bool parallel) {
  const Eigen::Index n = x.size();
  MatX j(fx.size(), n);
  auto column = [&](Eigen::Index i) {
    const double s = scale.size() == n ? scale[i] : 1.0;
    const double h = rel_step * std::max(1.0, std::abs(x[i] / s)) * s;
    VecX xp = x;
    xp[i] += h;
    const double hh = xp[i] - x[i];
    j.col(i) = (f(xp) - fx) / hh;
  };
  if (!parallel || n < 2) {
    for (Eigen::Index i = 0; i < n; ++i) column(i);
    return j;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    workers.emplace_back([&, i] {
      try {
        column(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return j;
}

SolveReport solve(const Residual& f_user, const VecX& x0,
                  const SolveOptions& opts) {
  const Eigen::Index n = x0.size();
  const VecX scale =
      opts.scale.size() == n ? opts.scale : VecX(VecX::Ones(n));
  SolveReport rep;
  rep.root = x0;

  // Work in y = x / scale.
  auto to_x = [&](const VecX& y) { return VecX(y.cwiseProduct(scale)); };
  auto f = [&](const VecX& y) {
    ++rep.evaluations;
    return f_user(to_x(y));
  };

  VecX y = x0.cwiseQuotient(scale);
  VecX fy = f(y);
  if (!finite(fy)) {
    rep.status = SolveStatus::kNanEncountered;
    rep.residual_norm = std::numeric_limits<double>::infinity();
    return rep;
  }
  rep.residual_norm = fy.lpNorm<Eigen::Infinity>();

  const VecX ones = VecX::Ones(n);
  auto jacobian = [&](const VecX& at, const VecX& fat) {
    Residual g = [&](const VecX& v) { return f(v); };
    return fd_jacobian(g, at, fat, opts.fd_step, ones, opts.parallel_jacobian);
  };

  MatX j = jacobian(y, fy);
  double radius = opts.initial_radius > 0.0 ? opts.initial_radius
                                            : std::max(1.0, y.norm());
  const int refresh_every = opts.refresh_every > 0 ? opts.refresh_every
                                                   : static_cast<int>(n);
  int since_refresh = 0;
  int rejections = 0;

  for (rep.iterations = 0; rep.iterations < opts.max_iter; ++rep.iterations) {
    if (rep.residual_norm <= opts.tol) {
      rep.status = SolveStatus::kConverged;
      break;
    }
    bool refreshed = false;
    if (since_refresh >= refresh_every ||
        rejections >= opts.refresh_after_rejections) {
      j = jacobian(y, fy);
      since_refresh = 0;
      rejections = 0;
      refreshed = true;
    }
    const VecX p = dogleg(j, fy, radius);
    const double pn = p.norm();
    const VecX y_new = y + p;
    const VecX f_new = f(y_new);
    const VecX predicted = fy + j * p;
    bool accepted = false;
    if (finite(f_new)) {
      const double actual_red = fy.squaredNorm() - f_new.squaredNorm();
      const double pred_red = fy.squaredNorm() - predicted.squaredNorm();
      const double rho = pred_red > 0.0 ? actual_red / pred_red : -1.0;
      if (rho < 0.25) {
        radius = 0.25 * pn;
      } else if (rho > 0.75 && pn >= 0.99 * radius) {
        radius = std::max(radius, 2.0 * pn);
      }
      // Rank-1 secant update, also on rejection (it still carries slope
      // information along p).
      if (pn > 0.0) {
        j += ((f_new - predicted) * p.transpose()) / p.squaredNorm();
      }
      if (rho > 1e-4) {
        y = y_new;
        fy = f_new;
        rep.residual_norm = fy.lpNorm<Eigen::Infinity>();
        accepted = true;
        rejections = 0;
      } else {
        ++rejections;
      }
    } else {
      radius = 0.25 * pn;
      ++rejections;
    }
    ++since_refresh;
    if (opts.trace) {
      opts.trace({rep.iterations, rep.residual_norm, pn, radius, accepted,
                  refreshed});
    }
    if (radius < 1e-14 * std::max(1.0, y.norm())) {
      // One last chance with a fresh Jacobian before giving up.
      if (refreshed) {
        rep.status = SolveStatus::kStalled;
        ++rep.iterations;
        break;
      }
      j = jacobian(y, fy);
      since_refresh = 0;
      rejections = 0;
      radius = std::max(1e-6, 1e-3 * y.norm());
    }
  }
  if (rep.iterations >= opts.max_iter && rep.residual_norm > opts.tol) {
    rep.status = SolveStatus::kMaxIter;
  } else if (rep.residual_norm <= opts.tol) {
    rep.status = SolveStatus::kConverged;
  }
  rep.root = to_x(y);
  rep.jacobian_condition_estimate = cond_estimate(j);
  return rep;
}

}  // namespace rocketopt
