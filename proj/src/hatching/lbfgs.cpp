#include "vdk/hatching/lbfgs.hpp"

#include <cmath>
#include <deque>

namespace vdk {

LbfgsResult minimizeLbfgs(const Objective& f, Eigen::VectorXd x0, const LbfgsOptions& options) {
  LbfgsResult best;
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd g(x.size());
  double fx = f(x, g);
  best.x = x;
  best.value = fx;
  best.gradientNorm = x.size() ? g.lpNorm<Eigen::Infinity>() : 0.0;
  if (best.gradientNorm < options.gradientTolerance) {
    best.converged = true;
    return best;
  }

  std::deque<Eigen::VectorXd> S, Y;
  std::deque<double> rho;
  Eigen::VectorXd xNew(x.size()), gNew(x.size());
  int stalled = 0;
  for (int iter = 1; iter <= options.maxIterations; ++iter) {
    // Two-loop recursion for d = -H g.
    Eigen::VectorXd q = g;
    std::vector<double> alpha(S.size());
    for (int k = static_cast<int>(S.size()) - 1; k >= 0; --k) {
      alpha[k] = rho[k] * S[k].dot(q);
      q -= alpha[k] * Y[k];
    }
    if (!S.empty()) q *= S.back().dot(Y.back()) / Y.back().squaredNorm();
    for (std::size_t k = 0; k < S.size(); ++k) {
      const double beta = rho[k] * Y[k].dot(q);
      q += (alpha[k] - beta) * S[k];
    }
    Eigen::VectorXd d = -q;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      // Not a descent direction: restart from steepest descent.
      S.clear();
      Y.clear();
      rho.clear();
      d = -g;
      slope = g.dot(d);
    }

    double step = S.empty() ? std::min(1.0, 1.0 / g.lpNorm<Eigen::Infinity>()) : 1.0;
    bool accepted = false;
    double fNew = fx;
    for (int ls = 0; ls < options.maxLineSearchSteps; ++ls) {
      xNew = x + step * d;
      fNew = f(xNew, gNew);
      if (std::isfinite(fNew) && fNew <= fx + options.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    best.iterations = iter;
    if (!accepted) break;

    // Stop once decreases vanish below rounding for several iterations.
    stalled = fx - fNew <= 1e-15 * std::max(1.0, std::abs(fx)) ? stalled + 1 : 0;
    Eigen::VectorXd s = xNew - x, y = gNew - g;
    x.swap(xNew);
    g.swap(gNew);
    fx = fNew;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > options.history) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
    }
    const double gn = g.lpNorm<Eigen::Infinity>();
    if (fx <= best.value) {
      best.x = x;
      best.value = fx;
      best.gradientNorm = gn;
    }
    if (gn < options.gradientTolerance) {
      best.converged = true;
      break;
    }
    if (stalled >= 10) break;
  }
  return best;
}

}  // namespace vdk
