#include "statrcm/ssm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "statrcm/error.hpp"

namespace statrcm::ssm {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

}  // namespace

void symmetrize(Matrix& m) {
  m = 0.5 * (m + m.transpose()).eval();
}

FilterOutput kalman_filter(const StateSpace& system, const Matrix& observations, const GaussianBelief& initial,
                           const FilterOptions& options) {
  const Eigen::Index n = system.state_dim;
  const Eigen::Index p = system.obs_matrix.rows();
  if (initial.mean.size() != n || initial.cov.rows() != n || initial.cov.cols() != n)
    throw Error("initial belief has the wrong dimension");
  if (observations.cols() != p) throw Error("observation matrix has the wrong number of columns");

  const auto n_steps = static_cast<std::size_t>(observations.rows());
  FilterOutput out;
  if (options.store_steps) out.steps.reserve(n_steps);

  const Matrix identity = Matrix::Identity(n, n);
  Vector mean = initial.mean;
  Matrix cov = initial.cov;
  Vector filtered_mean;
  Matrix filtered_cov;
  std::vector<int> observed;
  observed.reserve(static_cast<std::size_t>(p));

  for (std::size_t t = 0; t < n_steps; ++t) {
    FilterStep step;
    if (t > 0) {
      Matrix jac = system.jacobian(filtered_mean, t - 1);
      mean = system.transition(filtered_mean, t - 1);
      cov.noalias() = jac * filtered_cov * jac.transpose();
      cov += system.process_cov;
      symmetrize(cov);
      if (!mean.allFinite() || !cov.allFinite()) throw NumericalError("non-finite predicted belief", t);
      if (options.store_steps) step.transition_jacobian = std::move(jac);
    }

    observed.clear();
    const auto row = static_cast<Eigen::Index>(t);
    for (Eigen::Index i = 0; i < p; ++i)
      if (!std::isnan(observations(row, i))) observed.push_back(static_cast<int>(i));
    const auto m = static_cast<Eigen::Index>(observed.size());

    double loglik = 0.0;
    if (m == 0) {
      filtered_mean = mean;
      filtered_cov = cov;
    } else {
      Matrix z_obs(m, n);
      Vector innovation(m);
      Matrix h_obs(m, m);
      for (Eigen::Index a = 0; a < m; ++a) {
        const int i = observed[static_cast<std::size_t>(a)];
        z_obs.row(a) = system.obs_matrix.row(i);
        innovation[a] = observations(row, i) - system.obs_intercept[i];
        for (Eigen::Index b = 0; b < m; ++b) h_obs(a, b) = system.obs_noise_cov(i, observed[static_cast<std::size_t>(b)]);
      }
      innovation.noalias() -= z_obs * mean;

      const Matrix pz = cov * z_obs.transpose();
      Matrix innovation_cov = z_obs * pz + h_obs;
      symmetrize(innovation_cov);
      Eigen::LLT<Matrix> llt(innovation_cov);
      if (llt.info() != Eigen::Success) throw NumericalError("innovation covariance is not positive definite", t);

      const Matrix gain = llt.solve(pz.transpose()).transpose();
      filtered_mean = mean + gain * innovation;
      const Matrix ikz = identity - gain * z_obs;
      filtered_cov.noalias() = ikz * cov * ikz.transpose();
      filtered_cov.noalias() += gain * h_obs * gain.transpose();
      symmetrize(filtered_cov);

      const Vector whitened = llt.matrixL().solve(innovation);
      const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
      loglik = -0.5 * (static_cast<double>(m) * kLog2Pi + log_det + whitened.squaredNorm());
      if (!std::isfinite(loglik)) throw NumericalError("non-finite log-likelihood contribution", t);

      if (options.store_steps) {
        step.innovation = std::move(innovation);
        step.innovation_cov = std::move(innovation_cov);
      }
    }
    out.loglik += loglik;

    if (options.store_steps) {
      step.predicted = GaussianBelief{mean, cov};
      step.filtered = GaussianBelief{filtered_mean, filtered_cov};
      step.observed = observed;
      step.loglik = loglik;
      out.steps.push_back(std::move(step));
    }
  }
  return out;
}

SmootherOutput rts_smooth(const FilterOutput& filter) {
  const std::size_t n_steps = filter.steps.size();
  SmootherOutput out;
  if (n_steps == 0) return out;
  out.smoothed.resize(n_steps);
  out.smoothed.back() = filter.steps.back().filtered;

  for (std::size_t k = n_steps - 1; k-- > 0;) {
    const FilterStep& now = filter.steps[k];
    const FilterStep& next = filter.steps[k + 1];
    const Matrix& jac = next.transition_jacobian;
    const Matrix& pred_cov = next.predicted.cov;
    if (jac.size() == 0) throw Error("filter output lacks stored transition Jacobians");

    // gain' solves pred_cov * gain' = jac * filtered_cov
    const Matrix rhs = jac * now.filtered.cov;
    Matrix gain_t;
    Eigen::LLT<Matrix> llt(pred_cov);
    if (llt.info() == Eigen::Success) {
      gain_t = llt.solve(rhs);
    } else {
      Eigen::LDLT<Matrix> ldlt(pred_cov);
      const double tol = 1e-12 * std::max(1.0, pred_cov.diagonal().cwiseAbs().maxCoeff());
      if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= tol).any())
        throw NumericalError("singular predicted covariance in the smoother", k + 1);
      gain_t = ldlt.solve(rhs);
    }
    const Matrix gain = gain_t.transpose();

    GaussianBelief& s = out.smoothed[k];
    const GaussianBelief& s_next = out.smoothed[k + 1];
    s.mean = now.filtered.mean + gain * (s_next.mean - next.predicted.mean);
    s.cov = now.filtered.cov + gain * (s_next.cov - pred_cov) * gain.transpose();
    symmetrize(s.cov);
    if (!s.mean.allFinite() || !s.cov.allFinite()) throw NumericalError("non-finite smoothed belief", k);
  }
  return out;
}

Matrix standardized_residuals(const FilterOutput& filter, Eigen::Index obs_dim) {
  Matrix out = Matrix::Constant(static_cast<Eigen::Index>(filter.steps.size()), obs_dim, data::kMissing);
  for (std::size_t t = 0; t < filter.steps.size(); ++t) {
    const FilterStep& step = filter.steps[t];
    for (std::size_t a = 0; a < step.observed.size(); ++a) {
      const auto ia = static_cast<Eigen::Index>(a);
      out(static_cast<Eigen::Index>(t), step.observed[a]) = step.innovation[ia] / std::sqrt(step.innovation_cov(ia, ia));
    }
  }
  return out;
}

}  // namespace statrcm::ssm
