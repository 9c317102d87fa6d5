#include "subdiff/subgradient_maps.hpp"

#include <cmath>
#include <numbers>

namespace subdiff {

namespace {

bool is_abs(const ScalarConvexLoss& loss) {
  const auto& q = loss.quadratic_coeffs();
  return q && (*q)[1] == -1.0 && (*q)[2] == 0.0 && loss.kinks().size() == 1 && loss.kinks()[0].t == 0.0 &&
         loss.kinks()[0].a == 2.0;
}

// E[sign((a'x)^2 - (a'xb)^2) 2 (a'x) a] for a ~ N(0, sigma^2 I).
Vector pr_closed_form(const Vector& x, const Vector& xb, double sigma) {
  const double A = x.squaredNorm(), B = xb.squaredNorm(), C = x.dot(xb);
  if (A == 0.0) return Vector::Zero(x.size());
  const double S = std::max(0.0, A * B - C * C);
  const double Q = (A + B) * (A + B) - 4.0 * C * C;
  const double s2 = sigma * sigma;
  if (Q <= 1e-14 * (A + B) * (A + B)) {
    // x = +-xb: c vanishes identically and g = +1.
    return s2 * 2.0 * x;
  }
  const double rho = std::clamp((A - B) / std::sqrt(Q), -1.0, 1.0);
  const double rS = std::sqrt(S);
  const double k = 2.0 / std::numbers::pi;
  return s2 * k * ((2.0 * (A + B) * rS / Q + std::asin(rho)) * 2.0 * x - (8.0 * C * rS / Q) * xb);
}

// E[sign(<A, X X' - Xb Xb'>) (A + A') X] for A with N(0, sigma^2) entries.
Vector ms_closed_form(const Vector& x, const Vector& xb, int D, int r, double sigma) {
  const Eigen::Map<const Matrix> X(x.data(), D, r), Xb(xb.data(), D, r);
  const Matrix M = X * X.transpose() - Xb * Xb.transpose();
  const double nm = M.norm();
  if (nm == 0.0) return Vector::Zero(x.size());
  const Matrix G = (2.0 * sigma * std::sqrt(2.0 / std::numbers::pi) / nm) * (M * X);
  return Eigen::Map<const Vector>(G.data(), D * r);
}

}  // namespace

PopulationOracle PopulationOracle::mega_sample(const CompositeModel& model, const ScalarConvexLoss& loss,
                                               const DistributionSpec& dist, const Vector& x_bar, Eigen::Index m_pop,
                                               std::uint64_t seed, int threads) {
  require(m_pop >= 1, ErrorCode::invalid_argument, "mega-sample: m_pop must be >= 1");
  return from_dataset(model, loss, draw_dataset(model, dist, x_bar, m_pop, seed, threads));
}

PopulationOracle PopulationOracle::from_dataset(const CompositeModel& model, const ScalarConvexLoss& loss,
                                                Dataset data) {
  require(data.kind == model.kind() && data.shape == model.shape(), ErrorCode::dimension_mismatch,
          "oracle: dataset does not match model");
  PopulationOracle o;
  o.strategy_ = Strategy::mega_sample;
  o.model_ = std::make_shared<const CompositeModel>(model);
  o.loss_ = std::make_shared<const ScalarConvexLoss>(loss);
  o.data_ = std::make_shared<const Dataset>(std::move(data));
  return o;
}

bool PopulationOracle::closed_form_available(const CompositeModel& model, const ScalarConvexLoss& loss,
                                             const DistributionSpec& dist) {
  if (dist.law != FeatureLaw::gaussian || dist.noise.kind != NoiseSpec::Kind::none || dist.response) return false;
  if (!is_abs(loss)) return false;
  return model.kind() == ModelKind::phase_retrieval || model.kind() == ModelKind::matrix_sensing;
}

PopulationOracle PopulationOracle::closed_form(const CompositeModel& model, const ScalarConvexLoss& loss,
                                               const DistributionSpec& dist, const Vector& x_bar) {
  require(closed_form_available(model, loss, dist), ErrorCode::unavailable,
          "no closed-form population oracle for this model/loss/distribution");
  require_dim(x_bar.size(), model.dim(), "closed-form oracle ground truth");
  PopulationOracle o;
  o.strategy_ = Strategy::closed_form;
  o.tag_ = model.kind() == ModelKind::phase_retrieval ? ClosedFormTag::pr_gaussian_abs_noiseless
                                                      : ClosedFormTag::ms_gaussian_abs_noiseless;
  o.model_ = std::make_shared<const CompositeModel>(model);
  o.loss_ = std::make_shared<const ScalarConvexLoss>(loss);
  o.x_bar_ = x_bar;
  o.sigma_ = dist.sigma;
  return o;
}

Eigen::Index PopulationOracle::m_pop() const { return data_ ? data_->size() : 0; }

PopEstimate PopulationOracle::G(const Vector& x) const {
  require_dim(x.size(), dim(), "population G");
  std::vector<double> err;
  Matrix X = x;
  const Matrix g = G_batch(X, &err);
  return {g.col(0), err[0]};
}

Matrix PopulationOracle::G_batch(const Matrix& X, std::vector<double>* err, int threads) const {
  require_dim(X.rows(), dim(), "population G");
  if (strategy_ == Strategy::closed_form) {
    Matrix out(X.rows(), X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      const Vector x = X.col(j);
      out.col(j) = tag_ == ClosedFormTag::pr_gaussian_abs_noiseless
                       ? pr_closed_form(x, x_bar_, sigma_)
                       : ms_closed_form(x, x_bar_, model_->shape()[0], model_->shape()[1], sigma_);
    }
    if (err) err->assign(static_cast<std::size_t>(X.cols()), 0.0);
    return out;
  }
  const BatchMoments mom = selection_moments(*model_, *loss_, *data_, X, err != nullptr, threads);
  if (err) {
    err->resize(static_cast<std::size_t>(X.cols()));
    const double n = static_cast<double>(data_->size());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      const Vector var = (mom.second.col(j).array() - mom.mean.col(j).array().square()).max(0.0).matrix();
      (*err)[static_cast<std::size_t>(j)] = 3.0 * std::sqrt(var.sum() / n);
    }
  }
  return mom.mean;
}

}  // namespace subdiff
