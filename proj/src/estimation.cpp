// Copyright 2026 The mtd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mtd/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "mtd/linalg.hpp"

namespace mtd {
namespace {

std::vector<Index> all_rows(Index m) {
  std::vector<Index> rows(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) rows[static_cast<std::size_t>(i)] = i;
  return rows;
}

Matrix select_rows(const Matrix& c, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), c.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = c.row(rows[i]);
  return out;
}

Matrix select_block(const Matrix& r, const std::vector<Index>& rows) {
  const auto k = static_cast<Index>(rows.size());
  Matrix out(k, k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      out(i, j) = r(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

Vector select(const Vector& y, const std::vector<Index>& rows) {
  Vector out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Index>(i)) = y(rows[i]);
  return out;
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

/// Observability rows of one sensor, each scaled to unit norm so the rank
/// decision does not depend on the growth of A^k.
Matrix normalized_observability(const LtiPair& pair, Index sensor) {
  const Index n = pair.n();
  Matrix obs(n, n);
  Eigen::RowVectorXd row = pair.C.row(sensor);
  for (Index k = 0; k < n; ++k) {
    const double norm = row.norm();
    obs.row(k) = norm > 0.0 ? Eigen::RowVectorXd(row / norm) : row;
    row = row * pair.A;
  }
  return obs;
}

constexpr double kSubspaceTol = 1e-8;

}  // namespace

// ---------------------------------------------------------------------------
// Central filter

CentralFilterState central_filter_init(const NoiseModel& noise, const Vector& x0_prior) {
  require(x0_prior.size() == noise.P0.rows(), ErrorKind::Dimension,
          "central filter: prior mean and P0 disagree in size");
  CentralFilterState st;
  st.x_prior = x0_prior;
  st.P_prior = noise.P0;
  return st;
}

void central_update(CentralFilterState& st, const LtiPair& pair, const Vector& y,
                    const Matrix& R, const std::vector<Index>& rows) {
  require(y.size() == pair.m(), ErrorKind::Dimension, "central filter: y must have m entries");
  st.rows = rows.empty() ? all_rows(pair.m()) : rows;
  const Matrix c = select_rows(pair.C, st.rows);
  const Matrix r = select_block(R, st.rows);
  const Matrix& p = st.P_prior;

  st.innovation_cov = symmetrized(c * p * c.transpose() + r);
  Eigen::LLT<Matrix> llt(st.innovation_cov);
  require(llt.info() == Eigen::Success, ErrorKind::Filter,
          "central filter: innovation covariance is not positive definite");
  st.K = llt.solve(c * p).transpose();
  st.innovation_isqrt = linalg::inverse_sqrt_spd(st.innovation_cov);

  const Vector innovation = select(y, st.rows) - c * st.x_prior;
  st.z = st.innovation_isqrt * innovation;
  st.x_post = st.x_prior + st.K * innovation;
  const Matrix ikc = Matrix::Identity(p.rows(), p.cols()) - st.K * c;
  st.P_post = symmetrized(ikc * p * ikc.transpose() + st.K * r * st.K.transpose());
}

void central_predict(CentralFilterState& st, const LtiPair& pair, const Matrix& Q,
                     const Vector& shift) {
  st.x_prior = pair.A * st.x_post;
  if (shift.size() > 0) st.x_prior -= shift;
  st.P_prior = symmetrized(pair.A * st.P_post * pair.A.transpose() + Q);
}

void central_filter_step(CentralFilterState& st, const LtiPair& pair, const Vector& y,
                         const NoiseModel& noise) {
  central_update(st, pair, y, noise.R);
  central_predict(st, pair, noise.Q);
}

// ---------------------------------------------------------------------------
// Attack bias

std::vector<BiasState> bias_recursion(const TargetSet& ts, const Schedule& schedule,
                                      const NoiseModel& noise,
                                      const std::vector<Vector>& injected) {
  require(injected.size() == schedule.size(), ErrorKind::Dimension,
          "bias_recursion: attack and schedule horizons differ");
  CentralFilterState st = central_filter_init(noise, noise.x0_mean);
  std::vector<BiasState> out;
  out.reserve(schedule.size());
  Vector prior_bias = Vector::Zero(ts.n());  // A_{k-1} delta_e_{k-1}
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const LtiPair& p = ts.pair(schedule[k]);
    require(injected[k].size() == ts.m(), ErrorKind::Dimension,
            "bias_recursion: injected values must be m-vectors");
    central_update(st, p, Vector::Zero(ts.m()), noise.R);
    BiasState b;
    const Vector shifted = p.C * prior_bias + injected[k];
    b.delta_z = st.innovation_isqrt * shifted;
    b.delta_e = prior_bias - st.K * shifted;
    prior_bias = p.A * b.delta_e;
    out.push_back(std::move(b));
    central_predict(st, p, noise.Q);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Kalman decomposition

Matrix unobservable_basis(const LtiPair& pair, Index sensor, double tau_rank) {
  require(sensor >= 0 && sensor < pair.m(), ErrorKind::InvalidArgument,
          "sensor index out of range");
  return linalg::null_space(normalized_observability(pair, sensor), tau_rank);
}

namespace {

/// Largest principal-angle sine between two orthonormal bases of equal size.
double subspace_gap(const Matrix& a, const Matrix& b) {
  if (a.cols() == 0) return 0.0;
  const Matrix residual = b - a * (a.transpose() * b);
  return Eigen::JacobiSVD<Matrix>(residual).singularValues()(0);
}

/// Index of the first model whose null space differs from model 0, or -1.
Index first_nullspace_mismatch(const TargetSet& ts, Index sensor, double tau_rank,
                               const Matrix& reference) {
  for (Index j = 1; j < ts.size(); ++j) {
    const Matrix nj = unobservable_basis(ts.pair(j), sensor, tau_rank);
    if (nj.cols() != reference.cols() || subspace_gap(reference, nj) > kSubspaceTol) return j;
  }
  return -1;
}

}  // namespace

bool check_common_nullspace(const TargetSet& ts, Index sensor, double tau_rank) {
  const Matrix n0 = unobservable_basis(ts.pair(0), sensor, tau_rank);
  return first_nullspace_mismatch(ts, sensor, tau_rank, n0) < 0;
}

SensorDecomposition kalman_decomposition(const TargetSet& ts, Index sensor,
                                         const NoiseModel& noise) {
  require(sensor >= 0 && sensor < ts.m(), ErrorKind::InvalidArgument,
          "sensor index out of range");
  SensorDecomposition d;
  d.sensor = sensor;
  d.T_uo = unobservable_basis(ts.pair(0), sensor);
  const Index bad = first_nullspace_mismatch(ts, sensor, -1.0, d.T_uo);
  if (bad >= 0) {
    fail(ErrorKind::Decomposition, "kalman_decomposition: sensor " + std::to_string(sensor + 1) +
                                       " sees a different unobservable subspace under model " +
                                       std::to_string(bad + 1) + " than under model 1");
  }
  d.T_o = linalg::orthogonal_complement(d.T_uo);
  require(d.T_o.cols() >= 1, ErrorKind::Decomposition,
          "kalman_decomposition: sensor " + std::to_string(sensor + 1) + " observes nothing");

  Matrix t(ts.n(), ts.n());
  t << d.T_uo, d.T_o;
  const Vector sv = Eigen::JacobiSVD<Matrix>(t).singularValues();
  d.condition = sv(0) / sv(sv.size() - 1);

  for (Index j = 0; j < ts.size(); ++j) {
    const LtiPair& p = ts.pair(j);
    LtiPair reduced(d.T_o.transpose() * p.A * d.T_o, p.C.row(sensor) * d.T_o);
    require(is_observable(reduced), ErrorKind::Decomposition,
            "kalman_decomposition: reduced pair " + std::to_string(j + 1) + " of sensor " +
                std::to_string(sensor + 1) + " is not observable");
    d.reduced.push_back(std::move(reduced));
  }
  d.R_ss = noise.R(sensor, sensor);
  return d;
}

std::vector<SensorDecomposition> decompose_all(const TargetSet& ts, const NoiseModel& noise) {
  std::vector<SensorDecomposition> out;
  out.reserve(static_cast<std::size_t>(ts.m()));
  for (Index s = 0; s < ts.m(); ++s) out.push_back(kalman_decomposition(ts, s, noise));
  return out;
}

// ---------------------------------------------------------------------------
// Filter bank

FilterBank::FilterBank(const NoiseModel& noise, std::vector<SensorDecomposition> decomps,
                       const Vector& x0_prior)
    : decomps_(std::move(decomps)), R_(noise.R) {
  const Index m = sensors();
  require(m >= 1, ErrorKind::InvalidArgument, "filter bank: no sensors");
  locals_.resize(static_cast<std::size_t>(m));
  q_blocks_.resize(static_cast<std::size_t>(m * m));
  prior_.resize(static_cast<std::size_t>(m * m));
  post_.resize(static_cast<std::size_t>(m * m));
  for (Index a = 0; a < m; ++a) {
    const Matrix& ta = decomposition(a).T_o;
    locals_[static_cast<std::size_t>(a)].zeta_prior = ta.transpose() * x0_prior;
    for (Index b = 0; b < m; ++b) {
      const Matrix& tb = decomposition(b).T_o;
      q_blocks_[slot(a, b)] = ta.transpose() * noise.Q * tb;
      prior_[slot(a, b)] = ta.transpose() * noise.P0 * tb;
    }
  }
}

std::vector<Index> FilterBank::active_sensors() const {
  std::vector<Index> out;
  for (Index s = 0; s < sensors(); ++s) {
    if (active(s)) out.push_back(s);
  }
  return out;
}

void FilterBank::local_filter_step(Index s, Index j, double y_s) {
  LocalFilter& f = locals_[static_cast<std::size_t>(s)];
  const SensorDecomposition& d = decomposition(s);
  const Matrix& c = d.reduced[static_cast<std::size_t>(j)].C;
  const Matrix& p = prior_[slot(s, s)];
  f.innovation_var = (c * p * c.transpose())(0, 0) + d.R_ss;
  require(f.innovation_var > 0.0, ErrorKind::Filter,
          "local filter: nonpositive innovation variance at sensor " + std::to_string(s + 1));
  f.K = p * c.transpose() / f.innovation_var;
  const double innovation = y_s - (c * f.zeta_prior)(0);
  f.z = innovation / std::sqrt(f.innovation_var);
  f.zeta_post = f.zeta_prior + f.K * innovation;
}

void FilterBank::cross_covariance_step(Index s1, Index s2) {
  const auto& c1 = decomposition(s1).reduced[static_cast<std::size_t>(current_)];
  const auto& c2 = decomposition(s2).reduced[static_cast<std::size_t>(current_)];
  const Matrix& k1 = locals_[static_cast<std::size_t>(s1)].K;
  const Matrix& k2 = locals_[static_cast<std::size_t>(s2)].K;
  const Matrix i1 = Matrix::Identity(k1.rows(), k1.rows()) - k1 * c1.C;
  const Matrix i2 = Matrix::Identity(k2.rows(), k2.rows()) - k2 * c2.C;
  Matrix post = i1 * prior_[slot(s1, s2)] * i2.transpose() + R_(s1, s2) * k1 * k2.transpose();
  Matrix next = c1.A * post * c2.A.transpose() + q_blocks_[slot(s1, s2)];
  if (s1 == s2) {
    post = symmetrized(post);
    next = symmetrized(next);
  } else {
    post_[slot(s2, s1)] = post.transpose();
    prior_[slot(s2, s1)] = next.transpose();
  }
  post_[slot(s1, s2)] = std::move(post);
  prior_[slot(s1, s2)] = std::move(next);
}

void FilterBank::update(Index j, const Vector& y, Exec exec) {
  require(y.size() == sensors(), ErrorKind::Dimension, "filter bank: y must have m entries");
  current_ = j;
  const std::vector<Index> act = active_sensors();
  const auto na = static_cast<long>(act.size());
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (long i = 0; i < na; ++i) {
    const Index s = act[static_cast<std::size_t>(i)];
    local_filter_step(s, j, y(s));
  }

  std::vector<std::pair<Index, Index>> pairs;
  for (std::size_t a = 0; a < act.size(); ++a) {
    for (std::size_t b = a; b < act.size(); ++b) pairs.emplace_back(act[a], act[b]);
  }
  const auto np = static_cast<long>(pairs.size());
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
  for (long i = 0; i < np; ++i) {
    cross_covariance_step(pairs[static_cast<std::size_t>(i)].first,
                          pairs[static_cast<std::size_t>(i)].second);
  }
}

void FilterBank::predict(const Vector& shift) {
  require(current_ >= 0, ErrorKind::Filter, "filter bank: predict before update");
  for (Index s : active_sensors()) {
    LocalFilter& f = locals_[static_cast<std::size_t>(s)];
    const SensorDecomposition& d = decomposition(s);
    f.zeta_prior = d.reduced[static_cast<std::size_t>(current_)].A * f.zeta_post;
    if (shift.size() > 0) f.zeta_prior -= d.T_o.transpose() * shift;
  }
}

void FilterBank::deactivate(Index s) {
  require(s >= 0 && s < sensors(), ErrorKind::InvalidArgument, "sensor index out of range");
  locals_[static_cast<std::size_t>(s)].active = false;
}

// ---------------------------------------------------------------------------
// Fusion

namespace {

Matrix build_w(const std::vector<SensorDecomposition>& decomps,
               const std::vector<Index>& active) {
  require(!active.empty(), ErrorKind::InvalidArgument, "fusion: no active sensors");
  const Index n = decomps.front().T_uo.rows();
  Index uo = 0;
  for (Index s : active) uo += decomps[static_cast<std::size_t>(s)].T_uo.cols();
  const auto rows = n * static_cast<Index>(active.size());
  Matrix w = Matrix::Zero(rows, uo + n);
  Index col = 0;
  for (std::size_t i = 0; i < active.size(); ++i) {
    const Matrix& t = decomps[static_cast<std::size_t>(active[i])].T_uo;
    const Index r0 = static_cast<Index>(i) * n;
    w.block(r0, col, n, t.cols()) = -t;
    w.block(r0, uo, n, n).setIdentity();
    col += t.cols();
  }
  return w;
}

}  // namespace

bool FusionModel::well_defined(const std::vector<SensorDecomposition>& decomps,
                               const std::vector<Index>& active) {
  if (active.empty()) return false;
  const Matrix w = build_w(decomps, active);
  return linalg::numerical_rank(w) == w.cols();
}

FusionModel::FusionModel(const std::vector<SensorDecomposition>& decomps,
                         std::vector<Index> active, double epsilon)
    : active_(std::move(active)), epsilon_(epsilon) {
  require(epsilon_ > 0.0, ErrorKind::InvalidArgument, "fusion: epsilon must be positive");
  std::sort(active_.begin(), active_.end());
  W_ = build_w(decomps, active_);
  require(linalg::numerical_rank(W_) == W_.cols(), ErrorKind::Filter,
          "fusion: design matrix W has a nontrivial null space for this sensor set");
  n_ = decomps.front().T_uo.rows();
  for (Index s : active_) T_o_.push_back(decomps[static_cast<std::size_t>(s)].T_o);
}

Matrix FusionModel::stacked_covariance(const FilterBank& bank, Exec exec) const {
  const auto blocks = static_cast<Index>(active_.size());
  Matrix q(blocks * n_, blocks * n_);
  const long total = static_cast<long>(blocks * blocks);
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (long idx = 0; idx < total; ++idx) {
    const Index a = idx / blocks;
    const Index b = idx % blocks;
    if (b < a) continue;
    const Matrix& ta = T_o_[static_cast<std::size_t>(a)];
    const Matrix& tb = T_o_[static_cast<std::size_t>(b)];
    Matrix blk = ta * bank.cross_post(active_[static_cast<std::size_t>(a)],
                                      active_[static_cast<std::size_t>(b)]) *
                 tb.transpose();
    if (a == b) {
      blk = symmetrized(blk);
      blk.diagonal().array() += epsilon_;
    } else {
      q.block(b * n_, a * n_, n_, n_) = blk.transpose();
    }
    q.block(a * n_, b * n_, n_, n_) = blk;
  }
  return q;
}

FusionResult FusionModel::fuse(const FilterBank& bank, RandomStream& eta, Exec exec) const {
  const auto blocks = static_cast<Index>(active_.size());
  Vector yhat(blocks * n_);
  const double sd = std::sqrt(epsilon_);
  for (Index a = 0; a < blocks; ++a) {
    const Index s = active_[static_cast<std::size_t>(a)];
    require(bank.active(s), ErrorKind::Filter,
            "fusion: sensor " + std::to_string(s + 1) + " was removed from the bank");
    yhat.segment(a * n_, n_) =
        T_o_[static_cast<std::size_t>(a)] * bank.local(s).zeta_post + sd * eta.normal_vector(n_);
  }

  FusionResult out;
  out.q_cal = stacked_covariance(bank, exec);
  Eigen::LLT<Matrix> llt(out.q_cal);
  if (llt.info() != Eigen::Success) {
    Matrix jittered = out.q_cal;
    jittered.diagonal().array() += 10.0 * epsilon_;
    llt.compute(jittered);
    require(llt.info() == Eigen::Success, ErrorKind::Filter,
            "fusion: stacked covariance is not positive definite after jitter");
  }
  const Matrix x = llt.matrixL().solve(W_);
  const Vector yw = llt.matrixL().solve(yhat);
  const Matrix normal = x.transpose() * x;
  Eigen::LLT<Matrix> nllt(normal);
  require(nllt.info() == Eigen::Success, ErrorKind::Filter,
          "fusion: normal matrix W' Q^-1 W is not positive definite");
  const Vector full = nllt.solve(x.transpose() * yw);
  out.x_star = full.tail(n_);
  Matrix tail_rhs = Matrix::Zero(normal.rows(), n_);
  tail_rhs.bottomRows(n_).setIdentity();
  out.cov = symmetrized(nllt.solve(tail_rhs).bottomRows(n_));
  return out;
}

}  // namespace mtd
