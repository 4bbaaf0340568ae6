// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfmimo/closedform.hpp"

#include <string>

#include "cfmimo/numerics.hpp"

namespace cfmimo {

Tensor4 block_trace_table(const CMat& x, const CMat& y, int l) {
  if (l < 1 || x.rows() % l != 0 || x.rows() != x.cols() ||
      y.rows() != x.rows() || y.cols() != x.cols()) {
    throw NumericsError("block_trace_table: operands must be equal LN x LN");
  }
  const int n = static_cast<int>(x.rows()) / l;
  Tensor4 t(n);
  for (int c = 0; c < n; ++c) {
    for (int d = 0; d < n; ++d) {
      // tr(X^{ab} Y^{cd}) = sum(X^{ab} .* (Y^{cd})^T)
      const CMat yt = y.block(c * l, d * l, l, l).transpose();
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          t(a, b, c, d) = x.block(a * l, b * l, l, l).cwiseProduct(yt).sum();
        }
      }
    }
  }
  return t;
}

CMat z_matrix(const CMat& r_hat, int l) {
  const int n = static_cast<int>(r_hat.rows()) / l;
  CMat z(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) z(a, b) = block_trace(r_hat, b, a, l);
  }
  return z;
}

CMat cross_covariance(const SystemModel& model, int ap, int channel_ue,
                      int estimate_ue) {
  const int ln = model.l() * model.n();
  if (!model.plan.shares_pilot(channel_ue, estimate_ue)) return CMat::Zero(ln, ln);
  const auto& est = model.est;
  const CMat ft = pilot_transform(model.f_p[static_cast<std::size_t>(channel_ue)], model.l());
  // estimator = R_me F~_e^H Psi_me^{-1}, so estimator^H = Psi^{-1} F~_e R_me.
  return static_cast<double>(model.tau_p()) * model.r(ap, channel_ue) *
         ft.adjoint() * est.estimator[est.index(ap, estimate_ue)].adjoint();
}

PairTerms xi_p_matrices(const SystemModel& model, int ap, int k, int l) {
  if (!model.plan.shares_pilot(k, l)) {
    throw ConfigError("xi_p_matrices: UEs " + std::to_string(k) + " and " +
                      std::to_string(l) + " use different pilots");
  }
  const double tau = model.tau_p();
  const auto& est = model.est;
  const std::size_t idx = est.index(ap, k);
  const CMat ft = pilot_transform(model.f_p[static_cast<std::size_t>(l)], model.l());
  const CMat& r_l = model.r(ap, l);

  PairTerms t;
  t.s_proj = est.estimator[idx];
  t.xi = cross_covariance(model, ap, l, k);
  const CMat sf = t.s_proj * ft;
  t.p2 = hermitian_part(sf * r_l * sf.adjoint());
  t.p1 = hermitian_part(tau * t.s_proj *
                        (est.psi[idx] - tau * ft * r_l * ft.adjoint()) *
                        t.s_proj.adjoint());
  t.r_sqrt = hermitian_sqrt(r_l);
  t.p2_sqrt = hermitian_sqrt(t.p2);
  t.p2_factor = sf * t.r_sqrt;
  return t;
}

namespace {

// [tr(X^{ab})]_{ab}.
CMat block_trace_matrix(const CMat& x, int l) {
  const int n = static_cast<int>(x.rows()) / l;
  CMat out(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) out(a, b) = block_trace(x, a, b, l);
  }
  return out;
}

}  // namespace

ClosedFormContext::ClosedFormContext(const SystemModel& model,
                                     FourthMomentForm form)
    : model_(&model), form_(form) {
  const int m = model.m(), kk = model.k(), l = model.l(), n = model.n();
  z_.resize(static_cast<std::size_t>(m * kk));
  for (int ap = 0; ap < m; ++ap) {
    for (int ue = 0; ue < kk; ++ue) {
      z_[model.est.index(ap, ue)] = z_matrix(model.est.r_hat[model.est.index(ap, ue)], l);
    }
  }

  kernels_.resize(static_cast<std::size_t>(m * kk * kk));
  for (int ap = 0; ap < m; ++ap) {
    for (int ke = 0; ke < kk; ++ke) {
      for (int lc = 0; lc < kk; ++lc) {
        Kernel& q = kernels_[key(ap, ke, lc)];
        q.rr = block_trace_table(model.r(ap, lc),
                                 model.est.r_hat[model.est.index(ap, ke)], l);
        if (!model.plan.shares_pilot(ke, lc)) continue;
        q.copilot = true;
        const PairTerms t = xi_p_matrices(model, ap, ke, lc);
        q.lambda = block_trace_matrix(t.xi, l).transpose();
        q.g2_third = Tensor4(n);
        q.gg_third = Tensor4(n);
        if (form_ == FourthMomentForm::corrected) {
          const CMat rpt = block_trace_matrix(t.r_sqrt * t.p2_factor.adjoint(), l);
          const CMat ptr = block_trace_matrix(t.p2_factor * t.r_sqrt, l);
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
              for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                  q.g2_third(a, b, c, d) = rpt(c, a) * ptr(b, d);
                  q.gg_third(a, b, c, d) = rpt(a, c) * ptr(d, b);
                }
        } else {
          const Tensor4 tpr = block_trace_table(t.p2_sqrt, t.r_sqrt, l);
          // s1(q1 summed)(n, i', q2) and the q1 trace diagonal for the
          // estimate-side factor.
          std::vector<cd> s1(static_cast<std::size_t>(n * n * n), cd(0.0, 0.0));
          std::vector<cd> diag(static_cast<std::size_t>(n), cd(0.0, 0.0));
          for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c)
              for (int q2 = 0; q2 < n; ++q2)
                for (int q1 = 0; q1 < n; ++q1)
                  s1[static_cast<std::size_t>((a * n + c) * n + q2)] += tpr(q1, a, c, q2);
          for (int a = 0; a < n; ++a)
            for (int q1 = 0; q1 < n; ++q1) diag[static_cast<std::size_t>(a)] += tpr(q1, a, a, q1);
          CMat tail = CMat::Zero(n, n);  // sum_q2 tpr(p', q2, q2, i)
          for (int b = 0; b < n; ++b)
            for (int d = 0; d < n; ++d)
              for (int q2 = 0; q2 < n; ++q2) tail(b, d) += tpr(b, q2, q2, d);
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
              for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                  cd acc(0.0, 0.0);
                  for (int q2 = 0; q2 < n; ++q2) {
                    acc += s1[static_cast<std::size_t>((a * n + c) * n + q2)] *
                           tpr(b, q2, q2, d);
                  }
                  q.g2_third(a, b, c, d) = acc;
                  q.gg_third(a, b, c, d) = diag[static_cast<std::size_t>(a)] * tail(d, b);
                }
        }
      }
    }
  }
}

std::size_t ClosedFormContext::key(int ap, int k, int l) const {
  const int kk = model_->k();
  if (ap < 0 || ap >= model_->m() || k < 0 || k >= kk || l < 0 || l >= kk) {
    throw ConfigError("closed form: index out of range");
  }
  return static_cast<std::size_t>((ap * kk + k) * kk + l);
}

const CMat& ClosedFormContext::z(int ap, int ue) const {
  key(ap, ue, ue);
  return z_[model_->est.index(ap, ue)];
}

const CMat& ClosedFormContext::lambda(int ap, int k, int l) const {
  const Kernel& q = kernel(ap, k, l);
  if (!q.copilot) throw ConfigError("lambda: UEs use different pilots");
  return q.lambda;
}

CMat ClosedFormContext::gamma1(int ap, int k, int l, const CMat& f_bar) const {
  const Kernel& q = kernel(ap, k, l);
  const int n = model_->n();
  CMat out = CMat::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      cd acc(0.0, 0.0);
      for (int ip = 0; ip < n; ++ip)
        for (int i = 0; i < n; ++i) acc += f_bar(ip, i) * q.rr(ip, i, b, a);
      out(a, b) = acc;
    }
  return out;
}

CMat ClosedFormContext::gamma2(int ap, int k, int l, const CMat& f_bar) const {
  const Kernel& q = kernel(ap, k, l);
  if (!q.copilot) throw ConfigError("gamma2: UEs use different pilots");
  const int n = model_->n();
  const double tau2 = static_cast<double>(model_->tau_p()) * model_->tau_p();
  CMat out = gamma1(ap, k, l, f_bar);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      cd acc(0.0, 0.0);
      for (int ip = 0; ip < n; ++ip)
        for (int i = 0; i < n; ++i) acc += f_bar(ip, i) * q.g2_third(a, b, ip, i);
      out(a, b) += tau2 * acc;
    }
  return out;
}

std::pair<CMat, CMat> ClosedFormContext::t_matrices(int k, int l,
                                                    const CMat& f_bar) const {
  const int m = model_->m(), n = model_->n();
  CMat t1 = CMat::Zero(m * n, m * n);
  CMat t2 = CMat::Zero(m * n, m * n);
  const bool copilot = model_->plan.shares_pilot(k, l);
  for (int ap = 0; ap < m; ++ap) {
    const CMat g1 = gamma1(ap, k, l, f_bar);
    t1.block(ap * n, ap * n, n, n) = g1;
    if (copilot) t2.block(ap * n, ap * n, n, n) = gamma2(ap, k, l, f_bar) - g1;
  }
  if (copilot) {
    for (int ap = 0; ap < m; ++ap) {
      const CMat left = lambda(ap, k, l) * f_bar;
      for (int ap2 = 0; ap2 < m; ++ap2) {
        if (ap2 == ap) continue;
        t2.block(ap * n, ap2 * n, n, n) = left * lambda(ap2, k, l).adjoint();
      }
    }
  }
  return {t1, t2};
}

cd ClosedFormContext::diag_entry(const Kernel& q, int n, int i, int p,
                                 int p2) const {
  cd v = q.rr(n, i, p2, p);
  if (q.copilot) {
    const double tau2 = static_cast<double>(model_->tau_p()) * model_->tau_p();
    v += tau2 * q.gg_third(n, i, p, p2);
  }
  return v;
}

cd ClosedFormContext::gg_second_moment(int ap, int ap2, int l, int k, int n,
                                       int i, int p, int p2) const {
  const int nn = model_->n();
  if (n < 0 || n >= nn || i < 0 || i >= nn || p < 0 || p >= nn || p2 < 0 || p2 >= nn) {
    throw ConfigError("gg_second_moment: antenna index out of range");
  }
  // G_lk holds H_hat_ml^H H_mk: estimate of l, channel of k.
  const Kernel& q = kernel(ap, l, k);
  if (ap == ap2) return diag_entry(q, n, i, p, p2);
  if (!q.copilot) return cd(0.0, 0.0);
  // tr(Xi^{np}) with Xi = E{h_mk h_hat_ml^H}; second factor is the conjugate
  // counterpart at the other AP.
  return q.lambda(p, n) * std::conj(kernel(ap2, l, k).lambda(p2, i));
}

CMat ClosedFormContext::weighted_gram(const CMat& a_bar, int l, int k) const {
  const int m = model_->m(), n = model_->n();
  if (a_bar.rows() != m * n || a_bar.cols() != m * n) {
    throw NumericsError("weighted_gram: A_bar must be MN x MN");
  }
  // [out]_{ni} = tr(A_bar E{g_i g_n^H}).
  CMat out = CMat::Zero(n, n);
  for (int ap = 0; ap < m; ++ap) {
    const Kernel& q = kernel(ap, l, k);
    const auto blk = a_bar.block(ap * n, ap * n, n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        cd acc(0.0, 0.0);
        for (int p = 0; p < n; ++p)
          for (int p2 = 0; p2 < n; ++p2) acc += blk(p, p2) * diag_entry(q, b, a, p2, p);
        out(a, b) += acc;
      }
  }
  if (model_->plan.shares_pilot(l, k)) {
    // u_i[(m, p)] = tr(Xi_m^{ip}); cross-AP part is u_n^H A_bar u_i minus
    // its same-AP blocks.
    CMat u(m * n, n);
    for (int ap = 0; ap < m; ++ap) {
      u.middleRows(ap * n, n) = kernel(ap, l, k).lambda;
    }
    CMat cross = u.adjoint() * a_bar * u;
    for (int ap = 0; ap < m; ++ap) {
      const auto ua = u.middleRows(ap * n, n);
      cross -= ua.adjoint() * a_bar.block(ap * n, ap * n, n, n) * ua;
    }
    out += cross;
  }
  return hermitian_part(out);
}

std::pair<CMat, CMat> gamma_matrices(const ClosedFormContext& ctx,
                                     const CMat& f_bar, int ap, int k, int l) {
  CMat g1 = ctx.gamma1(ap, k, l, f_bar);
  if (!ctx.model().plan.shares_pilot(k, l)) return {g1, g1};
  return {g1, ctx.gamma2(ap, k, l, f_bar)};
}

namespace {

DecodeStatistics closed_shell(const ClosedFormContext& ctx) {
  const SystemModel& model = ctx.model();
  const int m = model.m(), kk = model.k(), n = model.n();
  DecodeStatistics stats;
  stats.m = m;
  stats.k = kk;
  stats.n = n;
  stats.source = StatsSource::closed_form;
  stats.g_gram.resize(static_cast<std::size_t>(kk * kk));
  for (int ue = 0; ue < kk; ++ue) {
    CMat mean(m * n, n);
    std::vector<CMat> blocks;
    for (int ap = 0; ap < m; ++ap) {
      mean.middleRows(ap * n, n) = ctx.z(ap, ue);
      blocks.push_back(ctx.z(ap, ue));
    }
    stats.g_mean.push_back(std::move(mean));
    stats.s.push_back(block_diagonal(blocks));
  }
  return stats;
}

void fill_row(const ClosedFormContext& ctx, const std::vector<CMat>& f_u,
              int k, DecodeStatistics& stats) {
  const int kk = ctx.model().k();
  for (int other = 0; other < kk; ++other) {
    const CMat& f = f_u[static_cast<std::size_t>(other)];
    auto [t1, t2] = ctx.t_matrices(k, other, f * f.adjoint());
    stats.g_gram[static_cast<std::size_t>(k * kk + other)] = hermitian_part(t1 + t2);
  }
}

}  // namespace

DecodeStatistics closed_form_statistics(const ClosedFormContext& ctx,
                                        const std::vector<CMat>& f_u) {
  if (static_cast<int>(f_u.size()) != ctx.model().k()) {
    throw ConfigError("need one data precoder per UE");
  }
  DecodeStatistics stats = closed_shell(ctx);
  for (int ue = 0; ue < ctx.model().k(); ++ue) fill_row(ctx, f_u, ue, stats);
  return stats;
}

LsfdResult closed_se_lsfd(const ClosedFormContext& ctx,
                          const std::vector<CMat>& f_u, int k) {
  if (static_cast<int>(f_u.size()) != ctx.model().k()) {
    throw ConfigError("need one data precoder per UE");
  }
  const SystemModel& model = ctx.model();
  DecodeStatistics stats = closed_shell(ctx);
  fill_row(ctx, f_u, k, stats);
  const CMat& f = f_u[static_cast<std::size_t>(k)];
  LsfdResult out;
  out.a_opt = optimal_lsfd(stats, f, model.cfg.sigma2, k);
  out.e_opt = optimal_mse_matrix(stats, out.a_opt, f, k);
  out.se = optimal_se(stats, f, model.cfg.sigma2, model.tau_p(), model.cfg.tau_c, k);
  return out;
}

}  // namespace cfmimo
