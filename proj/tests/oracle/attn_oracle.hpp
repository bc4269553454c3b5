#pragma once

// Element-by-element evaluation of the recurrent encoder, alignment model,
// decoder step and teacher-forced log-likelihood using plain loops over
// std::vector<double>. Parameters are read out of the library structs by index.

#include <cmath>
#include <vector>

#include "subseg/attn.hpp"

namespace oracle {

using Vec = std::vector<double>;

inline double sigm(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline Vec affine(const subseg::attn::Matrix& W, const Vec& x) {
  Vec y(static_cast<std::size_t>(W.rows()), 0.0);
  for (long r = 0; r < W.rows(); ++r) {
    double s = 0.0;
    for (long c = 0; c < W.cols(); ++c)
      s += W(r, c) * x[static_cast<std::size_t>(c)];
    y[static_cast<std::size_t>(r)] = s;
  }
  return y;
}

inline Vec gru(const subseg::attn::GruParams& p, const Vec& x, const Vec& h) {
  const std::size_t n = h.size();
  const Vec wr = affine(p.W_r, x), ur = affine(p.U_r, h);
  const Vec wu = affine(p.W_u, x), uu = affine(p.U_u, h);
  Vec reset(n), update(n), gated(n);
  for (std::size_t i = 0; i < n; ++i) {
    reset[i] = sigm(wr[i] + ur[i] + p.b_r[static_cast<long>(i)]);
    update[i] = sigm(wu[i] + uu[i] + p.b_u[static_cast<long>(i)]);
    gated[i] = reset[i] * h[i];
  }
  const Vec wh = affine(p.W_h, x), uh = affine(p.U_h, gated);
  Vec out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double cand = std::tanh(wh[i] + uh[i] + p.b_h[static_cast<long>(i)]);
    out[i] = update[i] * h[i] + (1.0 - update[i]) * cand;
  }
  return out;
}

inline Vec embed(const subseg::attn::EmbeddingTable& e, std::size_t id) {
  Vec out(e.dim());
  for (std::size_t c = 0; c < e.dim(); ++c)
    out[c] = e.rows(static_cast<long>(id), static_cast<long>(c));
  return out;
}

inline std::vector<Vec> encode(const std::vector<std::size_t>& ids,
                               const subseg::attn::EmbeddingTable& e,
                               const subseg::attn::GruParams& f,
                               const subseg::attn::GruParams& b) {
  const std::size_t n = ids.size();
  std::vector<Vec> fw(n), bw(n);
  Vec h(f.state_dim(), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    fw[i] = h = gru(f, embed(e, ids[i]), h);
  h.assign(b.state_dim(), 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = n - 1 - k;
    bw[i] = h = gru(b, embed(e, ids[i]), h);
  }
  std::vector<Vec> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = fw[i];
    out[i].insert(out[i].end(), bw[i].begin(), bw[i].end());
  }
  return out;
}

struct AttentionOut {
  Vec scores, weights, context;
};

inline AttentionOut attend(const Vec& z, const std::vector<Vec>& hs, const subseg::attn::AttnParams& p) {
  AttentionOut out;
  const Vec wz = affine(p.W, z);
  for (const auto& h : hs) {
    const Vec uh = affine(p.U, h);
    double s = 0.0;
    for (std::size_t k = 0; k < wz.size(); ++k)
      s += p.v[static_cast<long>(k)] * std::tanh(wz[k] + uh[k]);
    out.scores.push_back(s);
  }
  double mx = out.scores[0];
  for (double s : out.scores)
    mx = std::max(mx, s);
  double total = 0.0;
  for (double s : out.scores) {
    out.weights.push_back(std::exp(s - mx));
    total += out.weights.back();
  }
  for (double& w : out.weights)
    w /= total;
  out.context.assign(hs[0].size(), 0.0);
  for (std::size_t i = 0; i < hs.size(); ++i) {
    for (std::size_t c = 0; c < hs[i].size(); ++c)
      out.context[c] += out.weights[i] * hs[i][c];
  }
  return out;
}

inline Vec decode_step(const Vec& z, const Vec& t_prev, const Vec& ctx, const subseg::attn::GruParams& cell) {
  Vec x = t_prev;
  x.insert(x.end(), ctx.begin(), ctx.end());
  return gru(cell, x, z);
}

inline double log_likelihood(const subseg::attn::Model& m,
                             const std::vector<std::size_t>& src,
                             const std::vector<std::size_t>& tgt) {
  const auto hs = encode(src, m.source_embedding, m.encoder_forward, m.encoder_backward);
  Vec z(m.decoder.state_dim(), 0.0);
  Vec t(m.target_embedding.dim(), 0.0);
  double total = 0.0;
  for (const auto y : tgt) {
    const auto a = attend(z, hs, m.attention);
    z = decode_step(z, t, a.context, m.decoder);
    Vec logits = affine(m.W_out, z);
    double mx = -1e300;
    for (std::size_t k = 0; k < logits.size(); ++k) {
      logits[k] += m.b_out[static_cast<long>(k)];
      mx = std::max(mx, logits[k]);
    }
    double sum = 0.0;
    for (double l : logits)
      sum += std::exp(l - mx);
    total += logits[y] - mx - std::log(sum);
    t = embed(m.target_embedding, y);
  }
  return total;
}

}  // namespace oracle
