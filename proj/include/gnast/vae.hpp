#pragma once

#include <vector>

#include "gnast/layers.hpp"
#include "gnast/losses.hpp"
#include "gnast/optimizer.hpp"
#include "gnast/trace.hpp"

namespace gnast {

template <typename T>
struct LatentDistribution {
  Tensor<T> mu;
  Tensor<T> logvar;
};

// z = mu + exp(0.5*logvar) .* eps
template <typename T>
Tensor<T> reparameterize(const LatentDistribution<T>& d, const Tensor<T>& eps) {
  if (eps.numel() != d.mu.numel())
    throw std::invalid_argument("reparameterize: eps length mismatch");
  Tensor<T> z(d.mu.shape);
  for (std::size_t i = 0; i < z.numel(); ++i)
    z(i) = d.mu(i) + std::exp(T(0.5) * d.logvar(i)) * eps(i);
  return z;
}

struct VaeDims {
  std::size_t map_size = 1024;
  std::size_t hidden1 = 512;
  std::size_t hidden2 = 128;
  std::size_t latent = 16;
};

// Variational autoencoder over coverage traces. The encoder maps a trace
// (classes scaled to [0,1] as class/7) through two dense hidden layers to
// (mu, logvar); the decoder mirrors it and ends in an 8-way categorical
// head per map position. Embeddings are the mu output alone.
template <typename T>
class Vae {
 public:
  static constexpr std::size_t kClasses = 8;

  Vae(VaeDims dims, T leaky_slope, std::uint64_t init_seed)
      : dims_(dims), slope_(leaky_slope), params_(init_seed) {
    Rng rng(init_seed);
    auto dense = [&](const char* name, std::size_t out, std::size_t in) {
      std::size_t wi = params_.add(std::string(name) + ".w", {out, in});
      init_uniform(params_.value(wi), in, out, rng);
      params_.add(std::string(name) + ".b", {out});
    };
    dense("enc1", dims_.hidden1, dims_.map_size);
    dense("enc2", dims_.hidden2, dims_.hidden1);
    dense("mu", dims_.latent, dims_.hidden2);
    dense("logvar", dims_.latent, dims_.hidden2);
    dense("dec1", dims_.hidden2, dims_.latent);
    dense("dec2", dims_.hidden1, dims_.hidden2);
    dense("head", dims_.map_size * kClasses, dims_.hidden1);
    cache_indices();
  }

  Vae(VaeDims dims, T leaky_slope, ModelParameters<T> params)
      : dims_(dims), slope_(leaky_slope), params_(std::move(params)) {
    cache_indices();
    if (params_.value(i_enc1w_).shape !=
        std::vector<std::size_t>{dims_.hidden1, dims_.map_size})
      throw std::invalid_argument("vae: checkpoint does not match dimensions");
  }

  const VaeDims& dims() const { return dims_; }
  ModelParameters<T>& params() { return params_; }
  const ModelParameters<T>& params() const { return params_; }
  T leaky_slope() const { return slope_; }

  LatentDistribution<T> encode(const CoverageTrace& trace) const {
    Tensor<T> x = trace_input(trace);
    EncCache c;
    encode_batch(x, c);
    return {Tensor<T>({dims_.latent}, std::move(c.mu.data)),
            Tensor<T>({dims_.latent}, std::move(c.logvar.data))};
  }

  // Deterministic embedding: the mu head only, no sampling.
  Tensor<T> embed(const CoverageTrace& trace) const { return encode(trace).mu; }

  Tensor<T> decode_logits(const Tensor<T>& z) const {
    Tensor<T> zr({1, dims_.latent});
    zr.data = z.data;
    DecCache c;
    decode_batch(zr, c);
    return Tensor<T>({dims_.map_size, kClasses}, std::move(c.logits.data));
  }

  // Per-position class distributions; each row sums to 1.
  Tensor<T> decode(const Tensor<T>& z) const { return softmax_rows(decode_logits(z)); }

  // Reconstruction cross-entropy plus KL, for one trace and fixed eps.
  T loss(const CoverageTrace& trace, const Tensor<T>& eps) const {
    std::vector<const CoverageTrace*> batch{&trace};
    return loss_and_grads(batch, eps, nullptr);
  }

  // Mean per-sample loss over a batch; accumulates parameter gradients of
  // the mean objective into *grads when given. eps is (B x latent).
  T loss_and_grads(const std::vector<const CoverageTrace*>& batch, const Tensor<T>& eps,
                   std::vector<Tensor<T>>* grads) const {
    const std::size_t b = batch.size();
    const std::size_t m = dims_.map_size, latent = dims_.latent;
    if (b == 0) throw std::invalid_argument("vae loss: empty batch");
    if (eps.numel() != b * latent) throw std::invalid_argument("vae loss: eps shape mismatch");

    Tensor<T> x({b, m});
    for (std::size_t i = 0; i < b; ++i) {
      if (batch[i]->map_size() != m)
        throw std::invalid_argument("vae loss: trace length does not match map_size");
      for (std::size_t p = 0; p < m; ++p)
        x(i, p) = static_cast<T>(batch[i]->classes[p]) / T(7);
    }

    EncCache ec;
    encode_batch(x, ec);

    // z = mu + exp(0.5*logvar) .* eps
    Tensor<T> scale({b, latent}), z({b, latent});
    for (std::size_t i = 0; i < b * latent; ++i) {
      scale.data[i] = std::exp(T(0.5) * ec.logvar.data[i]);
      z.data[i] = ec.mu.data[i] + scale.data[i] * eps.data[i];
    }

    DecCache dc;
    decode_batch(z, dc);

    // Cross-entropy, viewing logits as (b*m) rows of kClasses.
    Tensor<T> logit_rows({b * m, kClasses});
    logit_rows.data = dc.logits.data;
    Tensor<T> dlogit_rows({b * m, kClasses});
    const T inv_b = T(1) / static_cast<T>(b);
    T ce = softmax_ce_rows(
        logit_rows, [&](std::size_t r) { return std::size_t(batch[r / m]->classes[r % m]); },
        grads ? &dlogit_rows : nullptr);

    T kl = 0;
    for (std::size_t i = 0; i < b * latent; ++i) {
      kl += T(-0.5) * (T(1) + ec.logvar.data[i] - ec.mu.data[i] * ec.mu.data[i] -
                       std::exp(ec.logvar.data[i]));
    }
    const T mean_loss = (ce + kl) * inv_b;
    if (!std::isfinite(mean_loss)) throw instability_error("vae loss is not finite");
    if (!grads) return mean_loss;

    // Backward.
    Tensor<T> dlogits({b, m * kClasses});
    for (std::size_t i = 0; i < dlogits.numel(); ++i)
      dlogits.data[i] = dlogit_rows.data[i] * inv_b;

    Tensor<T> dz = decode_backward(z, dc, dlogits, *grads);

    Tensor<T> dmu({b, latent}), dlogvar({b, latent});
    for (std::size_t i = 0; i < b * latent; ++i) {
      dmu.data[i] = dz.data[i] + ec.mu.data[i] * inv_b;
      dlogvar.data[i] = dz.data[i] * eps.data[i] * T(0.5) * scale.data[i] +
                        T(0.5) * (std::exp(ec.logvar.data[i]) - T(1)) * inv_b;
    }
    encode_backward(x, ec, dmu, dlogvar, *grads);
    return mean_loss;
  }

  // One RMSProp step on a minibatch; eps drawn from rng. Returns mean loss.
  T train_step(const std::vector<const CoverageTrace*>& batch, Rng& rng, T lr) {
    Tensor<T> eps({batch.size(), dims_.latent});
    for (T& v : eps.data) v = static_cast<T>(rng.normal());
    std::vector<Tensor<T>> grads = params_.grad_buffer();
    const T loss = loss_and_grads(batch, eps, &grads);
    rmsprop_step(params_, grads, lr);
    return loss;
  }

 private:
  struct EncCache {
    Tensor<T> z1, a1, z2, a2, mu, logvar;  // pre/post activations per layer
  };
  struct DecCache {
    Tensor<T> z1, a1, z2, a2, logits;
  };

  VaeDims dims_;
  T slope_;
  ModelParameters<T> params_;
  std::size_t i_enc1w_, i_enc1b_, i_enc2w_, i_enc2b_, i_muw_, i_mub_, i_lvw_, i_lvb_;
  std::size_t i_dec1w_, i_dec1b_, i_dec2w_, i_dec2b_, i_headw_, i_headb_;

  void cache_indices() {
    i_enc1w_ = params_.index_of("enc1.w");
    i_enc1b_ = params_.index_of("enc1.b");
    i_enc2w_ = params_.index_of("enc2.w");
    i_enc2b_ = params_.index_of("enc2.b");
    i_muw_ = params_.index_of("mu.w");
    i_mub_ = params_.index_of("mu.b");
    i_lvw_ = params_.index_of("logvar.w");
    i_lvb_ = params_.index_of("logvar.b");
    i_dec1w_ = params_.index_of("dec1.w");
    i_dec1b_ = params_.index_of("dec1.b");
    i_dec2w_ = params_.index_of("dec2.w");
    i_dec2b_ = params_.index_of("dec2.b");
    i_headw_ = params_.index_of("head.w");
    i_headb_ = params_.index_of("head.b");
  }

  Tensor<T> trace_input(const CoverageTrace& trace) const {
    if (trace.map_size() != dims_.map_size)
      throw std::invalid_argument("vae: trace length does not match map_size");
    Tensor<T> x({1, dims_.map_size});
    for (std::size_t p = 0; p < dims_.map_size; ++p)
      x(0, p) = static_cast<T>(trace.classes[p]) / T(7);
    return x;
  }

  void encode_batch(const Tensor<T>& x, EncCache& c) const {
    c.z1 = dense_forward(x, params_.value(i_enc1w_), params_.value(i_enc1b_));
    c.a1 = leaky_relu(c.z1, slope_);
    c.z2 = dense_forward(c.a1, params_.value(i_enc2w_), params_.value(i_enc2b_));
    c.a2 = leaky_relu(c.z2, slope_);
    c.mu = dense_forward(c.a2, params_.value(i_muw_), params_.value(i_mub_));
    c.logvar = dense_forward(c.a2, params_.value(i_lvw_), params_.value(i_lvb_));
  }

  void decode_batch(const Tensor<T>& z, DecCache& c) const {
    c.z1 = dense_forward(z, params_.value(i_dec1w_), params_.value(i_dec1b_));
    c.a1 = leaky_relu(c.z1, slope_);
    c.z2 = dense_forward(c.a1, params_.value(i_dec2w_), params_.value(i_dec2b_));
    c.a2 = leaky_relu(c.z2, slope_);
    c.logits = dense_forward(c.a2, params_.value(i_headw_), params_.value(i_headb_));
  }

  // Returns dL/dz and accumulates decoder parameter grads.
  Tensor<T> decode_backward(const Tensor<T>& z, const DecCache& c, const Tensor<T>& dlogits,
                            std::vector<Tensor<T>>& grads) const {
    auto g_head = dense_backward(c.a2, params_.value(i_headw_), dlogits);
    accumulate(grads[i_headw_], g_head.dw);
    accumulate(grads[i_headb_], g_head.db);
    Tensor<T> dz2 = leaky_relu_backward(c.z2, g_head.dx, slope_);
    auto g_dec2 = dense_backward(c.a1, params_.value(i_dec2w_), dz2);
    accumulate(grads[i_dec2w_], g_dec2.dw);
    accumulate(grads[i_dec2b_], g_dec2.db);
    Tensor<T> dz1 = leaky_relu_backward(c.z1, g_dec2.dx, slope_);
    auto g_dec1 = dense_backward(z, params_.value(i_dec1w_), dz1);
    accumulate(grads[i_dec1w_], g_dec1.dw);
    accumulate(grads[i_dec1b_], g_dec1.db);
    return std::move(g_dec1.dx);
  }

  void encode_backward(const Tensor<T>& x, const EncCache& c, const Tensor<T>& dmu,
                       const Tensor<T>& dlogvar, std::vector<Tensor<T>>& grads) const {
    auto g_mu = dense_backward(c.a2, params_.value(i_muw_), dmu);
    accumulate(grads[i_muw_], g_mu.dw);
    accumulate(grads[i_mub_], g_mu.db);
    auto g_lv = dense_backward(c.a2, params_.value(i_lvw_), dlogvar);
    accumulate(grads[i_lvw_], g_lv.dw);
    accumulate(grads[i_lvb_], g_lv.db);
    Tensor<T> da2 = g_mu.dx;
    for (std::size_t i = 0; i < da2.numel(); ++i) da2.data[i] += g_lv.dx.data[i];
    Tensor<T> dz2 = leaky_relu_backward(c.z2, da2, slope_);
    auto g_enc2 = dense_backward(c.a1, params_.value(i_enc2w_), dz2);
    accumulate(grads[i_enc2w_], g_enc2.dw);
    accumulate(grads[i_enc2b_], g_enc2.db);
    Tensor<T> dz1 = leaky_relu_backward(c.z1, g_enc2.dx, slope_);
    auto g_enc1 = dense_backward(x, params_.value(i_enc1w_), dz1);
    accumulate(grads[i_enc1w_], g_enc1.dw);
    accumulate(grads[i_enc1b_], g_enc1.db);
  }

  static void accumulate(Tensor<T>& into, const Tensor<T>& from) {
    for (std::size_t i = 0; i < into.numel(); ++i) into.data[i] += from.data[i];
  }
};

// Underfitting detector: true when the loss history has not dropped by at
// least min_drop over its first `window` entries.
template <typename T>
bool non_convergence(const std::vector<T>& losses, std::size_t window = 500,
                     double min_drop = 0.10) {
  if (losses.size() < window || window < 20) return false;
  const std::size_t slice = window / 10;
  T head = 0, tail = 0;
  for (std::size_t i = 0; i < slice; ++i) head += losses[i];
  for (std::size_t i = window - slice; i < window; ++i) tail += losses[i];
  head /= static_cast<T>(slice);
  tail /= static_cast<T>(slice);
  return tail > head * static_cast<T>(1.0 - min_drop);
}

}  // namespace gnast
