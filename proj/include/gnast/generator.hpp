#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gnast/layers.hpp"
#include "gnast/losses.hpp"
#include "gnast/optimizer.hpp"
#include "gnast/rng.hpp"

namespace gnast {

struct GenDims {
  std::size_t latent = 16;
  std::size_t len0 = 16;
  std::size_t filters = 32;
  std::size_t dict = 129;  // class 0 = padding, 1..128 = ASCII bytes 0..127
  std::size_t str_len = 512;
  std::vector<int> strides;  // one entry per deconv block
  bool use_batch_norm = false;
};

// Spreads the required stride-2 upsampling blocks over `blocks` positions,
// stride-2 first at even indices, stride-1 elsewhere.
inline std::vector<int> make_strides(std::size_t blocks, std::size_t len0, std::size_t str_len) {
  std::size_t ups = 0, len = len0;
  while (len < str_len) {
    len *= 2;
    ++ups;
  }
  if (len != str_len)
    throw std::invalid_argument("generator: str_len must be len0 times a power of two");
  if (blocks < ups)
    throw std::invalid_argument("generator: need at least " + std::to_string(ups) + " blocks");
  std::vector<int> strides(blocks, 1);
  std::size_t placed = 0;
  for (std::size_t i = 0; i < blocks && placed < ups; i += 2, ++placed) strides[i] = 2;
  for (std::size_t i = 1; i < blocks && placed < ups; i += 2, ++placed) strides[i] = 2;
  return strides;
}

inline GenDims desk_generator_dims(std::size_t blocks = 10, std::size_t filters = 32,
                                   std::size_t latent = 16, std::size_t len0 = 16,
                                   std::size_t str_len = 512, bool batch_norm = false) {
  GenDims d;
  d.latent = latent;
  d.len0 = len0;
  d.filters = filters;
  d.str_len = str_len;
  d.strides = make_strides(blocks, len0, str_len);
  d.use_batch_norm = batch_norm;
  return d;
}

// The generative network: a latent vector is upscaled by a dense layer and
// then grown to str_len positions by a stack of kernel-3 transposed
// convolutions (stride 2 doubles the length; stride-1 blocks carry residual
// shortcuts). A shared per-position projection yields dict-way logits.
template <typename T>
class Generator {
 public:
  static constexpr std::size_t kKernel = 3;

  Generator(GenDims dims, T leaky_slope, std::uint64_t init_seed)
      : dims_(std::move(dims)), slope_(leaky_slope), params_(init_seed) {
    validate_dims();
    Rng rng(init_seed);
    const std::size_t f = dims_.filters;
    std::size_t wi = params_.add("up.w", {dims_.len0 * f, dims_.latent});
    init_uniform(params_.value(wi), dims_.latent, dims_.len0 * f, rng);
    params_.add("up.b", {dims_.len0 * f});
    for (std::size_t bidx = 0; bidx < dims_.strides.size(); ++bidx) {
      const std::string base = "blk" + std::to_string(bidx);
      std::size_t ki = params_.add(base + ".k", {kKernel, f, f});
      init_uniform(params_.value(ki), f * kKernel, f, rng);
      params_.add(base + ".b", {f});
      if (dims_.use_batch_norm) {
        std::size_t gi = params_.add(base + ".g", {f});
        for (T& v : params_.value(gi).data) v = T(1);
        params_.add(base + ".be", {f});
      }
    }
    std::size_t hi = params_.add("head.w", {dims_.dict, f});
    init_uniform(params_.value(hi), f, dims_.dict, rng);
    params_.add("head.b", {dims_.dict});
    cache_indices();
  }

  Generator(GenDims dims, T leaky_slope, ModelParameters<T> params)
      : dims_(std::move(dims)), slope_(leaky_slope), params_(std::move(params)) {
    validate_dims();
    cache_indices();
    if (params_.value(i_upw_).shape !=
        std::vector<std::size_t>{dims_.len0 * dims_.filters, dims_.latent})
      throw std::invalid_argument("generator: checkpoint does not match dimensions");
  }

  const GenDims& dims() const { return dims_; }
  ModelParameters<T>& params() { return params_; }
  const ModelParameters<T>& params() const { return params_; }
  T leaky_slope() const { return slope_; }

  // z + Gaussian noise of standard deviation sigma, elementwise.
  static Tensor<T> perturb_input(const Tensor<T>& z, T sigma, Rng& rng) {
    Tensor<T> out = z;
    for (T& v : out.data) v += sigma * static_cast<T>(rng.normal());
    return out;
  }

  // Logits over (str_len x dict) for one latent vector.
  Tensor<T> forward(const Tensor<T>& z) const {
    Cache c;
    run_forward(z, c);
    if (!c.logits.finite()) throw instability_error("generator produced non-finite logits");
    return std::move(c.logits);
  }

  // Per position, draws a class from softmax(logits row).
  std::vector<std::size_t> sample_classes(const Tensor<T>& logits, Rng& rng) const {
    const std::size_t rows = logits.rows(), c = logits.cols();
    Tensor<T> probs = softmax_rows(logits);
    std::vector<std::size_t> classes(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      const double u = rng.uniform();
      double cum = 0;
      std::size_t pick = c - 1;
      for (std::size_t j = 0; j < c; ++j) {
        cum += static_cast<double>(probs(i, j));
        if (u < cum) {
          pick = j;
          break;
        }
      }
      classes[i] = pick;
    }
    return classes;
  }

  // Sampled string: padding classes dropped, class c>0 maps to byte c-1.
  std::string sample_string(const Tensor<T>& logits, Rng& rng) const {
    std::string s;
    for (std::size_t cls : sample_classes(logits, rng))
      if (cls > 0) s.push_back(static_cast<char>(cls - 1));
    return s;
  }

  // Diagnostic only; generation always samples.
  std::string argmax_decode(const Tensor<T>& logits) const {
    const std::size_t rows = logits.rows(), c = logits.cols();
    std::string s;
    for (std::size_t i = 0; i < rows; ++i) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < c; ++j)
        if (logits(i, j) > logits(i, best)) best = j;
      if (best > 0) s.push_back(static_cast<char>(best - 1));
    }
    return s;
  }

  struct LossParts {
    T total = 0, ce = 0, mse = 0;
  };

  // Cross-entropy of the output against the target string (padding class
  // beyond its end) plus mse_weight * mean squared error between z_true and
  // z_input. The MSE term carries no parameter gradient: the SUT between
  // the generated string and its true encoding is not differentiated.
  LossParts gnn_loss(const Tensor<T>& z_input, std::string_view target, const Tensor<T>& z_true,
                     T mse_weight) const {
    std::vector<Tensor<T>> zs{z_input}, zt{z_true};
    std::vector<std::string_view> targets{target};
    return loss_and_grads(zs, targets, zt, mse_weight, nullptr);
  }

  // Mean loss over a batch; accumulates parameter gradients when given.
  LossParts loss_and_grads(const std::vector<Tensor<T>>& z_inputs,
                           const std::vector<std::string_view>& targets,
                           const std::vector<Tensor<T>>& z_trues, T mse_weight,
                           std::vector<Tensor<T>>* grads) const {
    const std::size_t b = z_inputs.size();
    if (b == 0 || targets.size() != b || z_trues.size() != b)
      throw std::invalid_argument("gnn loss: batch size mismatch");
    const T inv_b = T(1) / static_cast<T>(b);
    LossParts parts;
    Tensor<T> dlogits({dims_.str_len, dims_.dict});
    for (std::size_t s = 0; s < b; ++s) {
      const std::vector<std::size_t> cls = target_classes(targets[s]);
      Cache c;
      run_forward(z_inputs[s], c);
      T ce = softmax_ce_rows(c.logits, [&](std::size_t r) { return cls[r]; },
                             grads ? &dlogits : nullptr);
      T mse = 0;
      if (z_trues[s].numel() != dims_.latent)
        throw std::invalid_argument("gnn loss: z_true length mismatch");
      for (std::size_t i = 0; i < dims_.latent; ++i) {
        const T d = z_trues[s](i) - z_inputs[s](i);
        mse += d * d;
      }
      mse /= static_cast<T>(dims_.latent);
      parts.ce += ce * inv_b;
      parts.mse += mse * inv_b;
      if (grads) {
        for (T& v : dlogits.data) v *= inv_b;
        run_backward(z_inputs[s], c, dlogits, *grads);
      }
    }
    parts.total = parts.ce + mse_weight * parts.mse;
    if (!std::isfinite(parts.total)) throw instability_error("gnn loss is not finite");
    return parts;
  }

  // One RMSProp step on (z -> string) pairs. z inputs are the records'
  // latents with fresh exploration noise, z_true the latents themselves.
  LossParts train_step(const std::vector<Tensor<T>>& latents,
                       const std::vector<std::string_view>& targets, T input_sigma, T mse_weight,
                       Rng& rng, T lr) {
    std::vector<Tensor<T>> noised;
    noised.reserve(latents.size());
    for (const auto& z : latents) noised.push_back(perturb_input(z, input_sigma, rng));
    std::vector<Tensor<T>> grads = params_.grad_buffer();
    LossParts parts = loss_and_grads(noised, targets, latents, mse_weight, &grads);
    rmsprop_step(params_, grads, lr);
    return parts;
  }

 private:
  struct BlockCache {
    Tensor<T> input;       // (len_in x F)
    Tensor<T> pre;         // post-crop pre-activation, (len_out x F)
    Tensor<T> act;         // leaky(pre)
    BatchNormCache<T> bn;  // valid when use_batch_norm
    std::size_t len_full = 0;
  };
  struct Cache {
    Tensor<T> up_pre, up_act;
    std::vector<BlockCache> blocks;
    Tensor<T> final_act;  // (str_len x F), input to the head
    Tensor<T> logits;     // (str_len x dict)
  };

  GenDims dims_;
  T slope_;
  ModelParameters<T> params_;
  std::size_t i_upw_, i_upb_, i_headw_, i_headb_;
  std::vector<std::size_t> i_blk_k_, i_blk_b_, i_blk_g_, i_blk_be_;

  void validate_dims() {
    std::size_t len = dims_.len0;
    for (int s : dims_.strides) {
      if (s != 1 && s != 2) throw std::invalid_argument("generator: stride must be 1 or 2");
      len *= static_cast<std::size_t>(s);
    }
    if (len != dims_.str_len)
      throw std::invalid_argument("generator: strides do not reach str_len");
    if (dims_.dict < 2) throw std::invalid_argument("generator: dict too small");
  }

  void cache_indices() {
    i_upw_ = params_.index_of("up.w");
    i_upb_ = params_.index_of("up.b");
    i_headw_ = params_.index_of("head.w");
    i_headb_ = params_.index_of("head.b");
    i_blk_k_.clear();
    i_blk_b_.clear();
    i_blk_g_.clear();
    i_blk_be_.clear();
    for (std::size_t bidx = 0; bidx < dims_.strides.size(); ++bidx) {
      const std::string base = "blk" + std::to_string(bidx);
      i_blk_k_.push_back(params_.index_of(base + ".k"));
      i_blk_b_.push_back(params_.index_of(base + ".b"));
      if (dims_.use_batch_norm) {
        i_blk_g_.push_back(params_.index_of(base + ".g"));
        i_blk_be_.push_back(params_.index_of(base + ".be"));
      }
    }
  }

  std::vector<std::size_t> target_classes(std::string_view target) const {
    if (target.size() > dims_.str_len)
      throw std::invalid_argument("gnn loss: target string longer than str_len");
    std::vector<std::size_t> cls(dims_.str_len, 0);
    for (std::size_t i = 0; i < target.size(); ++i) {
      const unsigned char byte = static_cast<unsigned char>(target[i]);
      if (byte >= dims_.dict - 1)
        throw std::invalid_argument("gnn loss: byte outside the dictionary");
      cls[i] = byte + 1;
    }
    return cls;
  }

  void run_forward(const Tensor<T>& z, Cache& c) const {
    if (z.numel() != dims_.latent)
      throw std::invalid_argument("generator: latent length mismatch");
    const std::size_t f = dims_.filters;
    Tensor<T> zr({1, dims_.latent});
    zr.data = z.data;
    c.up_pre = dense_forward(zr, params_.value(i_upw_), params_.value(i_upb_));
    c.up_act = leaky_relu(c.up_pre, slope_);

    Tensor<T> x({dims_.len0, f});
    x.data = c.up_act.data;
    c.blocks.resize(dims_.strides.size());
    for (std::size_t bidx = 0; bidx < dims_.strides.size(); ++bidx) {
      BlockCache& bc = c.blocks[bidx];
      const int stride = dims_.strides[bidx];
      const std::size_t len_in = x.rows();
      const std::size_t len_out = len_in * static_cast<std::size_t>(stride);
      bc.input = std::move(x);
      Tensor<T> full =
          deconv1d_forward(bc.input, params_.value(i_blk_k_[bidx]), stride);
      bc.len_full = full.rows();
      bc.pre = center_crop_rows(full, len_out);
      as_matrix(bc.pre, len_out, f).rowwise() +=
          as_vector(params_.value(i_blk_b_[bidx])).transpose();
      if (stride == 1)  // residual shortcut
        as_matrix(bc.pre, len_out, f) += as_matrix(bc.input, len_in, f);
      bc.act = leaky_relu(bc.pre, slope_);
      if (dims_.use_batch_norm) {
        x = batch_norm_forward(bc.act, params_.value(i_blk_g_[bidx]),
                               params_.value(i_blk_be_[bidx]), &bc.bn);
      } else {
        x = bc.act;
      }
    }
    c.final_act = std::move(x);
    c.logits = dense_forward(c.final_act, params_.value(i_headw_), params_.value(i_headb_));
  }

  void run_backward(const Tensor<T>& z, const Cache& c, const Tensor<T>& dlogits,
                    std::vector<Tensor<T>>& grads) const {
    const std::size_t f = dims_.filters;
    auto g_head = dense_backward(c.final_act, params_.value(i_headw_), dlogits);
    accumulate(grads[i_headw_], g_head.dw);
    accumulate(grads[i_headb_], g_head.db);

    Tensor<T> d = std::move(g_head.dx);
    for (std::size_t idx = dims_.strides.size(); idx-- > 0;) {
      const BlockCache& bc = c.blocks[idx];
      const int stride = dims_.strides[idx];
      if (dims_.use_batch_norm) {
        auto g_bn = batch_norm_backward(params_.value(i_blk_g_[idx]), bc.bn, d);
        accumulate(grads[i_blk_g_[idx]], g_bn.dgamma);
        accumulate(grads[i_blk_be_[idx]], g_bn.dbeta);
        d = std::move(g_bn.dx);
      }
      Tensor<T> d_pre = leaky_relu_backward(bc.pre, d, slope_);
      Tensor<T>& db = grads[i_blk_b_[idx]];
      as_vector(db) += as_matrix(d_pre, d_pre.rows(), f).colwise().sum().transpose();
      Tensor<T> d_full = center_crop_rows_backward(d_pre, bc.len_full);
      auto g_dc = deconv1d_backward(bc.input, params_.value(i_blk_k_[idx]), stride, d_full);
      accumulate(grads[i_blk_k_[idx]], g_dc.dkernels);
      d = std::move(g_dc.dinput);
      if (stride == 1) accumulate(d, d_pre);  // shortcut path
    }

    Tensor<T> d_up_act({1, dims_.len0 * f});
    d_up_act.data = d.data;
    Tensor<T> d_up_pre = leaky_relu_backward(c.up_pre, d_up_act, slope_);
    Tensor<T> zr({1, dims_.latent});
    zr.data = z.data;
    auto g_up = dense_backward(zr, params_.value(i_upw_), d_up_pre);
    accumulate(grads[i_upw_], g_up.dw);
    accumulate(grads[i_upb_], g_up.db);
  }

  static void accumulate(Tensor<T>& into, const Tensor<T>& from) {
    for (std::size_t i = 0; i < into.numel(); ++i) into.data[i] += from.data[i];
  }
};

}  // namespace gnast
