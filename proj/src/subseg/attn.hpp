#pragma once

// Forward pass of a bidirectional-GRU encoder with an additive alignment model
// and a GRU decoder, evaluated in double precision. No training.
//
// Gated recurrent cell, input x, previous state h:
//
//     r  = sigmoid(W_r x + U_r h + b_r)        reset gate
//     u  = sigmoid(W_u x + U_u h + b_u)        update gate
//     h~ = tanh(W_h x + U_h (r * h) + b_h)     candidate
//     h' = u * h + (1 - u) * h~
//
// Alignment model over annotations h_i given decoder state z:
//
//     score_i = v . tanh(W z + U h_i)
//     alpha   = softmax(score)
//     context = sum_i alpha_i h_i
//
// Encoder and decoder states start at zero. The decoder input at step j is
// [t_{j-1} ; c_j] where t_0 is the zero vector, and the output distribution is
// softmax(W_out z_j + b_out).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace subseg {
class Rng;
}

namespace subseg::attn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct EmbeddingTable {
  Matrix rows;  // vocab_size x dim

  std::size_t vocab_size() const { return static_cast<std::size_t>(rows.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(rows.cols()); }

  /// Throws Error(vocabulary) for an out-of-range index.
  Vector lookup(std::size_t index) const;
};

struct GruParams {
  Matrix W_r, U_r;
  Vector b_r;
  Matrix W_u, U_u;
  Vector b_u;
  Matrix W_h, U_h;
  Vector b_h;

  static GruParams zeros(std::size_t input_dim, std::size_t state_dim);

  std::size_t input_dim() const { return static_cast<std::size_t>(W_r.cols()); }
  std::size_t state_dim() const { return static_cast<std::size_t>(W_r.rows()); }

  /// Throws Error(dimension) on inconsistent shapes.
  void validate() const;
};

struct AttnParams {
  Vector v;  // a
  Matrix W;  // a x d_z
  Matrix U;  // a x d_h, d_h = 2 x encoder state dim

  void validate() const;
};

struct DecoderState {
  Vector z;
  Vector t_prev;
};

struct Model {
  EmbeddingTable source_embedding;
  GruParams encoder_forward;
  GruParams encoder_backward;
  EmbeddingTable target_embedding;
  AttnParams attention;
  GruParams decoder;
  Matrix W_out;  // target vocab x d_z
  Vector b_out;
};

struct ModelShape {
  std::size_t source_vocab = 5;
  std::size_t target_vocab = 5;
  std::size_t embedding_dim = 4;
  std::size_t encoder_dim = 4;
  std::size_t decoder_dim = 4;
  std::size_t attention_dim = 4;
};

Vector gru_step(const GruParams& cell, const Vector& input, const Vector& state);

/// Annotation h_i = [forward_i ; backward_i] for every source position.
std::vector<Vector> encode(std::span<const std::size_t> source_ids,
                           const EmbeddingTable& embedding,
                           const GruParams& forward,
                           const GruParams& backward);

Vector softmax(const Vector& scores);

struct Attention {
  Vector scores;
  Vector weights;
  Vector context;
};

Attention attend(const Vector& z_prev, std::span<const Vector> annotations, const AttnParams& params);

/// One decoder step with input [t_prev ; context] and previous state z.
Vector decode_step(const DecoderState& state, const Vector& context, const GruParams& cell);

/// Per-step output distributions under teacher forcing.
std::vector<Vector> step_distributions(const Model& model,
                                       std::span<const std::size_t> source_ids,
                                       std::span<const std::size_t> target_ids);

/// Sum over target positions of log p(y_j | y_<j, x) under teacher forcing.
double sentence_log_likelihood(const Model& model,
                               std::span<const std::size_t> source_ids,
                               std::span<const std::size_t> target_ids);

using IdSequence = std::vector<std::size_t>;

/// Mean sentence log-likelihood over the pairs.
double corpus_objective(const Model& model, std::span<const std::pair<IdSequence, IdSequence>> pairs);

/// Uniform values in [-0.1, 0.1]: -0.1 + 0.2 * rng.unit(), filled row-major.
Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols);
Vector random_vector(Rng& rng, std::size_t size);
GruParams random_gru(Rng& rng, std::size_t input_dim, std::size_t state_dim);
AttnParams random_attention(Rng& rng, std::size_t attention_dim, std::size_t decoder_dim, std::size_t annotation_dim);

/// Fill order: source embedding, forward encoder, backward encoder, target
/// embedding, attention (v, W, U), decoder, W_out, b_out. Each GRU is filled
/// W_r, U_r, b_r, W_u, U_u, b_u, W_h, U_h, b_h.
Model random_model(Rng& rng, const ModelShape& shape);

using ScalarFn = std::function<double(std::span<const double>)>;

/// Central differences against an analytic gradient. Returns the maximum over
/// parameters of |g_num - g_an| / max(|g_num|, |g_an|, 1e-8). Throws
/// Error(numeric) if the function is not finite.
double grad_check(const ScalarFn& fn,
                  std::span<const double> params,
                  std::span<const double> analytic,
                  double epsilon = 1e-5);

/// Flattened [v ; W row-major ; U row-major].
std::vector<double> flatten(const AttnParams& params);
AttnParams unflatten(std::span<const double> flat, std::size_t attention_dim,
                     std::size_t decoder_dim, std::size_t annotation_dim);

/// Fixed inputs for a scalar probe of the alignment model.
struct ScoreProbe {
  Vector z_prev;
  std::vector<Vector> annotations;
  Vector score_weights;  // one per annotation
  Vector direction;      // annotation-sized
};

/// Probe inputs kept away from zero so every gradient entry is large enough
/// for central differences to resolve: z and annotation entries have
/// magnitude in [0.5, 1] with one sign per annotation component, score
/// weights lie in [0.5, 1.5] and the direction is small enough that each
/// d score_i stays positive.
ScoreProbe conditioned_probe(Rng& rng, std::size_t n, std::size_t decoder_dim, std::size_t annotation_dim);

/// score_weights . scores + direction . context
double score_path_objective(const AttnParams& params, const ScoreProbe& probe);

/// Analytic gradient of score_path_objective with respect to (v, W, U),
/// flattened in the same order as flatten().
std::vector<double> score_path_gradient(const AttnParams& params, const ScoreProbe& probe);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;  // max deviation or error measured
};

/// Seeded invariant suite over one instance of source length n with every
/// dimension equal to dim.
std::vector<CheckResult> run_invariant_suite(std::uint64_t seed, std::size_t n, std::size_t dim);

}  // namespace subseg::attn
