#include "subseg/attn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "subseg/error.hpp"
#include "subseg/rng.hpp"

namespace subseg::attn {

namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

std::string shape(const Vector& v) {
  return std::to_string(v.size());
}

template <typename A, typename B>
void require_rows(const A& a, const B& b, const char* what) {
  if (a.rows() != b.rows())
    throw Error(ErrorCode::dimension, std::string(what) + ": " + shape(a) + " vs " + shape(b));
}

void require_size(const Vector& v, Eigen::Index size, const char* what) {
  if (v.size() != size)
    throw Error(ErrorCode::dimension,
                std::string(what) + ": expected " + std::to_string(size) + ", got " + shape(v));
}

Vector sigmoid(const Vector& x) {
  return (1.0 + (-x.array()).exp()).inverse().matrix();
}

Vector log_softmax(const Vector& logits) {
  const double max = logits.maxCoeff();
  const double log_sum = std::log((logits.array() - max).exp().sum());
  return (logits.array() - max - log_sum).matrix();
}

Vector output_logits(const Model& model, const Vector& z) {
  return model.W_out * z + model.b_out;
}

void validate_model(const Model& model) {
  model.encoder_forward.validate();
  model.encoder_backward.validate();
  model.decoder.validate();
  model.attention.validate();
  const auto enc = static_cast<Eigen::Index>(model.encoder_forward.state_dim());
  if (model.encoder_backward.state_dim() != model.encoder_forward.state_dim())
    throw Error(ErrorCode::dimension, "encoder directions differ in state size");
  if (model.attention.U.cols() != 2 * enc)
    throw Error(ErrorCode::dimension,
                "attention U " + shape(model.attention.U) + " vs annotation size " + std::to_string(2 * enc));
  if (model.attention.W.cols() != static_cast<Eigen::Index>(model.decoder.state_dim()))
    throw Error(ErrorCode::dimension,
                "attention W " + shape(model.attention.W) + " vs decoder state " +
                std::to_string(model.decoder.state_dim()));
  if (model.decoder.input_dim() != model.target_embedding.dim() + 2 * model.encoder_forward.state_dim())
    throw Error(ErrorCode::dimension, "decoder input " + shape(model.decoder.W_r) +
                                          " vs embedding+context " +
                                          std::to_string(model.target_embedding.dim() + 2 * enc));
  if (model.W_out.cols() != static_cast<Eigen::Index>(model.decoder.state_dim()) ||
      model.W_out.rows() != static_cast<Eigen::Index>(model.target_embedding.vocab_size()))
    throw Error(ErrorCode::dimension, "output projection " + shape(model.W_out));
  require_size(model.b_out, model.W_out.rows(), "output bias");
}

}  // namespace

Vector EmbeddingTable::lookup(std::size_t index) const {
  if (index >= vocab_size())
    throw Error(ErrorCode::vocabulary,
                "index " + std::to_string(index) + " out of range for vocabulary of " +
                std::to_string(vocab_size()));
  return rows.row(static_cast<Eigen::Index>(index)).transpose();
}

GruParams GruParams::zeros(std::size_t input_dim, std::size_t state_dim) {
  const auto in = static_cast<Eigen::Index>(input_dim);
  const auto st = static_cast<Eigen::Index>(state_dim);
  return {Matrix::Zero(st, in), Matrix::Zero(st, st), Vector::Zero(st),
          Matrix::Zero(st, in), Matrix::Zero(st, st), Vector::Zero(st),
          Matrix::Zero(st, in), Matrix::Zero(st, st), Vector::Zero(st)};
}

void GruParams::validate() const {
  const auto in = W_r.cols();
  const auto st = W_r.rows();
  for (const Matrix* m : {&W_u, &W_h}) {
    if (m->rows() != st || m->cols() != in)
      throw Error(ErrorCode::dimension, "gate input weights " + shape(*m) + " vs " + shape(W_r));
  }
  for (const Matrix* m : {&U_r, &U_u, &U_h}) {
    if (m->rows() != st || m->cols() != st)
      throw Error(ErrorCode::dimension,
                  "recurrent weights " + shape(*m) + " vs state " + std::to_string(st));
  }
  for (const Vector* b : {&b_r, &b_u, &b_h})
    require_size(*b, st, "gate bias");
}

void AttnParams::validate() const {
  require_size(v, W.rows(), "attention v vs W rows");
  require_rows(W, U, "attention W vs U");
}

Vector gru_step(const GruParams& cell, const Vector& input, const Vector& state) {
  require_size(input, cell.W_r.cols(), "cell input");
  require_size(state, cell.W_r.rows(), "cell state");
  const Vector reset = sigmoid(cell.W_r * input + cell.U_r * state + cell.b_r);
  const Vector update = sigmoid(cell.W_u * input + cell.U_u * state + cell.b_u);
  const Vector candidate =
      (cell.W_h * input + cell.U_h * reset.cwiseProduct(state) + cell.b_h).array().tanh().matrix();
  return (update.array() * state.array() + (1.0 - update.array()) * candidate.array()).matrix();
}

std::vector<Vector> encode(std::span<const std::size_t> source_ids,
                           const EmbeddingTable& embedding,
                           const GruParams& forward,
                           const GruParams& backward) {
  forward.validate();
  backward.validate();
  if (source_ids.empty())
    throw Error(ErrorCode::invalid_argument, "source sentence is empty");
  const std::size_t n = source_ids.size();
  std::vector<Vector> inputs;
  inputs.reserve(n);
  for (const auto id : source_ids)
    inputs.push_back(embedding.lookup(id));

  std::vector<Vector> fwd(n), bwd(n);
  Vector state = Vector::Zero(static_cast<Eigen::Index>(forward.state_dim()));
  for (std::size_t i = 0; i < n; ++i)
    fwd[i] = state = gru_step(forward, inputs[i], state);
  state = Vector::Zero(static_cast<Eigen::Index>(backward.state_dim()));
  for (std::size_t i = n; i-- > 0;)
    bwd[i] = state = gru_step(backward, inputs[i], state);

  std::vector<Vector> annotations(n);
  for (std::size_t i = 0; i < n; ++i) {
    annotations[i].resize(fwd[i].size() + bwd[i].size());
    annotations[i] << fwd[i], bwd[i];
  }
  return annotations;
}

Vector softmax(const Vector& scores) {
  const Vector shifted = (scores.array() - scores.maxCoeff()).exp().matrix();
  return shifted / shifted.sum();
}

Attention attend(const Vector& z_prev, std::span<const Vector> annotations, const AttnParams& params) {
  params.validate();
  if (annotations.empty())
    throw Error(ErrorCode::invalid_argument, "no annotations to attend over");
  require_size(z_prev, params.W.cols(), "decoder state vs attention W");
  const Vector projected_state = params.W * z_prev;
  Attention out;
  out.scores.resize(static_cast<Eigen::Index>(annotations.size()));
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    require_size(annotations[i], params.U.cols(), "annotation vs attention U");
    const Vector hidden = (projected_state + params.U * annotations[i]).array().tanh().matrix();
    out.scores[static_cast<Eigen::Index>(i)] = params.v.dot(hidden);
  }
  out.weights = softmax(out.scores);
  out.context = Vector::Zero(annotations.front().size());
  for (std::size_t i = 0; i < annotations.size(); ++i)
    out.context += out.weights[static_cast<Eigen::Index>(i)] * annotations[i];
  return out;
}

Vector decode_step(const DecoderState& state, const Vector& context, const GruParams& cell) {
  cell.validate();
  if (static_cast<std::size_t>(state.t_prev.size() + context.size()) != cell.input_dim())
    throw Error(ErrorCode::dimension,
                "decoder input " + std::to_string(state.t_prev.size()) + "+" +
                std::to_string(context.size()) + " vs cell input " + std::to_string(cell.input_dim()));
  Vector input(state.t_prev.size() + context.size());
  input << state.t_prev, context;
  return gru_step(cell, input, state.z);
}

std::vector<Vector> step_distributions(const Model& model,
                                       std::span<const std::size_t> source_ids,
                                       std::span<const std::size_t> target_ids) {
  validate_model(model);
  if (target_ids.empty())
    throw Error(ErrorCode::invalid_argument, "target sentence is empty");
  const auto annotations =
      encode(source_ids, model.source_embedding, model.encoder_forward, model.encoder_backward);
  DecoderState state{Vector::Zero(static_cast<Eigen::Index>(model.decoder.state_dim())),
                     Vector::Zero(static_cast<Eigen::Index>(model.target_embedding.dim()))};
  std::vector<Vector> out;
  out.reserve(target_ids.size());
  for (const auto y : target_ids) {
    const auto attention = attend(state.z, annotations, model.attention);
    state.z = decode_step(state, attention.context, model.decoder);
    out.push_back(softmax(output_logits(model, state.z)));
    state.t_prev = model.target_embedding.lookup(y);
  }
  return out;
}

double sentence_log_likelihood(const Model& model,
                               std::span<const std::size_t> source_ids,
                               std::span<const std::size_t> target_ids) {
  validate_model(model);
  if (target_ids.empty())
    throw Error(ErrorCode::invalid_argument, "target sentence is empty");
  const auto annotations =
      encode(source_ids, model.source_embedding, model.encoder_forward, model.encoder_backward);
  DecoderState state{Vector::Zero(static_cast<Eigen::Index>(model.decoder.state_dim())),
                     Vector::Zero(static_cast<Eigen::Index>(model.target_embedding.dim()))};
  double total = 0.0;
  for (const auto y : target_ids) {
    if (y >= model.target_embedding.vocab_size())
      throw Error(ErrorCode::vocabulary, "target index " + std::to_string(y) + " out of range");
    const auto attention = attend(state.z, annotations, model.attention);
    state.z = decode_step(state, attention.context, model.decoder);
    total += log_softmax(output_logits(model, state.z))[static_cast<Eigen::Index>(y)];
    state.t_prev = model.target_embedding.lookup(y);
  }
  return total;
}

double corpus_objective(const Model& model, std::span<const std::pair<IdSequence, IdSequence>> pairs) {
  if (pairs.empty())
    throw Error(ErrorCode::invalid_argument, "objective over an empty corpus");
  double sum = 0.0;
  for (const auto& [source, target] : pairs)
    sum += sentence_log_likelihood(model, source, target);
  return sum / static_cast<double>(pairs.size());
}

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = -0.1 + 0.2 * rng.unit();
  }
  return m;
}

Vector random_vector(Rng& rng, std::size_t size) {
  Vector v(static_cast<Eigen::Index>(size));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v[i] = -0.1 + 0.2 * rng.unit();
  return v;
}

GruParams random_gru(Rng& rng, std::size_t input_dim, std::size_t state_dim) {
  GruParams p;
  p.W_r = random_matrix(rng, state_dim, input_dim);
  p.U_r = random_matrix(rng, state_dim, state_dim);
  p.b_r = random_vector(rng, state_dim);
  p.W_u = random_matrix(rng, state_dim, input_dim);
  p.U_u = random_matrix(rng, state_dim, state_dim);
  p.b_u = random_vector(rng, state_dim);
  p.W_h = random_matrix(rng, state_dim, input_dim);
  p.U_h = random_matrix(rng, state_dim, state_dim);
  p.b_h = random_vector(rng, state_dim);
  return p;
}

AttnParams random_attention(Rng& rng, std::size_t attention_dim, std::size_t decoder_dim,
                            std::size_t annotation_dim) {
  AttnParams p;
  p.v = random_vector(rng, attention_dim);
  p.W = random_matrix(rng, attention_dim, decoder_dim);
  p.U = random_matrix(rng, attention_dim, annotation_dim);
  return p;
}

Model random_model(Rng& rng, const ModelShape& s) {
  Model m;
  m.source_embedding.rows = random_matrix(rng, s.source_vocab, s.embedding_dim);
  m.encoder_forward = random_gru(rng, s.embedding_dim, s.encoder_dim);
  m.encoder_backward = random_gru(rng, s.embedding_dim, s.encoder_dim);
  m.target_embedding.rows = random_matrix(rng, s.target_vocab, s.embedding_dim);
  m.attention = random_attention(rng, s.attention_dim, s.decoder_dim, 2 * s.encoder_dim);
  m.decoder = random_gru(rng, s.embedding_dim + 2 * s.encoder_dim, s.decoder_dim);
  m.W_out = random_matrix(rng, s.target_vocab, s.decoder_dim);
  m.b_out = random_vector(rng, s.target_vocab);
  return m;
}

double grad_check(const ScalarFn& fn,
                  std::span<const double> params,
                  std::span<const double> analytic,
                  double epsilon) {
  if (params.size() != analytic.size())
    throw Error(ErrorCode::dimension, "gradient has " + std::to_string(analytic.size()) +
                                          " entries for " + std::to_string(params.size()) + " parameters");
  if (!(epsilon > 0.0))
    throw Error(ErrorCode::invalid_argument, "epsilon must be positive");
  std::vector<double> probe(params.begin(), params.end());
  const auto evaluate = [&] {
    const double value = fn(probe);
    if (!std::isfinite(value))
      throw Error(ErrorCode::numeric, "function value is not finite");
    return value;
  };
  evaluate();
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + epsilon;
    const double plus = evaluate();
    probe[i] = saved - epsilon;
    const double minus = evaluate();
    probe[i] = saved;
    const double numeric = (plus - minus) / (2.0 * epsilon);
    const double scale = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-8});
    worst = std::max(worst, std::abs(numeric - analytic[i]) / scale);
  }
  return worst;
}

std::vector<double> flatten(const AttnParams& params) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(params.v.size() + params.W.size() + params.U.size()));
  flat.insert(flat.end(), params.v.data(), params.v.data() + params.v.size());
  for (Eigen::Index r = 0; r < params.W.rows(); ++r) {
    for (Eigen::Index c = 0; c < params.W.cols(); ++c)
      flat.push_back(params.W(r, c));
  }
  for (Eigen::Index r = 0; r < params.U.rows(); ++r) {
    for (Eigen::Index c = 0; c < params.U.cols(); ++c)
      flat.push_back(params.U(r, c));
  }
  return flat;
}

AttnParams unflatten(std::span<const double> flat, std::size_t attention_dim,
                     std::size_t decoder_dim, std::size_t annotation_dim) {
  const std::size_t expected = attention_dim * (1 + decoder_dim + annotation_dim);
  if (flat.size() != expected)
    throw Error(ErrorCode::dimension, "flat attention parameters: expected " + std::to_string(expected) +
                                          ", got " + std::to_string(flat.size()));
  const auto a = static_cast<Eigen::Index>(attention_dim);
  const auto dz = static_cast<Eigen::Index>(decoder_dim);
  const auto dh = static_cast<Eigen::Index>(annotation_dim);
  AttnParams p{Vector(a), Matrix(a, dz), Matrix(a, dh)};
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < a; ++i)
    p.v[i] = flat[k++];
  for (Eigen::Index r = 0; r < a; ++r) {
    for (Eigen::Index c = 0; c < dz; ++c)
      p.W(r, c) = flat[k++];
  }
  for (Eigen::Index r = 0; r < a; ++r) {
    for (Eigen::Index c = 0; c < dh; ++c)
      p.U(r, c) = flat[k++];
  }
  return p;
}

ScoreProbe conditioned_probe(Rng& rng, std::size_t n, std::size_t decoder_dim, std::size_t annotation_dim) {
  const auto signed_magnitude = [&](double sign) { return sign * (0.5 + 0.5 * rng.unit()); };
  const auto random_sign = [&] { return rng.below(2) == 0 ? -1.0 : 1.0; };
  ScoreProbe probe;
  probe.z_prev.resize(static_cast<Eigen::Index>(decoder_dim));
  for (auto& z : probe.z_prev)
    z = signed_magnitude(random_sign());
  std::vector<double> signs(annotation_dim);
  for (auto& s : signs)
    s = random_sign();
  for (std::size_t i = 0; i < n; ++i) {
    Vector h(static_cast<Eigen::Index>(annotation_dim));
    for (std::size_t c = 0; c < annotation_dim; ++c)
      h[static_cast<Eigen::Index>(c)] = signed_magnitude(signs[c]);
    probe.annotations.push_back(std::move(h));
  }
  probe.score_weights.resize(static_cast<Eigen::Index>(n));
  for (auto& w : probe.score_weights)
    w = 0.5 + rng.unit();
  // |d . (h_i - c)| <= 2 |d|_1 < 0.5 keeps d score_i = w_i + alpha_i d . (h_i - c) positive
  const double scale = 0.2 / static_cast<double>(std::max<std::size_t>(annotation_dim, 1));
  probe.direction = random_vector(rng, annotation_dim) * (scale / 0.1);
  return probe;
}

double score_path_objective(const AttnParams& params, const ScoreProbe& probe) {
  const auto attention = attend(probe.z_prev, probe.annotations, params);
  require_size(probe.score_weights, attention.scores.size(), "score weights");
  require_size(probe.direction, attention.context.size(), "projection direction");
  return probe.score_weights.dot(attention.scores) + probe.direction.dot(attention.context);
}

std::vector<double> score_path_gradient(const AttnParams& params, const ScoreProbe& probe) {
  const auto attention = attend(probe.z_prev, probe.annotations, params);
  require_size(probe.score_weights, attention.scores.size(), "score weights");
  require_size(probe.direction, attention.context.size(), "projection direction");
  const double projection = probe.direction.dot(attention.context);
  const Vector projected_state = params.W * probe.z_prev;

  AttnParams grad{Vector::Zero(params.v.size()), Matrix::Zero(params.W.rows(), params.W.cols()),
                  Matrix::Zero(params.U.rows(), params.U.cols())};
  for (std::size_t i = 0; i < probe.annotations.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const Vector& h = probe.annotations[i];
    // d/d score_i: the linear term plus softmax feedback alpha_i (d . h_i - d . c)
    const double d_score =
        probe.score_weights[idx] + attention.weights[idx] * (probe.direction.dot(h) - projection);
    const Vector hidden = (projected_state + params.U * h).array().tanh().matrix();
    grad.v += d_score * hidden;
    const Vector d_pre = d_score * (params.v.array() * (1.0 - hidden.array().square())).matrix();
    grad.W += d_pre * probe.z_prev.transpose();
    grad.U += d_pre * h.transpose();
  }
  return flatten(grad);
}

std::vector<CheckResult> run_invariant_suite(std::uint64_t seed, std::size_t n, std::size_t dim) {
  if (n == 0 || dim == 0)
    throw Error(ErrorCode::invalid_argument, "n and dim must be positive");
  Rng rng(seed);
  ModelShape shape{5, 5, dim, dim, dim, dim};
  const Model model = random_model(rng, shape);
  std::vector<std::size_t> source(n), target(3);
  for (auto& id : source)
    id = static_cast<std::size_t>(rng.below(shape.source_vocab));
  for (auto& id : target)
    id = static_cast<std::size_t>(rng.below(shape.target_vocab));
  const Vector z_prev = random_vector(rng, dim) * 10.0;

  std::vector<CheckResult> checks;
  const auto add = [&](std::string name, double value, bool passed) {
    checks.push_back({std::move(name), passed, value});
  };

  const auto annotations =
      encode(source, model.source_embedding, model.encoder_forward, model.encoder_backward);
  const auto attention = attend(z_prev, annotations, model.attention);

  double weight_range = 0.0;
  for (Eigen::Index i = 0; i < attention.weights.size(); ++i) {
    const double w = attention.weights[i];
    weight_range = std::max({weight_range, -w, w - 1.0});
  }
  const double sum_dev = std::abs(attention.weights.sum() - 1.0);
  add("attention_sum", sum_dev, sum_dev <= 1e-9 && weight_range <= 0.0);

  double envelope = 0.0;
  for (Eigen::Index c = 0; c < attention.context.size(); ++c) {
    double lo = annotations[0][c];
    double hi = lo;
    for (const auto& h : annotations) {
      lo = std::min(lo, h[c]);
      hi = std::max(hi, h[c]);
    }
    envelope = std::max({envelope, lo - attention.context[c], attention.context[c] - hi});
  }
  add("context_envelope", std::max(envelope, 0.0), envelope <= 1e-9);

  const Vector shifted = softmax((attention.scores.array() + 3.75).matrix());
  const double shift_dev = (shifted - attention.weights).cwiseAbs().maxCoeff();
  add("softmax_shift_invariance", shift_dev, shift_dev < 1e-9);

  // Shared direction parameters: reversing the input swaps the halves.
  std::vector<std::size_t> reversed(source.rbegin(), source.rend());
  const auto shared = encode(source, model.source_embedding, model.encoder_forward, model.encoder_forward);
  const auto mirrored = encode(reversed, model.source_embedding, model.encoder_forward, model.encoder_forward);
  double mirror_dev = 0.0;
  const auto half = static_cast<Eigen::Index>(dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = mirrored[i];
    const auto& b = shared[n - 1 - i];
    mirror_dev = std::max(mirror_dev, (a.head(half) - b.tail(half)).cwiseAbs().maxCoeff());
    mirror_dev = std::max(mirror_dev, (a.tail(half) - b.head(half)).cwiseAbs().maxCoeff());
  }
  add("encoder_reversal_symmetry", mirror_dev, mirror_dev <= 1e-12);

  const DecoderState state{random_vector(rng, dim), model.target_embedding.lookup(target[0])};
  const Vector next = decode_step(state, attention.context, model.decoder);
  const double bound = next.cwiseAbs().maxCoeff();
  add("decoder_state_bounded", bound, bound < 1.0);

  const double log_likelihood = sentence_log_likelihood(model, source, target);
  add("log_likelihood_nonpositive", log_likelihood, log_likelihood <= 0.0);

  double normalization = 0.0;
  for (const auto& p : step_distributions(model, source, target))
    normalization = std::max(normalization, std::abs(p.sum() - 1.0));
  add("step_normalization", normalization, normalization <= 1e-9);

  const ScoreProbe probe = conditioned_probe(rng, n, dim, 2 * dim);
  const auto params = flatten(model.attention);
  const auto analytic = score_path_gradient(model.attention, probe);
  const ScalarFn fn = [&](std::span<const double> flat) {
    return score_path_objective(unflatten(flat, dim, dim, 2 * dim), probe);
  };
  const double error = grad_check(fn, params, analytic, 1e-5);
  add("grad_check_score_path", error, error < 1e-4);
  // Convergence order is measured where truncation error dominates rounding.
  const double coarse = grad_check(fn, params, analytic, 1e-3);
  const double halved = grad_check(fn, params, analytic, 0.5e-3);
  add("grad_check_halved_epsilon", halved / coarse, halved <= 4.0 * coarse);

  return checks;
}

}  // namespace subseg::attn
