#include "aeris/learning.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace aeris {

namespace {

constexpr int kCheckpointSchemaVersion = 1;

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(
      v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  Eigen::VectorXd shifted = logits.array() - logits.maxCoeff();
  Eigen::VectorXd e = shifted.array().exp();
  return e / e.sum();
}

}  // namespace

Mlp::Mlp(std::vector<int> layer_dims) : dims_(std::move(layer_dims)) {
  if (dims_.size() < 2)
    throw ConfigError("Mlp: need at least an input and an output layer");
  for (int d : dims_)
    if (d <= 0) throw ConfigError("Mlp: layer sizes must be positive");
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    weights_.emplace_back(Eigen::MatrixXd::Zero(dims_[l + 1], dims_[l]));
    biases_.emplace_back(Eigen::VectorXd::Zero(dims_[l + 1]));
  }
}

Mlp Mlp::he_init(std::vector<int> layer_dims, Rng& rng) {
  Mlp net(std::move(layer_dims));
  for (std::size_t l = 0; l < net.weights_.size(); ++l) {
    auto& w = net.weights_[l];
    double limit = std::sqrt(6.0 / static_cast<double>(w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        w(r, c) = rng.uniform(-limit, limit);
  }
  return net;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& input) const {
  if (input.size() != dims_.front())
    throw ContractError("Mlp::forward: input has " +
                        std::to_string(input.size()) + " entries, expected " +
                        std::to_string(dims_.front()));
  Eigen::VectorXd a = input;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    a = weights_[l] * a + biases_[l];
    if (l + 1 < weights_.size()) a = a.cwiseMax(0.0);
  }
  return a;
}

void Mlp::accumulate_gradient(const Eigen::VectorXd& input,
                              const Eigen::VectorXd& dloss_doutput,
                              Eigen::VectorXd& grad) const {
  if (grad.size() != static_cast<Eigen::Index>(parameter_count()))
    throw ContractError("accumulate_gradient: gradient buffer size mismatch");

  std::vector<Eigen::VectorXd> acts;  // activation entering each layer
  acts.reserve(weights_.size() + 1);
  acts.push_back(input);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::VectorXd z = weights_[l] * acts.back() + biases_[l];
    if (l + 1 < weights_.size()) z = z.cwiseMax(0.0);
    acts.push_back(std::move(z));
  }

  // Parameter offsets of each layer inside the flat vector.
  std::vector<std::size_t> offsets(weights_.size());
  std::size_t off = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    offsets[l] = off;
    off += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
  }

  Eigen::VectorXd delta = dloss_doutput;
  for (std::size_t l = weights_.size(); l-- > 0;) {
    const auto& w = weights_[l];
    const auto& a_in = acts[l];
    double* base = grad.data() + offsets[l];
    // Row-major weight block, then the bias block.
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        base[static_cast<std::size_t>(r * w.cols() + c)] += delta(r) * a_in(c);
    double* bias_base = base + w.size();
    for (Eigen::Index r = 0; r < delta.size(); ++r) bias_base[r] += delta(r);
    if (l > 0) {
      Eigen::VectorXd back = w.transpose() * delta;
      // Rectifier derivative from the stored post-activation (0 at the kink).
      delta = back.array() * (acts[l].array() > 0.0).cast<double>();
    }
  }
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l)
    n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
  return n;
}

Eigen::VectorXd Mlp::flat_params() const {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const auto& w = weights_[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat(k++) = w(r, c);
    for (Eigen::Index r = 0; r < biases_[l].size(); ++r)
      flat(k++) = biases_[l](r);
  }
  return flat;
}

void Mlp::set_flat_params(const Eigen::VectorXd& flat) {
  if (flat.size() != static_cast<Eigen::Index>(parameter_count()))
    throw ContractError("set_flat_params: expected " +
                        std::to_string(parameter_count()) + " values, got " +
                        std::to_string(flat.size()));
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    auto& w = weights_[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = flat(k++);
    for (Eigen::Index r = 0; r < biases_[l].size(); ++r)
      biases_[l](r) = flat(k++);
  }
}

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("ReplayMemory: capacity must be > 0");
  buffer_.reserve(std::min<std::size_t>(capacity_, 4096));
}

void ReplayMemory::push(MdpTransition t) {
  if (buffer_.size() < capacity_) {
    buffer_.push_back(std::move(t));
  } else {
    buffer_[next_] = std::move(t);
    next_ = (next_ + 1) % capacity_;
  }
}

std::vector<std::size_t> ReplayMemory::sample_indices(std::size_t count,
                                                      Rng& rng) const {
  if (buffer_.empty())
    throw ContractError("ReplayMemory::sample_indices: buffer is empty");
  std::vector<std::size_t> out(count);
  for (auto& i : out)
    i = static_cast<std::size_t>(rng.uniform_int(buffer_.size()));
  return out;
}

std::string to_string(LearnerVariant v) {
  return v == LearnerVariant::dqn ? "dqn" : "actor_critic";
}

LearnerVariant learner_variant_from_string(const std::string& name) {
  if (name == "dqn") return LearnerVariant::dqn;
  if (name == "actor_critic") return LearnerVariant::actor_critic;
  throw ConfigError("unknown learner variant '" + name +
                    "' (expected dqn or actor_critic)");
}

double epsilon_at(int episode, const TrainConfig& cfg) {
  int decay = std::max(
      1, static_cast<int>(cfg.epsilon_fraction * cfg.episodes));
  double t = std::min(1.0, static_cast<double>(episode) / decay);
  return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * t;
}

int select_action(const Eigen::VectorXd& action_values, double epsilon,
                  Rng& rng) {
  if (action_values.size() == 0)
    throw ContractError("select_action: empty value vector");
  if (rng.uniform() < epsilon)
    return static_cast<int>(
        rng.uniform_int(static_cast<std::uint64_t>(action_values.size())));
  Eigen::Index best = 0;
  action_values.maxCoeff(&best);  // first maximum
  return static_cast<int>(best);
}

namespace {

// Per-sample d(loss)/d(net output), mean-reduced over the batch. Targets and
// the advantage estimate come from the snapshot so that they are constants.
double batch_pass(const Mlp& live, const Mlp& snapshot,
                  const std::vector<const MdpTransition*>& batch,
                  const TrainConfig& cfg, Eigen::VectorXd* grad) {
  if (batch.empty()) throw ContractError("td update: empty batch");
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (const MdpTransition* t : batch) {
    Eigen::VectorXd s = to_eigen(t->state);
    Eigen::VectorXd s_next = to_eigen(t->next_state);
    Eigen::VectorXd out = live.forward(s);
    Eigen::VectorXd dout = Eigen::VectorXd::Zero(out.size());
    double keep = t->terminal ? 0.0 : 1.0;
    if (cfg.variant == LearnerVariant::dqn) {
      double target =
          t->reward + cfg.gamma * keep * snapshot.forward(s_next).maxCoeff();
      double diff = out(t->action) - target;
      loss += diff * diff * inv_b;
      dout(t->action) = 2.0 * diff * inv_b;
    } else {
      const Eigen::Index vi = out.size() - 1;
      double target =
          t->reward + cfg.gamma * keep * snapshot.forward(s_next)(vi);
      double advantage = target - snapshot.forward(s)(vi);
      Eigen::VectorXd pi = softmax(out.head(vi));
      double diff = target - out(vi);
      loss += (diff * diff - advantage * std::log(pi(t->action))) * inv_b;
      dout.head(vi) = advantage * inv_b * pi;
      dout(t->action) -= advantage * inv_b;
      dout(vi) = -2.0 * diff * inv_b;
    }
    if (grad) live.accumulate_gradient(s, dout, *grad);
  }
  return loss;
}

}  // namespace

double td_loss(const Mlp& live, const Mlp& snapshot,
               const std::vector<const MdpTransition*>& batch,
               const TrainConfig& cfg) {
  return batch_pass(live, snapshot, batch, cfg, nullptr);
}

Eigen::VectorXd td_gradient(const Mlp& live, const Mlp& snapshot,
                            const std::vector<const MdpTransition*>& batch,
                            const TrainConfig& cfg) {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(live.parameter_count()));
  batch_pass(live, snapshot, batch, cfg, &grad);
  return grad;
}

void sgd_step(Mlp& net, const Eigen::VectorXd& gradient,
              double learning_rate) {
  net.set_flat_params(net.flat_params() - learning_rate * gradient);
}

TrainResult train(Environment env, const TrainConfig& cfg,
                  const Mlp* warm_start) {
  if (cfg.episodes <= 0) throw ConfigError("train: episodes must be > 0");
  if (cfg.batch_size <= 0) throw ConfigError("train: batch size must be > 0");
  if (cfg.learning_rate <= 0.0)
    throw ConfigError("train: learning rate must be > 0");
  if (cfg.gamma < 0.0 || cfg.gamma >= 1.0)
    throw ConfigError("train: discount must lie in [0, 1)");

  const int input = Environment::encoding_length(env.scenario().area);
  const int output = cfg.variant == LearnerVariant::dqn ? 9 : 10;
  std::vector<int> dims{input, cfg.hidden_width, cfg.hidden_width, output};

  Rng rng(mix_seed(cfg.seed, {0x7e41ull}));
  Mlp net;
  if (warm_start) {
    if (warm_start->layer_dims() != dims)
      throw ConfigError("train: warm-start net does not match layer sizes");
    net = *warm_start;
  } else {
    net = Mlp::he_init(dims, rng);
  }

  ReplayMemory replay(cfg.replay_capacity);
  TrainResult result;
  result.episodes.reserve(static_cast<std::size_t>(cfg.episodes));

  for (int e = 0; e < cfg.episodes; ++e) {
    env.reset(mix_seed(cfg.seed, {0x3a9dull, static_cast<std::uint64_t>(e)}));
    double eps = epsilon_at(e, cfg);
    EpisodeStats stats;
    stats.episode = e;
    stats.epsilon = eps;
    double loss_sum = 0.0;
    int updates = 0;

    std::vector<double> s = env.observe();
    while (!env.done()) {
      Eigen::VectorXd out = net.forward(to_eigen(s));
      int a = select_action(out.head(9), eps, rng);
      StepResult step = env.step(a);
      replay.push({s, a, step.reward, step.next_state, step.done});
      stats.reward_sum += step.reward;
      stats.steps += 1;
      s = std::move(step.next_state);

      if (replay.size() >= static_cast<std::size_t>(cfg.batch_size)) {
        auto idx = replay.sample_indices(
            static_cast<std::size_t>(cfg.batch_size), rng);
        std::vector<const MdpTransition*> batch;
        batch.reserve(idx.size());
        for (std::size_t i : idx) batch.push_back(&replay.at(i));
        Mlp snapshot = net;
        double loss = td_loss(net, snapshot, batch, cfg);
        if (!std::isfinite(loss))
          throw Error("train: loss diverged (episode " + std::to_string(e) +
                      ", step " + std::to_string(stats.steps) + ", loss " +
                      std::to_string(loss) + "); lower the learning rate");
        sgd_step(net, td_gradient(net, snapshot, batch, cfg),
                 cfg.learning_rate);
        loss_sum += loss;
        updates += 1;
      }
    }
    stats.loss_mean = updates > 0 ? loss_sum / updates : 0.0;
    stats.final_coverage = env.coverage().total;
    result.episodes.push_back(stats);
  }
  result.net = std::move(net);
  return result;
}

int greedy_action(const Mlp& net, const std::vector<double>& state) {
  Eigen::VectorXd out = net.forward(to_eigen(state));
  Eigen::Index best = 0;
  out.head(9).maxCoeff(&best);
  return static_cast<int>(best);
}

void save_checkpoint(const std::string& path, const Mlp& net,
                     LearnerVariant variant, const AreaGrid& area) {
  nlohmann::ordered_json j;
  j["schema_version"] = kCheckpointSchemaVersion;
  j["variant"] = to_string(variant);
  j["grid"] = {{"cols", area.cols()}, {"rows", area.rows()}};
  j["layer_dims"] = net.layer_dims();
  nlohmann::ordered_json layers = nlohmann::ordered_json::array();
  for (std::size_t l = 0; l < net.weights().size(); ++l) {
    const auto& w = net.weights()[l];
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(w.size()));
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
    const auto& b = net.biases()[l];
    nlohmann::ordered_json layer;
    layer["weights"] = flat;  // row-major
    layer["bias"] = std::vector<double>(b.data(), b.data() + b.size());
    layers.push_back(std::move(layer));
  }
  j["layers"] = std::move(layers);

  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write checkpoint to " + path);
  out << j.dump(2) << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("checkpoint " + path + ": " + e.what());
  }
  try {
    if (j.at("schema_version").get<int>() != kCheckpointSchemaVersion)
      throw ValidationError("checkpoint " + path +
                            ": unsupported schema version");
    Checkpoint cp;
    cp.variant = learner_variant_from_string(j.at("variant").get<std::string>());
    cp.grid_cols = j.at("grid").at("cols").get<int>();
    cp.grid_rows = j.at("grid").at("rows").get<int>();
    auto dims = j.at("layer_dims").get<std::vector<int>>();
    Mlp net(dims);
    const auto& layers = j.at("layers");
    if (layers.size() != dims.size() - 1)
      throw ValidationError("checkpoint " + path + ": layer count mismatch");
    Eigen::VectorXd flat(static_cast<Eigen::Index>(net.parameter_count()));
    Eigen::Index k = 0;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      auto w = layers[l].at("weights").get<std::vector<double>>();
      auto b = layers[l].at("bias").get<std::vector<double>>();
      std::size_t rows = static_cast<std::size_t>(dims[l + 1]);
      std::size_t cols = static_cast<std::size_t>(dims[l]);
      if (w.size() != rows * cols || b.size() != rows)
        throw ValidationError("checkpoint " + path +
                              ": weight block size mismatch in layer " +
                              std::to_string(l));
      for (double v : w) flat(k++) = v;
      for (double v : b) flat(k++) = v;
    }
    net.set_flat_params(flat);
    cp.net = std::move(net);
    return cp;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("checkpoint " + path + ": " + e.what());
  }
}

}  // namespace aeris
