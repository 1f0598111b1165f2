#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aeris/environment.hpp"
#include "aeris/rng.hpp"

namespace aeris {

// Fully connected net with rectifier hidden layers and a linear output
// layer. Parameters are exposed flat (layer by layer, row-major weights then
// bias) so optimizer steps and gradient checks share one ordering.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<int> layer_dims);  // zero-initialised

  static Mlp he_init(std::vector<int> layer_dims, Rng& rng);

  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;

  // Backprop for one input: accumulates d(loss)/d(params) into `grad` given
  // d(loss)/d(output). `grad` must have parameter_count() entries.
  void accumulate_gradient(const Eigen::VectorXd& input,
                           const Eigen::VectorXd& dloss_doutput,
                           Eigen::VectorXd& grad) const;

  const std::vector<int>& layer_dims() const { return dims_; }
  int input_size() const { return dims_.front(); }
  int output_size() const { return dims_.back(); }

  std::size_t parameter_count() const;
  Eigen::VectorXd flat_params() const;
  void set_flat_params(const Eigen::VectorXd& flat);

  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

 private:
  std::vector<int> dims_;
  std::vector<Eigen::MatrixXd> weights_;  // weights_[l]: dims_[l+1] x dims_[l]
  std::vector<Eigen::VectorXd> biases_;
};

// Bounded FIFO store of transitions with uniform minibatch sampling.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);

  void push(MdpTransition t);
  std::size_t size() const { return buffer_.size(); }
  std::size_t capacity() const { return capacity_; }
  const MdpTransition& at(std::size_t i) const { return buffer_[i]; }

  // Uniform with replacement; draw order is deterministic in the rng stream.
  std::vector<std::size_t> sample_indices(std::size_t count, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;  // ring insert position once full
  std::vector<MdpTransition> buffer_;
};

enum class LearnerVariant { dqn, actor_critic };

std::string to_string(LearnerVariant v);
LearnerVariant learner_variant_from_string(const std::string& name);

struct TrainConfig {
  LearnerVariant variant = LearnerVariant::dqn;
  int episodes = 300;
  int batch_size = 32;
  int hidden_width = 64;  // two hidden layers of this width
  double learning_rate = 5e-4;
  double gamma = 0.95;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_fraction = 0.5;  // fraction of episodes to decay across
  std::size_t replay_capacity = 50000;
  std::uint64_t seed = 1;
};

double epsilon_at(int episode, const TrainConfig& cfg);

// Epsilon-greedy over action values; exploit ties to the lowest index.
int select_action(const Eigen::VectorXd& action_values, double epsilon,
                  Rng& rng);

// One-step TD loss over a minibatch. The snapshot net supplies the targets
// (and the advantage estimate for the actor-critic head), so they are
// constants with respect to the live parameters.
double td_loss(const Mlp& live, const Mlp& snapshot,
               const std::vector<const MdpTransition*>& batch,
               const TrainConfig& cfg);

Eigen::VectorXd td_gradient(const Mlp& live, const Mlp& snapshot,
                            const std::vector<const MdpTransition*>& batch,
                            const TrainConfig& cfg);

void sgd_step(Mlp& net, const Eigen::VectorXd& gradient, double learning_rate);

struct EpisodeStats {
  int episode = 0;
  double reward_sum = 0.0;
  double epsilon = 0.0;
  double loss_mean = 0.0;
  int final_coverage = 0;
  int steps = 0;
};

struct TrainResult {
  Mlp net;
  std::vector<EpisodeStats> episodes;
};

// Episode loop: epsilon-greedy rollouts into replay, one snapshot-target
// minibatch update per environment step once the buffer can fill a batch.
// Optionally resumes from a warm-start net (dims must match).
TrainResult train(Environment env, const TrainConfig& cfg,
                  const Mlp* warm_start = nullptr);

int greedy_action(const Mlp& net, const std::vector<double>& state);

struct Checkpoint {
  Mlp net;
  LearnerVariant variant = LearnerVariant::dqn;
  int grid_cols = 0;
  int grid_rows = 0;
};

void save_checkpoint(const std::string& path, const Mlp& net,
                     LearnerVariant variant, const AreaGrid& area);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace aeris
