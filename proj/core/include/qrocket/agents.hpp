#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qrocket/mlp.hpp"
#include "qrocket/rng.hpp"
#include "qrocket/vqc.hpp"

namespace qrocket::agents {

struct Transition {
  std::array<double, 8> state{};
  int action = 0;
  double reward = 0.0;
  std::array<double, 8> next_state{};
  bool done = false;
};

// Fixed-capacity ring with seeded without-replacement batch sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return data_[i]; }

  // Distinct indices within the batch; batch must not exceed size().
  std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t size_ = 0;
  std::size_t next_ = 0;
  std::vector<Transition> data_;
};

// Multiplicative per-episode decay, clamped at eps_end.
struct EpsilonSchedule {
  double eps_start = 1.0;
  double eps_end = 0.01;
  double decay = 0.999;

  double at(long episode) const;
};

// Epsilon-greedy over Q-values; greedy ties break toward the lowest index.
int select_action(const std::array<double, 4>& values, double epsilon, Rng& rng);

double td_target(double reward, const std::array<double, 4>& next_q, bool done,
                 double gamma);

std::array<double, 4> softmax4(const std::array<double, 4>& logits);

enum class AgentKind { QRL, DQN, ActorCritic };

AgentKind agent_kind_from_string(const std::string& s);  // throws ConfigError
std::string agent_kind_name(AgentKind k);

struct AgentConfig {
  double gamma = 0.99;
  double lr = 0.0005;
  int hidden_layers = 3;  // dense layers L
  int width = 64;
  int vqc_depth = 5;
  // The 64-parameter quantum net tolerates (and needs) larger steps than the
  // dense baselines, so it gets its own rates: one for the rotation angles
  // and a faster one for the unbounded readout weights.
  double vqc_lr = 0.005;
  double vqc_output_lr = 0.05;
  double ac_entropy = 0.01;  // entropy-bonus weight for the softmax policy
  int ac_rollout = 16;       // segment length between actor-critic updates
  bool encoder_entangler = true;
  std::size_t replay_capacity = 50000;
  int batch_size = 64;
  int target_sync = 500;      // updates between target-network copies
  std::size_t warmup = 1000;  // buffer size before training starts
};

// Common surface of the three trainable agents. train() returns the scalar
// loss of the update it performed, or nothing if no update was due.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual std::string kind() const = 0;
  virtual int act(const std::array<double, 8>& obs, double epsilon, Rng& rng) = 0;
  virtual void observe(const Transition& t) = 0;
  virtual std::optional<double> train(Rng& rng) = 0;
  virtual std::size_t count_params() const = 0;
  virtual nlohmann::json checkpoint() const = 0;
  virtual void restore(const nlohmann::json& j) = 0;
};

// Shared replay/target-network Q-learning loop. train_on_batch computes the
// mean squared TD error against the frozen target copy, applies one Adam
// step and returns the loss. Throws std::logic_error on an empty batch.
class QAgentBase : public Agent {
 public:
  explicit QAgentBase(const AgentConfig& cfg);

  void observe(const Transition& t) override { buffer_.push(t); }
  std::optional<double> train(Rng& rng) override;
  virtual double train_on_batch(const std::vector<const Transition*>& batch) = 0;

  const ReplayBuffer& buffer() const { return buffer_; }
  long updates() const { return updates_; }

 protected:
  AgentConfig cfg_;
  ReplayBuffer buffer_;
  long updates_ = 0;
};

// Quantum Q-network: 4-qubit policy trained with parameter-shift gradients.
class QrlAgent : public QAgentBase {
 public:
  QrlAgent(const AgentConfig& cfg, Rng& init_rng);

  std::string kind() const override { return "qrl"; }
  int act(const std::array<double, 8>& obs, double epsilon, Rng& rng) override;
  double train_on_batch(const std::vector<const Transition*>& batch) override;
  std::size_t count_params() const override { return params_.count_params(); }
  nlohmann::json checkpoint() const override;
  void restore(const nlohmann::json& j) override;

  std::array<double, 4> q_values(const std::array<double, 8>& obs) const;
  const vqc::PolicyParams& params() const { return params_; }
  vqc::PolicyParams& params() { return params_; }

 private:
  vqc::PolicyParams params_;
  vqc::PolicyParams target_;
  nets::AdamState adam_angles_;
  nets::AdamState adam_weights_;
};

// Classical baseline: dense Q-network per the reference hyperparameters.
class DqnAgent : public QAgentBase {
 public:
  DqnAgent(const AgentConfig& cfg, Rng& init_rng);

  std::string kind() const override { return "dqn"; }
  int act(const std::array<double, 8>& obs, double epsilon, Rng& rng) override;
  double train_on_batch(const std::vector<const Transition*>& batch) override;
  std::size_t count_params() const override { return net_.count_params(); }
  nlohmann::json checkpoint() const override;
  void restore(const nlohmann::json& j) override;

  std::array<double, 4> q_values(const std::array<double, 8>& obs) const;
  const nets::Mlp& net() const { return net_; }
  nets::Mlp& net() { return net_; }

 private:
  nets::Mlp net_;
  nets::Mlp target_;
  nets::AdamState adam_;
};

struct AcLosses {
  double policy_loss = 0.0;
  double value_loss = 0.0;
};

// One-step advantage actor-critic on a shared trunk with a softmax policy
// head (4 logits) and a value head (1 output) in a combined 5-wide output.
class ActorCriticAgent : public Agent {
 public:
  ActorCriticAgent(const AgentConfig& cfg, Rng& init_rng);

  std::string kind() const override { return "ac"; }
  int act(const std::array<double, 8>& obs, double epsilon, Rng& rng) override;
  void observe(const Transition& t) override;
  std::optional<double> train(Rng& rng) override;
  std::size_t count_params() const override { return net_.count_params(); }
  nlohmann::json checkpoint() const override;
  void restore(const nlohmann::json& j) override;

  std::array<double, 4> policy(const std::array<double, 8>& obs) const;
  double value(const std::array<double, 8>& obs) const;
  const nets::Mlp& net() const { return net_; }
  nets::Mlp& net() { return net_; }
  const AgentConfig& config() const { return cfg_; }

  AcLosses update_on_rollout(const std::vector<Transition>& rollout);

 private:
  AgentConfig cfg_;
  nets::Mlp net_;
  nets::AdamState adam_;
  std::vector<Transition> rollout_;
};

AcLosses train_step_ac(ActorCriticAgent& agent, const std::vector<Transition>& rollout);

std::unique_ptr<Agent> make_agent(AgentKind kind, const AgentConfig& cfg, Rng& init_rng);

}  // namespace qrocket::agents
