#include "qrocket/agents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qrocket/errors.hpp"

namespace qrocket::agents {

using nlohmann::json;

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("replay capacity must be positive");
  data_.reserve(std::min<std::size_t>(capacity_, 4096));
}

void ReplayBuffer::push(const Transition& t) {
  if (size_ < capacity_) {
    data_.push_back(t);
    ++size_;
  } else {
    data_[next_] = t;
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch, Rng& rng) const {
  if (batch > size_) throw std::logic_error("batch larger than buffer");
  std::vector<std::size_t> out;
  out.reserve(batch);
  while (out.size() < batch) {
    const std::size_t idx = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(size_)));
    if (std::find(out.begin(), out.end(), idx) == out.end()) out.push_back(idx);
  }
  return out;
}

double EpsilonSchedule::at(long episode) const {
  return std::max(eps_end, eps_start * std::pow(decay, static_cast<double>(episode)));
}

int select_action(const std::array<double, 4>& values, double epsilon, Rng& rng) {
  const double u = rng.uniform();
  if (u < epsilon) return rng.uniform_int(4);
  int best = 0;
  for (int a = 1; a < 4; ++a) {
    if (values[a] > values[best]) best = a;
  }
  return best;
}

double td_target(double reward, const std::array<double, 4>& next_q, bool done,
                 double gamma) {
  if (done) return reward;
  return reward + gamma * *std::max_element(next_q.begin(), next_q.end());
}

std::array<double, 4> softmax4(const std::array<double, 4>& logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  std::array<double, 4> p{};
  double z = 0.0;
  for (int i = 0; i < 4; ++i) {
    p[i] = std::exp(logits[i] - m);
    z += p[i];
  }
  for (double& x : p) x /= z;
  return p;
}

AgentKind agent_kind_from_string(const std::string& s) {
  if (s == "qrl") return AgentKind::QRL;
  if (s == "dqn") return AgentKind::DQN;
  if (s == "ac" || s == "actor-critic") return AgentKind::ActorCritic;
  throw ConfigError("unknown agent kind: " + s);
}

std::string agent_kind_name(AgentKind k) {
  switch (k) {
    case AgentKind::QRL: return "qrl";
    case AgentKind::DQN: return "dqn";
    case AgentKind::ActorCritic: return "ac";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Q-learning base

QAgentBase::QAgentBase(const AgentConfig& cfg) : cfg_(cfg), buffer_(cfg.replay_capacity) {
  if (cfg_.batch_size < 1 || cfg_.target_sync < 1) {
    throw ConfigError("invalid agent configuration");
  }
}

std::optional<double> QAgentBase::train(Rng& rng) {
  if (buffer_.size() < cfg_.warmup ||
      buffer_.size() < static_cast<std::size_t>(cfg_.batch_size)) {
    return std::nullopt;
  }
  const auto idx = buffer_.sample_indices(static_cast<std::size_t>(cfg_.batch_size), rng);
  std::vector<const Transition*> batch;
  batch.reserve(idx.size());
  for (std::size_t i : idx) batch.push_back(&buffer_.at(i));
  return train_on_batch(batch);
}

// ---------------------------------------------------------------------------
// QRL agent

QrlAgent::QrlAgent(const AgentConfig& cfg, Rng& init_rng)
    : QAgentBase(cfg),
      params_(vqc::PolicyParams::random_init(cfg.vqc_depth, init_rng)),
      target_(params_),
      adam_angles_(params_.angles.size()),
      adam_weights_(4) {}

std::array<double, 4> QrlAgent::q_values(const std::array<double, 8>& obs) const {
  return vqc::forward(params_, vqc::encode(obs), cfg_.encoder_entangler);
}

int QrlAgent::act(const std::array<double, 8>& obs, double epsilon, Rng& rng) {
  return select_action(q_values(obs), epsilon, rng);
}

double QrlAgent::train_on_batch(const std::vector<const Transition*>& batch) {
  if (batch.empty()) throw std::logic_error("empty training batch");
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  std::vector<double> grad(params_.count_params(), 0.0);
  double loss = 0.0;
  for (const Transition* t : batch) {
    const auto next_q = vqc::forward(target_, vqc::encode(t->next_state),
                                     cfg_.encoder_entangler);
    const double y = td_target(t->reward, next_q, t->done, cfg_.gamma);
    const auto feat = vqc::encode(t->state);
    const auto q = vqc::forward(params_, feat, cfg_.encoder_entangler);
    const double err = q[t->action] - y;
    loss += err * err * inv_n;

    std::array<double, 4> dq{};
    dq[t->action] = 2.0 * err * inv_n;
    const auto g = vqc::parameter_shift_grad(params_, feat, dq, cfg_.encoder_entangler);
    for (std::size_t i = 0; i < g.size(); ++i) grad[i] += g[i];
  }

  // Angles and readout weights use separate learning rates.
  const std::size_t na = params_.angles.size();
  std::vector<double> ga(grad.begin(), grad.begin() + na);
  std::vector<double> gw(grad.begin() + na, grad.end());
  nets::AdamConfig ca;
  ca.lr = cfg_.vqc_lr;
  nets::adam_step(params_.angles, ga, adam_angles_, ca);
  std::vector<double> w(params_.output_weights.begin(), params_.output_weights.end());
  nets::AdamConfig cw;
  cw.lr = cfg_.vqc_output_lr;
  nets::adam_step(w, gw, adam_weights_, cw);
  std::copy(w.begin(), w.end(), params_.output_weights.begin());

  ++updates_;
  if (updates_ % cfg_.target_sync == 0) target_ = params_;
  return loss;
}

json QrlAgent::checkpoint() const {
  json j;
  j["kind"] = "qrl";
  j["num_qubits"] = vqc::kNumQubits;
  j["depth"] = params_.depth;
  j["angles"] = params_.angles;
  j["output_weights"] = params_.output_weights;
  j["target_angles"] = target_.angles;
  j["target_output_weights"] = target_.output_weights;
  j["adam_angles"] = {{"m", adam_angles_.m}, {"v", adam_angles_.v}, {"step", adam_angles_.step}};
  j["adam_weights"] = {{"m", adam_weights_.m}, {"v", adam_weights_.v}, {"step", adam_weights_.step}};
  j["updates"] = updates_;
  return j;
}

void QrlAgent::restore(const json& j) {
  try {
    if (j.at("kind") != "qrl") throw FormatError("checkpoint kind mismatch");
    params_.depth = j.at("depth").get<int>();
    params_.angles = j.at("angles").get<std::vector<double>>();
    j.at("output_weights").get_to(params_.output_weights);
    target_.depth = params_.depth;
    target_.angles = j.at("target_angles").get<std::vector<double>>();
    j.at("target_output_weights").get_to(target_.output_weights);
    adam_angles_.m = j.at("adam_angles").at("m").get<std::vector<double>>();
    adam_angles_.v = j.at("adam_angles").at("v").get<std::vector<double>>();
    adam_angles_.step = j.at("adam_angles").at("step").get<long>();
    adam_weights_.m = j.at("adam_weights").at("m").get<std::vector<double>>();
    adam_weights_.v = j.at("adam_weights").at("v").get<std::vector<double>>();
    adam_weights_.step = j.at("adam_weights").at("step").get<long>();
    updates_ = j.at("updates").get<long>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("corrupt qrl checkpoint: ") + e.what());
  }
  if (params_.angles.size() != static_cast<std::size_t>(params_.depth) * vqc::kAnglesPerLayer) {
    throw FormatError("qrl checkpoint: angle count does not match depth");
  }
}

// ---------------------------------------------------------------------------
// DQN agent

namespace {

std::vector<int> dqn_sizes(const AgentConfig& cfg) {
  std::vector<int> sizes{8};
  for (int i = 0; i < cfg.hidden_layers; ++i) sizes.push_back(cfg.width);
  sizes.push_back(4);
  return sizes;
}

std::array<double, 4> head4(const std::vector<double>& out) {
  return {out[0], out[1], out[2], out[3]};
}

}  // namespace

DqnAgent::DqnAgent(const AgentConfig& cfg, Rng& init_rng)
    : QAgentBase(cfg),
      net_(nets::Mlp::xavier(dqn_sizes(cfg), init_rng)),
      target_(net_),
      adam_(net_.count_params()) {}

std::array<double, 4> DqnAgent::q_values(const std::array<double, 8>& obs) const {
  return head4(nets::mlp_forward(net_, obs));
}

int DqnAgent::act(const std::array<double, 8>& obs, double epsilon, Rng& rng) {
  return select_action(q_values(obs), epsilon, rng);
}

double DqnAgent::train_on_batch(const std::vector<const Transition*>& batch) {
  if (batch.empty()) throw std::logic_error("empty training batch");
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  std::vector<double> grads(net_.count_params(), 0.0);
  double loss = 0.0;
  nets::ForwardCache cache;
  for (const Transition* t : batch) {
    const auto next_q = head4(nets::mlp_forward(target_, t->next_state));
    const double y = td_target(t->reward, next_q, t->done, cfg_.gamma);
    const auto q = head4(nets::mlp_forward(net_, t->state, &cache));
    const double err = q[t->action] - y;
    loss += err * err * inv_n;

    std::array<double, 4> dq{};
    dq[t->action] = 2.0 * err * inv_n;
    nets::mlp_backward_acc(net_, cache, dq, grads);
  }

  nets::AdamConfig ca;
  ca.lr = cfg_.lr;
  nets::adam_step(net_.params(), grads, adam_, ca);
  ++updates_;
  if (updates_ % cfg_.target_sync == 0) target_ = net_;
  return loss;
}

json DqnAgent::checkpoint() const {
  json j;
  j["kind"] = "dqn";
  j["sizes"] = net_.sizes();
  j["params"] = net_.params();
  j["target_params"] = target_.params();
  j["adam"] = {{"m", adam_.m}, {"v", adam_.v}, {"step", adam_.step}};
  j["updates"] = updates_;
  return j;
}

void DqnAgent::restore(const json& j) {
  try {
    if (j.at("kind") != "dqn") throw FormatError("checkpoint kind mismatch");
    const auto sizes = j.at("sizes").get<std::vector<int>>();
    if (sizes != net_.sizes()) throw FormatError("dqn checkpoint: layer sizes mismatch");
    net_.params() = j.at("params").get<std::vector<double>>();
    target_.params() = j.at("target_params").get<std::vector<double>>();
    adam_.m = j.at("adam").at("m").get<std::vector<double>>();
    adam_.v = j.at("adam").at("v").get<std::vector<double>>();
    adam_.step = j.at("adam").at("step").get<long>();
    updates_ = j.at("updates").get<long>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("corrupt dqn checkpoint: ") + e.what());
  }
  if (net_.params().size() != net_.count_params() ||
      target_.params().size() != target_.count_params()) {
    throw FormatError("dqn checkpoint: parameter count mismatch");
  }
}

// ---------------------------------------------------------------------------
// Actor-critic agent

ActorCriticAgent::ActorCriticAgent(const AgentConfig& cfg, Rng& init_rng)
    : cfg_(cfg),
      net_(nets::Mlp::xavier({8, cfg.width, cfg.width, 5}, init_rng)),
      adam_(net_.count_params()) {}

std::array<double, 4> ActorCriticAgent::policy(const std::array<double, 8>& obs) const {
  const auto out = nets::mlp_forward(net_, obs);
  return softmax4({out[0], out[1], out[2], out[3]});
}

double ActorCriticAgent::value(const std::array<double, 8>& obs) const {
  return nets::mlp_forward(net_, obs)[4];
}

int ActorCriticAgent::act(const std::array<double, 8>& obs, double /*epsilon*/, Rng& rng) {
  const auto pi = policy(obs);
  const double u = rng.uniform();
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    acc += pi[a];
    if (u < acc) return a;
  }
  return 3;
}

void ActorCriticAgent::observe(const Transition& t) { rollout_.push_back(t); }

std::optional<double> ActorCriticAgent::train(Rng& /*rng*/) {
  // Update on fixed-length segments and at episode ends, n-step A2C style.
  if (rollout_.empty()) return std::nullopt;
  if (!rollout_.back().done &&
      rollout_.size() < static_cast<std::size_t>(std::max(1, cfg_.ac_rollout))) {
    return std::nullopt;
  }
  const AcLosses losses = update_on_rollout(rollout_);
  rollout_.clear();
  return losses.policy_loss + losses.value_loss;
}

AcLosses ActorCriticAgent::update_on_rollout(const std::vector<Transition>& rollout) {
  if (rollout.empty()) throw std::logic_error("empty rollout");
  const std::size_t n = rollout.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  // First pass: one-step advantages, detached for the policy term.
  std::vector<double> adv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Transition& t = rollout[i];
    const double v = nets::mlp_forward(net_, t.state)[4];
    const double vnext = t.done ? 0.0 : nets::mlp_forward(net_, t.next_state)[4];
    adv[i] = t.reward + cfg_.gamma * vnext - v;
  }

  // Normalized advantages drive the policy head; the raw TD errors stay with
  // the critic. Rewards here swing by hundreds per episode, so the policy
  // cannot take them at face value.
  double mean = 0.0;
  for (double a : adv) mean += a;
  mean *= inv_n;
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double stddev = std::sqrt(var * inv_n);
  std::vector<double> adv_hat(n);
  for (std::size_t i = 0; i < n; ++i) adv_hat[i] = (adv[i] - mean) / (stddev + 1e-8);

  constexpr double kValueCoef = 0.5;
  std::vector<double> grads(net_.count_params(), 0.0);
  AcLosses losses;
  nets::ForwardCache cache;
  for (std::size_t i = 0; i < n; ++i) {
    const Transition& t = rollout[i];
    const auto out = nets::mlp_forward(net_, t.state, &cache);
    const std::array<double, 4> pi = softmax4({out[0], out[1], out[2], out[3]});
    const double v = out[4];
    const double vnext = t.done ? 0.0 : nets::mlp_forward(net_, t.next_state)[4];
    const double target = t.reward + cfg_.gamma * vnext;

    losses.policy_loss += -std::log(std::max(pi[t.action], 1e-12)) * adv_hat[i] * inv_n;
    losses.value_loss += (v - target) * (v - target) * inv_n;

    // Entropy bonus keeps the softmax from collapsing onto one engine before
    // the critic is worth listening to.
    double entropy = 0.0;
    for (int a = 0; a < 4; ++a) {
      if (pi[a] > 0.0) entropy -= pi[a] * std::log(pi[a]);
    }
    std::array<double, 5> dout{};
    for (int a = 0; a < 4; ++a) {
      dout[a] = (pi[a] - (a == t.action ? 1.0 : 0.0)) * adv_hat[i] * inv_n;
      if (pi[a] > 0.0) {
        dout[a] += cfg_.ac_entropy * pi[a] * (std::log(pi[a]) + entropy) * inv_n;
      }
    }
    dout[4] = kValueCoef * 2.0 * (v - target) * inv_n;
    nets::mlp_backward_acc(net_, cache, dout, grads);
  }

  // Global norm clip: terminal-reward spikes otherwise swamp the shared trunk.
  constexpr double kMaxGradNorm = 1.0;
  double norm_sq = 0.0;
  for (double g : grads) norm_sq += g * g;
  const double norm = std::sqrt(norm_sq);
  if (norm > kMaxGradNorm) {
    const double scale = kMaxGradNorm / norm;
    for (double& g : grads) g *= scale;
  }

  nets::AdamConfig ca;
  ca.lr = cfg_.lr;
  nets::adam_step(net_.params(), grads, adam_, ca);
  return losses;
}

json ActorCriticAgent::checkpoint() const {
  json j;
  j["kind"] = "ac";
  j["sizes"] = net_.sizes();
  j["params"] = net_.params();
  j["adam"] = {{"m", adam_.m}, {"v", adam_.v}, {"step", adam_.step}};
  return j;
}

void ActorCriticAgent::restore(const json& j) {
  try {
    if (j.at("kind") != "ac") throw FormatError("checkpoint kind mismatch");
    const auto sizes = j.at("sizes").get<std::vector<int>>();
    if (sizes != net_.sizes()) throw FormatError("ac checkpoint: layer sizes mismatch");
    net_.params() = j.at("params").get<std::vector<double>>();
    adam_.m = j.at("adam").at("m").get<std::vector<double>>();
    adam_.v = j.at("adam").at("v").get<std::vector<double>>();
    adam_.step = j.at("adam").at("step").get<long>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("corrupt ac checkpoint: ") + e.what());
  }
  if (net_.params().size() != net_.count_params()) {
    throw FormatError("ac checkpoint: parameter count mismatch");
  }
}

AcLosses train_step_ac(ActorCriticAgent& agent, const std::vector<Transition>& rollout) {
  return agent.update_on_rollout(rollout);
}

std::unique_ptr<Agent> make_agent(AgentKind kind, const AgentConfig& cfg, Rng& init_rng) {
  switch (kind) {
    case AgentKind::QRL: return std::make_unique<QrlAgent>(cfg, init_rng);
    case AgentKind::DQN: return std::make_unique<DqnAgent>(cfg, init_rng);
    case AgentKind::ActorCritic: return std::make_unique<ActorCriticAgent>(cfg, init_rng);
  }
  throw ConfigError("unknown agent kind");
}

}  // namespace qrocket::agents
