#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "arena/ppo/network.hpp"

namespace arena::ppo {

/// One batch of PPO samples; all vectors have one entry per column of `observations`.
template <typename Scalar>
struct RolloutBatch {
    Mat<Scalar> observations;      // obs_dim x n
    std::vector<int> actions;
    Vec<Scalar> rewards;
    Vec<Scalar> values;            // critic estimates at collection time
    Vec<Scalar> log_probs;         // behaviour log-probabilities
    Vec<Scalar> advantages;
    Vec<Scalar> returns;           // advantage + value

    Eigen::Index size() const { return observations.cols(); }

    /// Throws ShapeMismatch when lengths differ, NonFiniteLoss on non-finite advantages.
    void validate() const {
        const Eigen::Index n = size();
        if (static_cast<Eigen::Index>(actions.size()) != n || rewards.size() != n || values.size() != n ||
            log_probs.size() != n || advantages.size() != n || returns.size() != n) {
            throw ShapeMismatch("rollout batch fields have different lengths");
        }
        if (!advantages.allFinite()) throw NonFiniteLoss("non-finite advantage in rollout batch");
    }
};

/// Generalized advantage estimate of one trajectory.
/// delta_t = r_t + gamma v_{t+1} - v_t, A_t = delta_t + gamma lambda A_{t+1}.
template <typename Scalar>
Vec<Scalar> gae(const Vec<Scalar>& rewards, const Vec<Scalar>& values, Scalar last_value, Scalar gamma,
                Scalar lambda) {
    if (rewards.size() != values.size()) throw ShapeMismatch("gae: rewards and values differ in length");
    const Eigen::Index n = rewards.size();
    Vec<Scalar> adv(n);
    Scalar running = 0;
    for (Eigen::Index t = n - 1; t >= 0; --t) {
        const Scalar next = t + 1 < n ? values(t + 1) : last_value;
        const Scalar delta = rewards(t) + gamma * next - values(t);
        running = delta + gamma * lambda * running;
        adv(t) = running;
    }
    return adv;
}

/// Shifts and scales to mean 0 and standard deviation 1 (population, eps 1e-8).
template <typename Scalar>
Vec<Scalar> normalize_advantages(const Vec<Scalar>& adv, Scalar eps = Scalar(1e-8)) {
    if (adv.size() == 0) return adv;
    const Scalar mean = adv.mean();
    const Vec<Scalar> centered = adv.array() - mean;
    const Scalar sd = std::sqrt(centered.squaredNorm() / static_cast<Scalar>(adv.size()));
    return centered / (sd + eps);
}

struct LossWeights {
    double clip_eps = 0.2;
    double ent_coef = 0.01;
};

struct LossParts {
    double policy = 0.0;
    double value = 0.0;
    double entropy = 0.0;
    double total = 0.0;
    double clip_fraction = 0.0;
};

/// Mean over the batch of -min(rA, clip(r, 1 +- eps) A) + 0.5 (V - R)^2 - c H.
/// When `grad` is given it receives dLoss/dparams.
template <typename Scalar>
LossParts ppo_loss(const MlpParams<Scalar>& p, const RolloutBatch<Scalar>& batch, const LossWeights& w,
                   MlpParams<Scalar>* grad = nullptr) {
    const Eigen::Index n = batch.size();
    const auto f = forward(p, batch.observations);
    const Mat<Scalar> logp = log_softmax(f.logits);
    const Mat<Scalar> prob = logp.array().exp();
    const Scalar inv_n = Scalar(1) / static_cast<Scalar>(n);
    const Scalar lo = static_cast<Scalar>(1.0 - w.clip_eps), hi = static_cast<Scalar>(1.0 + w.clip_eps);
    const Scalar c = static_cast<Scalar>(w.ent_coef);

    LossParts parts;
    Mat<Scalar> d_logits(p.action_num, n);
    Vec<Scalar> d_values(n);
    long clipped = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const int a = batch.actions[static_cast<std::size_t>(j)];
        const Scalar adv = batch.advantages(j);
        const Scalar ratio = std::exp(logp(a, j) - batch.log_probs(j));
        const Scalar bounded = std::clamp(ratio, lo, hi);
        const Scalar unclipped_term = ratio * adv, clipped_term = bounded * adv;
        const bool use_unclipped = unclipped_term <= clipped_term;
        if (!use_unclipped) ++clipped;
        parts.policy -= static_cast<double>(std::min(unclipped_term, clipped_term));

        const Scalar entropy = -(prob.col(j).array() * logp.col(j).array()).sum();
        parts.entropy += static_cast<double>(entropy);
        const Scalar err = f.values(j) - batch.returns(j);
        parts.value += static_cast<double>(Scalar(0.5) * err * err);

        // d(-rA)/dz = -rA (onehot - p); d(-cH)/dz = c p (log p + H)
        const Scalar g = use_unclipped ? -ratio * adv : Scalar(0);
        d_logits.col(j) = -g * prob.col(j);
        d_logits(a, j) += g;
        d_logits.col(j).array() += c * prob.col(j).array() * (logp.col(j).array() + entropy);
        d_values(j) = err;
    }
    parts.policy /= static_cast<double>(n);
    parts.value /= static_cast<double>(n);
    parts.entropy /= static_cast<double>(n);
    parts.total = parts.policy + parts.value - w.ent_coef * parts.entropy;
    parts.clip_fraction = static_cast<double>(clipped) / static_cast<double>(n);
    if (!std::isfinite(parts.total)) {
        throw NonFiniteLoss("ppo loss is not finite (policy " + std::to_string(parts.policy) + ", value " +
                            std::to_string(parts.value) + ", entropy " + std::to_string(parts.entropy) + ")");
    }
    if (grad == nullptr) return parts;

    d_logits *= inv_n;
    d_values *= inv_n;
    auto& gp = *grad;
    gp = p.zeros_like();

    gp.action_head.weight.noalias() = d_logits * f.p2.transpose();
    gp.action_head.bias = d_logits.rowwise().sum();
    Mat<Scalar> dz2 = (p.action_head.weight.transpose() * d_logits).array() * (1 - f.p2.array().square());
    gp.policy2.weight.noalias() = dz2 * f.p1.transpose();
    gp.policy2.bias = dz2.rowwise().sum();
    Mat<Scalar> dz1 = (p.policy2.weight.transpose() * dz2).array() * (1 - f.p1.array().square());
    gp.policy1.weight.noalias() = dz1 * f.input.transpose();
    gp.policy1.bias = dz1.rowwise().sum();

    gp.value_head.weight.noalias() = d_values.transpose() * f.v2.transpose();
    gp.value_head.bias(0) = d_values.sum();
    Mat<Scalar> dv2 = (p.value_head.weight.transpose() * d_values.transpose()).array() * (1 - f.v2.array().square());
    gp.value2.weight.noalias() = dv2 * f.v1.transpose();
    gp.value2.bias = dv2.rowwise().sum();
    Mat<Scalar> dv1 = (p.value2.weight.transpose() * dv2).array() * (1 - f.v1.array().square());
    gp.value1.weight.noalias() = dv1 * f.value_input.transpose();
    gp.value1.bias = dv1.rowwise().sum();
    return parts;
}

/// Adam with bias correction (beta1 0.9, beta2 0.999, eps 1e-8).
template <typename Scalar>
class Adam {
public:
    explicit Adam(const MlpParams<Scalar>& shape, double lr, double beta1 = 0.9, double beta2 = 0.999,
                  double eps = 1e-8)
        : m_(shape.zeros_like()), v_(shape.zeros_like()), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void step(MlpParams<Scalar>& params, MlpParams<Scalar>& grad) {
        ++t_;
        const Scalar b1 = static_cast<Scalar>(beta1_), b2 = static_cast<Scalar>(beta2_);
        const Scalar c1 = Scalar(1) - static_cast<Scalar>(std::pow(beta1_, t_));
        const Scalar c2 = Scalar(1) - static_cast<Scalar>(std::pow(beta2_, t_));
        const Scalar lr = static_cast<Scalar>(lr_), eps = static_cast<Scalar>(eps_);
        auto apply = [&](auto& x, const auto& g, auto& m, auto& v) {
            m = b1 * m + (1 - b1) * g;
            v = b2 * v + (1 - b2) * g.cwiseAbs2();
            x.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
        };
        params.zip(
            [&](Dense<Scalar>& x, Dense<Scalar>& g, Dense<Scalar>& m, Dense<Scalar>& v) {
                apply(x.weight, g.weight, m.weight, v.weight);
                apply(x.bias, g.bias, m.bias, v.bias);
            },
            grad, m_, v_);
    }

    long steps() const { return t_; }

private:
    MlpParams<Scalar> m_, v_;
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
};

}  // namespace arena::ppo
