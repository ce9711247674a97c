#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <string>

#include "arena/core/error.hpp"
#include "arena/core/rng.hpp"

namespace arena::ppo {

inline constexpr int kHidden = 64;
/// Width of the value trunk's input; observations are cut or zero-padded to it.
inline constexpr int kValueInputs = 2;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Affine layer, y = W x + b, one sample per column.
template <typename Scalar>
struct Dense {
    Mat<Scalar> weight;  // out x in
    Vec<Scalar> bias;    // out

    Dense() = default;
    Dense(int in, int out) : weight(Mat<Scalar>::Zero(out, in)), bias(Vec<Scalar>::Zero(out)) {}

    Eigen::Index size() const { return weight.size() + bias.size(); }
};

/// Policy trunk obs->64->64 and value trunk 2->64->64 (tanh), with linear
/// action and value heads.
template <typename Scalar>
struct MlpParams {
    int obs_dim = 0;
    int action_num = 0;
    Dense<Scalar> policy1, policy2, action_head;
    Dense<Scalar> value1, value2, value_head;

    MlpParams() = default;
    MlpParams(int obs, int actions)
        : obs_dim(obs),
          action_num(actions),
          policy1(obs, kHidden),
          policy2(kHidden, kHidden),
          action_head(kHidden, actions),
          value1(kValueInputs, kHidden),
          value2(kHidden, kHidden),
          value_head(kHidden, 1) {}

    /// Visits every layer of `*this` together with the matching layer of the others.
    template <typename F, typename... Others>
    void zip(F&& f, Others&... others) {
        f(policy1, others.policy1...);
        f(policy2, others.policy2...);
        f(action_head, others.action_head...);
        f(value1, others.value1...);
        f(value2, others.value2...);
        f(value_head, others.value_head...);
    }
    template <typename F>
    void zip(F&& f) const {
        f(policy1);
        f(policy2);
        f(action_head);
        f(value1);
        f(value2);
        f(value_head);
    }

    Eigen::Index parameter_count() const {
        Eigen::Index n = 0;
        zip([&n](const Dense<Scalar>& d) { n += d.size(); });
        return n;
    }

    MlpParams zeros_like() const { return MlpParams(obs_dim, action_num); }
};

/// Closed-form count: each trunk 64(in+1) + 64*65, action head 65a, value head 65.
inline long long expected_parameter_count(int obs_dim, int action_num) {
    const long long trunk2 = kHidden * (kHidden + 1);
    return kHidden * (obs_dim + 1) + trunk2 + kHidden * (kValueInputs + 1) + trunk2 +
           (kHidden + 1) * action_num + (kHidden + 1);
}

namespace detail {

template <typename Scalar>
void orthogonal(Mat<Scalar>& w, Scalar gain, Rng& rng) {
    const Eigen::Index rows = w.rows(), cols = w.cols();
    const bool tall = rows >= cols;
    Mat<Scalar> g(tall ? rows : cols, tall ? cols : rows);
    for (Eigen::Index j = 0; j < g.cols(); ++j)
        for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = static_cast<Scalar>(rng.normal());
    Eigen::HouseholderQR<Mat<Scalar>> qr(g);
    Mat<Scalar> q = qr.householderQ() * Mat<Scalar>::Identity(g.rows(), g.cols());
    // Sign fix makes the draw uniform over the orthogonal group.
    const Mat<Scalar> r = qr.matrixQR().topRows(g.cols()).template triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < q.cols(); ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    w = gain * (tall ? q : Mat<Scalar>(q.transpose()));
}

}  // namespace detail

/// Orthogonal weights (gain sqrt 2 in the trunks, 0.01 on the action head,
/// 1 on the value head) and zero biases, all drawn from `seed`.
template <typename Scalar>
MlpParams<Scalar> init_params(int obs_dim, int action_num, std::uint64_t seed) {
    if (obs_dim < 1 || action_num < 1) throw ShapeMismatch("network dims must be positive");
    MlpParams<Scalar> p(obs_dim, action_num);
    Rng rng(mix_seed(seed, 0x70706f));
    const Scalar hidden_gain = static_cast<Scalar>(std::sqrt(2.0));
    detail::orthogonal(p.policy1.weight, hidden_gain, rng);
    detail::orthogonal(p.policy2.weight, hidden_gain, rng);
    detail::orthogonal(p.action_head.weight, static_cast<Scalar>(0.01), rng);
    detail::orthogonal(p.value1.weight, hidden_gain, rng);
    detail::orthogonal(p.value2.weight, hidden_gain, rng);
    detail::orthogonal(p.value_head.weight, Scalar(1), rng);
    return p;
}

/// Activations of one batch, kept for the backward pass.
template <typename Scalar>
struct ForwardPass {
    Mat<Scalar> input;        // obs_dim x n
    Mat<Scalar> value_input;  // 2 x n
    Mat<Scalar> p1, p2;       // tanh activations, 64 x n
    Mat<Scalar> v1, v2;
    Mat<Scalar> logits;       // action_num x n
    Vec<Scalar> values;       // n
};

/// First kValueInputs rows of the observations, zero-padded.
template <typename Scalar>
Mat<Scalar> value_features(const Mat<Scalar>& obs) {
    Mat<Scalar> out = Mat<Scalar>::Zero(kValueInputs, obs.cols());
    const Eigen::Index k = std::min<Eigen::Index>(kValueInputs, obs.rows());
    out.topRows(k) = obs.topRows(k);
    return out;
}

/// Batched forward pass; observations are columns. Throws ShapeMismatch.
template <typename Scalar>
ForwardPass<Scalar> forward(const MlpParams<Scalar>& p, const Mat<Scalar>& obs) {
    if (obs.rows() != p.obs_dim) {
        throw ShapeMismatch("observation has " + std::to_string(obs.rows()) + " features, network expects " +
                            std::to_string(p.obs_dim));
    }
    ForwardPass<Scalar> f;
    f.input = obs;
    f.value_input = value_features(obs);
    f.p1 = ((p.policy1.weight * obs).colwise() + p.policy1.bias).array().tanh();
    f.p2 = ((p.policy2.weight * f.p1).colwise() + p.policy2.bias).array().tanh();
    f.logits = (p.action_head.weight * f.p2).colwise() + p.action_head.bias;
    f.v1 = ((p.value1.weight * f.value_input).colwise() + p.value1.bias).array().tanh();
    f.v2 = ((p.value2.weight * f.v1).colwise() + p.value2.bias).array().tanh();
    f.values = ((p.value_head.weight * f.v2).colwise() + p.value_head.bias).row(0).transpose();
    return f;
}

/// Column-wise log-softmax.
template <typename Scalar>
Mat<Scalar> log_softmax(const Mat<Scalar>& logits) {
    Mat<Scalar> out = logits;
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        const Scalar m = out.col(j).maxCoeff();
        const Scalar lse = m + std::log((out.col(j).array() - m).exp().sum());
        out.col(j).array() -= lse;
    }
    return out;
}

}  // namespace arena::ppo
