#include "arena/ppo/train.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include "arena/core/assets.hpp"
#include "arena/eval/evaluation.hpp"

namespace arena::ppo {

namespace {

constexpr std::uint64_t kEpisodeStream = 0x70706f2d6570;
constexpr std::uint64_t kSampleStream = 0x70706f2d736d;
constexpr std::uint64_t kGreedyStream = 0x70706f2d6772;

template <typename Scalar>
struct Episode {
    std::vector<Vec<Scalar>> obs;
    std::vector<int> actions;
    std::vector<Scalar> rewards;
    std::vector<Scalar> log_probs;
    Vec<Scalar> final_obs;
    bool bootstrap = false;  // truncated: value of final_obs continues the return
    double total = 0.0;
};

template <typename Scalar>
int sample(const Vec<Scalar>& logits, Rng& rng, Scalar& log_prob) {
    const Scalar m = logits.maxCoeff();
    const Vec<Scalar> w = (logits.array() - m).exp();
    const Scalar z = w.sum();
    Scalar u = static_cast<Scalar>(rng.uniform01()) * z;
    int a = 0;
    for (; a + 1 < logits.size(); ++a) {
        if (u < w(a)) break;
        u -= w(a);
    }
    log_prob = logits(a) - m - std::log(z);
    return a;
}

template <typename Scalar>
Vec<Scalar> scaled_features(EnvId env, const Observation& obs) {
    return features(env, obs).cast<Scalar>();
}

template <typename Scalar>
Vec<Scalar> single_logits(const MlpParams<Scalar>& p, const Vec<Scalar>& x) {
    const Vec<Scalar> h1 = (p.policy1.weight * x + p.policy1.bias).array().tanh();
    const Vec<Scalar> h2 = (p.policy2.weight * h1 + p.policy2.bias).array().tanh();
    return p.action_head.weight * h2 + p.action_head.bias;
}

template <typename Scalar>
Episode<Scalar> collect(const MlpParams<Scalar>& p, EnvId env, std::uint64_t seed, int step_cap, Rng& rng) {
    Episode<Scalar> ep;
    auto [e, obs] = reset(env, seed, step_cap);
    while (true) {
        Vec<Scalar> x = scaled_features<Scalar>(env, obs);
        Scalar lp = 0;
        const int a = sample(single_logits(p, x), rng, lp);
        const auto r = e.step(to_env_action(env, a));
        ep.obs.push_back(std::move(x));
        ep.actions.push_back(a);
        ep.rewards.push_back(static_cast<Scalar>(r.reward));
        ep.log_probs.push_back(lp);
        ep.total += r.reward;
        obs = r.observation;
        if (r.terminated || r.truncated) {
            ep.final_obs = scaled_features<Scalar>(env, obs);
            ep.bootstrap = !r.terminated;
            break;
        }
    }
    return ep;
}

template <typename Scalar>
Mat<Scalar> stack(const std::vector<Vec<Scalar>>& cols, int dim) {
    Mat<Scalar> m(dim, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = cols[i];
    return m;
}

template <typename Scalar>
RolloutBatch<Scalar> build_batch(const MlpParams<Scalar>& p, EnvId env, const std::vector<Episode<Scalar>>& episodes,
                                 const PpoConfig& cfg) {
    const int dim = feature_dim(env);
    std::size_t n = 0;
    for (const auto& ep : episodes) n += ep.actions.size();
    RolloutBatch<Scalar> b;
    b.observations.resize(dim, static_cast<Eigen::Index>(n));
    b.actions.reserve(n);
    b.rewards.resize(static_cast<Eigen::Index>(n));
    b.values.resize(static_cast<Eigen::Index>(n));
    b.log_probs.resize(static_cast<Eigen::Index>(n));
    b.advantages.resize(static_cast<Eigen::Index>(n));
    b.returns.resize(static_cast<Eigen::Index>(n));
    Eigen::Index at = 0;
    for (const auto& ep : episodes) {
        const auto len = static_cast<Eigen::Index>(ep.actions.size());
        const Mat<Scalar> obs = stack(ep.obs, dim);
        const Vec<Scalar> values = forward(p, obs).values;
        Scalar last = 0;
        if (ep.bootstrap) last = forward(p, Mat<Scalar>(ep.final_obs)).values(0);
        const Vec<Scalar> rewards = Eigen::Map<const Vec<Scalar>>(ep.rewards.data(), len);
        const Vec<Scalar> adv =
            gae<Scalar>(rewards, values, last, static_cast<Scalar>(cfg.gamma), static_cast<Scalar>(cfg.lambda));
        b.observations.middleCols(at, len) = obs;
        b.actions.insert(b.actions.end(), ep.actions.begin(), ep.actions.end());
        b.rewards.segment(at, len) = rewards;
        b.values.segment(at, len) = values;
        b.log_probs.segment(at, len) = Eigen::Map<const Vec<Scalar>>(ep.log_probs.data(), len);
        b.advantages.segment(at, len) = adv;
        b.returns.segment(at, len) = adv + values;
        at += len;
    }
    b.advantages = normalize_advantages(b.advantages);
    b.validate();
    return b;
}

template <typename Scalar>
RolloutBatch<Scalar> select(const RolloutBatch<Scalar>& b, const std::vector<Eigen::Index>& idx) {
    const auto n = static_cast<Eigen::Index>(idx.size());
    RolloutBatch<Scalar> s;
    s.observations.resize(b.observations.rows(), n);
    s.actions.resize(idx.size());
    s.rewards.resize(n);
    s.values.resize(n);
    s.log_probs.resize(n);
    s.advantages.resize(n);
    s.returns.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index j = idx[static_cast<std::size_t>(i)];
        s.observations.col(i) = b.observations.col(j);
        s.actions[static_cast<std::size_t>(i)] = b.actions[static_cast<std::size_t>(j)];
        s.rewards(i) = b.rewards(j);
        s.values(i) = b.values(j);
        s.log_probs(i) = b.log_probs(j);
        s.advantages(i) = b.advantages(j);
        s.returns(i) = b.returns(j);
    }
    return s;
}

double median_of(std::vector<double> xs) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size() / 2;
    return xs.size() % 2 == 1 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(10) << x;
    return os.str();
}

}  // namespace

std::vector<PpoConfig> full_grid(const PpoConfig& base) {
    std::vector<PpoConfig> out;
    for (double lr : kGridLr)
        for (double gamma : kGridGamma)
            for (double ent : kGridEntCoef)
                for (int repeat : kGridRepeat) {
                    PpoConfig c = base;
                    c.lr = lr;
                    c.gamma = gamma;
                    c.ent_coef = ent;
                    c.repeat = repeat;
                    out.push_back(c);
                }
    return out;
}

PpoConfig tuned_config(EnvId env) {
    PpoConfig c;
    c.lr = 1e-3;
    c.gamma = 0.99;
    c.ent_coef = 0.01;
    c.repeat = 10;
    if (env == EnvId::cliffwalking) {
        // Sparse, long-horizon credit: shorter discount and larger batches.
        c.gamma = 0.95;
        c.minibatch = 1024;
        c.stop_on_greedy = true;
    }
    return c;
}

int feature_dim(EnvId env) {
    switch (env) {
        case EnvId::cartpole: return 4;
        case EnvId::taxi: return 4;
        case EnvId::blackjack: return 3;
        default: return 2;
    }
}

Vec<double> features(EnvId env, const Observation& obs) {
    require_observation(env, obs);
    Vec<double> x(feature_dim(env));
    switch (env) {
        case EnvId::cartpole: {
            const auto& o = std::get<CartPoleObs>(obs);
            x << o.x / 2.4, o.v / 2.0, o.theta / 0.2095, o.omega / 2.0;
            break;
        }
        case EnvId::mountaincar:
        case EnvId::mountaincar_continuous: {
            const auto& o = std::get<MountainCarObs>(obs);
            x << (o.x + 0.3) / 0.9, o.v / 0.07;
            break;
        }
        case EnvId::cliffwalking: {
            const auto& o = std::get<CliffWalkingObs>(obs);
            x << o.row / 1.5 - 1.0, o.col / 5.5 - 1.0;
            break;
        }
        case EnvId::taxi: {
            const auto& o = std::get<TaxiObs>(obs);
            x << o.row / 2.0 - 1.0, o.col / 2.0 - 1.0, static_cast<int>(o.passenger) / 2.0 - 1.0,
                static_cast<int>(o.destination) / 1.5 - 1.0;
            break;
        }
        case EnvId::blackjack: {
            const auto& o = std::get<BlackjackObs>(obs);
            x << (o.player_sum - 4) / 13.5 - 1.0, (o.dealer_showing - 1) / 4.5 - 1.0, o.usable_ace ? 1.0 : -1.0;
            break;
        }
        case EnvId::frozenlake: {
            const auto& o = std::get<FrozenLakeObs>(obs);
            x << (o.cell / 4) / 1.5 - 1.0, (o.cell % 4) / 1.5 - 1.0;
            break;
        }
    }
    return x;
}

int action_count(EnvId env) {
    const auto space = action_space(env);
    return space.is_continuous ? 3 : space.count;
}

Action to_env_action(EnvId env, int choice) {
    if (action_space(env).is_continuous) return continuous(static_cast<double>(choice - 1));
    return discrete(choice);
}

template <typename Scalar>
TrainResult<Scalar> train_as(EnvId env, const PpoConfig& cfg) {
    const double target = cfg.target ? *cfg.target : eval::default_thresholds().at(env).sota;
    TrainResult<Scalar> result;
    result.params = init_params<Scalar>(feature_dim(env), action_count(env), cfg.seed);
    auto& params = result.params;
    Adam<Scalar> adam(params, cfg.lr);
    Rng rng(mix_seed(cfg.seed, kSampleStream));
    const LossWeights weights{cfg.clip_eps, cfg.ent_coef};
    result.best_rolling_mean = -std::numeric_limits<double>::infinity();
    MlpParams<Scalar> grad = params.zeros_like();
    int greedy_streak = 0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<Episode<Scalar>> episodes;
        episodes.reserve(static_cast<std::size_t>(cfg.traj_per_epoch));
        double sum = 0.0;
        for (int i = 0; i < cfg.traj_per_epoch; ++i) {
            const auto seed = mix_seed(cfg.seed ^ kEpisodeStream, static_cast<std::uint64_t>(epoch),
                                       static_cast<std::uint64_t>(i));
            episodes.push_back(collect(params, env, seed, cfg.step_cap, rng));
            sum += episodes.back().total;
        }
        const auto batch = build_batch(params, env, episodes, cfg);

        EpochStats stats;
        stats.epoch = epoch;
        stats.mean_return = sum / cfg.traj_per_epoch;
        std::vector<Eigen::Index> order(static_cast<std::size_t>(batch.size()));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        const auto mb = static_cast<std::size_t>(std::max(1, cfg.minibatch));
        int steps = 0;
        for (int pass = 0; pass < cfg.repeat; ++pass) {
            for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
            for (std::size_t start = 0; start < order.size(); start += mb) {
                const std::vector<Eigen::Index> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                                    order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), start + mb)));
                const auto parts = ppo_loss(params, select(batch, idx), weights, &grad);
                adam.step(params, grad);
                stats.policy_loss += parts.policy;
                stats.value_loss += parts.value;
                stats.entropy += parts.entropy;
                ++steps;
            }
        }
        if (steps > 0) {
            stats.policy_loss /= steps;
            stats.value_loss /= steps;
            stats.entropy /= steps;
        }
        stats.greedy_return = greedy_return(params, env, mix_seed(cfg.seed, kGreedyStream, static_cast<std::uint64_t>(epoch)), cfg.step_cap);
        greedy_streak = stats.greedy_return >= target ? greedy_streak + 1 : 0;
        result.curve.push_back(stats);
        if (cfg.stop_on_greedy && greedy_streak >= kRollingWindow) {
            result.reached_target = true;
            break;
        }

        if (static_cast<int>(result.curve.size()) >= kRollingWindow) {
            const double rolling = final_return(result.curve);
            result.best_rolling_mean = std::max(result.best_rolling_mean, rolling);
            if (rolling >= target) {
                result.reached_target = true;
                break;
            }
        }
    }
    if (static_cast<int>(result.curve.size()) < kRollingWindow) result.best_rolling_mean = final_return(result.curve);
    return result;
}

template <typename Scalar>
double greedy_return(const MlpParams<Scalar>& params, EnvId env, std::uint64_t seed, int step_cap) {
    auto [e, obs] = reset(env, seed, step_cap);
    double total = 0.0;
    while (!e.done()) {
        Eigen::Index a = 0;
        single_logits(params, scaled_features<Scalar>(env, obs)).maxCoeff(&a);
        const auto r = e.step(to_env_action(env, static_cast<int>(a)));
        total += r.reward;
        obs = r.observation;
    }
    return total;
}

double final_return(const std::vector<EpochStats>& curve) {
    if (curve.empty()) return 0.0;
    const std::size_t k = std::min<std::size_t>(kRollingWindow, curve.size());
    double sum = 0.0;
    for (std::size_t i = curve.size() - k; i < curve.size(); ++i) sum += curve[i].mean_return;
    return sum / static_cast<double>(k);
}

GridResult grid_search(EnvId env, const std::vector<PpoConfig>& grid, const std::vector<std::uint64_t>& seeds,
                       int threads) {
    GridResult out;
    if (grid.empty()) return out;
    out.rows.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.rows[i].config = grid[i];
        out.rows[i].finals.resize(seeds.size());
    }
    const std::size_t jobs = grid.size() * seeds.size();
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs; j = next++) {
            const std::size_t c = j / seeds.size(), s = j % seeds.size();
            PpoConfig cfg = grid[c];
            cfg.seed = seeds[s];
            out.rows[c].finals[s] = final_return(train(env, cfg).curve);
        }
    };
    std::vector<std::jthread> pool;
    for (int t = 0; t < std::max(1, threads); ++t) pool.emplace_back(worker);
    pool.clear();

    std::size_t best = 0;
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
        out.rows[i].median = median_of(out.rows[i].finals);
        if (out.rows[i].median > out.rows[best].median) best = i;
    }
    out.best = out.rows[best].config;
    return out;
}

std::string grid_csv(const GridResult& result) {
    std::ostringstream os;
    os << "lr,gamma,ent_coef,repeat,median_final_return,finals\n";
    for (const auto& row : result.rows) {
        os << fmt(row.config.lr) << ',' << fmt(row.config.gamma) << ',' << fmt(row.config.ent_coef) << ','
           << row.config.repeat << ',' << fmt(row.median) << ',';
        for (std::size_t i = 0; i < row.finals.size(); ++i) os << (i ? ";" : "") << fmt(row.finals[i]);
        os << '\n';
    }
    return os.str();
}

std::string curve_csv(const std::vector<EpochStats>& curve) {
    std::ostringstream os;
    os << "epoch,mean_return,policy_loss,value_loss,entropy,greedy_return\n";
    for (const auto& e : curve) {
        os << e.epoch << ',' << fmt(e.mean_return) << ',' << fmt(e.policy_loss) << ',' << fmt(e.value_loss) << ','
           << fmt(e.entropy) << ',' << fmt(e.greedy_return) << '\n';
    }
    return os.str();
}

std::string describe_config(const PpoConfig& cfg) {
    std::ostringstream os;
    os << "lr=" << fmt(cfg.lr) << "\ngamma=" << fmt(cfg.gamma) << "\nent_coef=" << fmt(cfg.ent_coef)
       << "\nrepeat=" << cfg.repeat << "\nstop_on_greedy=" << (cfg.stop_on_greedy ? 1 : 0) << "\nclip_eps=" << fmt(cfg.clip_eps) << "\nlambda=" << fmt(cfg.lambda)
       << "\nepochs=" << cfg.epochs << "\ntraj_per_epoch=" << cfg.traj_per_epoch << "\nminibatch=" << cfg.minibatch
       << "\nadam_betas=0.9,0.999\nstep_cap=" << cfg.step_cap << "\nseed=" << cfg.seed << '\n';
    if (cfg.target) os << "target=" << fmt(*cfg.target) << '\n';
    return os.str();
}

template <typename Scalar>
void save_checkpoint(const std::filesystem::path& path, const MlpParams<Scalar>& params) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write checkpoint " + path.string());
    out << "arena-ppo-checkpoint 1\n" << params.obs_dim << ' ' << params.action_num << '\n';
    out << std::setprecision(17);
    params.zip([&out](const Dense<Scalar>& d) {
        out << d.weight.rows() << ' ' << d.weight.cols() << '\n';
        for (Eigen::Index i = 0; i < d.weight.rows(); ++i) {
            for (Eigen::Index j = 0; j < d.weight.cols(); ++j) out << (j ? " " : "") << d.weight(i, j);
            out << '\n';
        }
        for (Eigen::Index i = 0; i < d.bias.size(); ++i) out << (i ? " " : "") << d.bias(i);
        out << '\n';
    });
    if (!out) throw IoError("failed writing checkpoint " + path.string());
}

template <typename Scalar>
MlpParams<Scalar> load_checkpoint(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    std::string magic;
    int version = 0, obs_dim = 0, action_num = 0;
    if (!(in >> magic >> version) || magic != "arena-ppo-checkpoint" || version != 1) {
        throw FormatError("not a PPO checkpoint: " + path.string());
    }
    if (!(in >> obs_dim >> action_num) || obs_dim < 1 || action_num < 1) {
        throw FormatError("bad checkpoint dims in " + path.string());
    }
    MlpParams<Scalar> p(obs_dim, action_num);
    p.zip([&](Dense<Scalar>& d) {
        Eigen::Index rows = 0, cols = 0;
        if (!(in >> rows >> cols) || rows != d.weight.rows() || cols != d.weight.cols()) {
            throw FormatError("checkpoint tensor shape mismatch in " + path.string());
        }
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) in >> d.weight(i, j);
        for (Eigen::Index i = 0; i < d.bias.size(); ++i) in >> d.bias(i);
        if (!in) throw FormatError("truncated checkpoint " + path.string());
    });
    return p;
}

template TrainResult<float> train_as<float>(EnvId, const PpoConfig&);
template TrainResult<double> train_as<double>(EnvId, const PpoConfig&);
template double greedy_return<float>(const MlpParams<float>&, EnvId, std::uint64_t, int);
template double greedy_return<double>(const MlpParams<double>&, EnvId, std::uint64_t, int);
template void save_checkpoint<float>(const std::filesystem::path&, const MlpParams<float>&);
template void save_checkpoint<double>(const std::filesystem::path&, const MlpParams<double>&);
template MlpParams<float> load_checkpoint<float>(const std::filesystem::path&);
template MlpParams<double> load_checkpoint<double>(const std::filesystem::path&);

}  // namespace arena::ppo
