// SPDX-License-Identifier: Apache-2.0

#include "isacspike/checkpoint.hpp"

#include <bit>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian; big-endian hosts are unsupported");

namespace isacspike {

namespace {

template <typename T>
void put(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw std::runtime_error("checkpoint: truncated file");
    return value;
}

void put_vec(std::ostream& out, const Vec& v) {
    put<std::uint64_t>(out, v.size());
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * 8));
}

Vec get_vec(std::istream& in) {
    const auto n = get<std::uint64_t>(in);
    Vec v(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * 8));
    if (!in) throw std::runtime_error("checkpoint: truncated file");
    return v;
}

void put_network(std::ostream& out, const Network& net) {
    put<std::uint8_t>(out, net.kind == NetKind::spiking ? 0 : 1);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(net.layer_count()));
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(net.weights[l].rows));
        put<std::uint32_t>(out, static_cast<std::uint32_t>(net.weights[l].cols));
        put_vec(out, net.weights[l].a);
        put_vec(out, net.biases[l]);
    }
    put<double>(out, net.lif.leak);
    put<double>(out, net.lif.threshold);
    put<double>(out, net.lif.reset);
    put<double>(out, net.lif.surrogate_eta);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(net.lif.steps));
}

Network get_network(std::istream& in) {
    Network net;
    net.kind = get<std::uint8_t>(in) == 0 ? NetKind::spiking : NetKind::dense;
    const auto layers = get<std::uint32_t>(in);
    for (std::uint32_t l = 0; l < layers; ++l) {
        const auto rows = get<std::uint32_t>(in);
        const auto cols = get<std::uint32_t>(in);
        Mat w(static_cast<int>(rows), static_cast<int>(cols));
        w.a = get_vec(in);
        if (w.a.size() != static_cast<std::size_t>(rows) * cols)
            throw std::runtime_error("checkpoint: weight block size mismatch");
        net.weights.push_back(std::move(w));
        net.biases.push_back(get_vec(in));
    }
    net.lif.leak = get<double>(in);
    net.lif.threshold = get<double>(in);
    net.lif.reset = get<double>(in);
    net.lif.surrogate_eta = get<double>(in);
    net.lif.steps = static_cast<int>(get<std::uint32_t>(in));
    return net;
}

void put_optimizer(std::ostream& out, const Optimizer& opt) {
    put<std::uint8_t>(out, opt.rule == UpdateRule::sgd ? 0 : 1);
    put<double>(out, opt.lr);
    put<double>(out, opt.beta1);
    put<double>(out, opt.beta2);
    put<double>(out, opt.eps);
    put<double>(out, opt.grad_clip);
    put<std::uint64_t>(out, opt.step_count);
    put<std::uint64_t>(out, opt.skipped);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(opt.m.size()));
    for (std::size_t b = 0; b < opt.m.size(); ++b) {
        put_vec(out, opt.m[b]);
        put_vec(out, opt.v[b]);
    }
}

void get_optimizer(std::istream& in, Optimizer& opt) {
    opt.rule = get<std::uint8_t>(in) == 0 ? UpdateRule::sgd : UpdateRule::adam;
    opt.lr = get<double>(in);
    opt.beta1 = get<double>(in);
    opt.beta2 = get<double>(in);
    opt.eps = get<double>(in);
    opt.grad_clip = get<double>(in);
    opt.step_count = get<std::uint64_t>(in);
    opt.skipped = get<std::uint64_t>(in);
    const auto blocks = get<std::uint32_t>(in);
    opt.m.clear();
    opt.v.clear();
    for (std::uint32_t b = 0; b < blocks; ++b) {
        opt.m.push_back(get_vec(in));
        opt.v.push_back(get_vec(in));
    }
}

}  // namespace

void save_checkpoint(const std::string& path, const Trainer& trainer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
    put(out, kCheckpointMagic);
    put(out, kCheckpointVersion);
    put<std::uint64_t>(out, trainer.config().hash());
    put<std::uint8_t>(out, trainer.agent_kind() == AgentKind::spiking ? 0 : 1);
    put<std::uint64_t>(out, trainer.master_seed());
    put<std::uint64_t>(out, trainer.iteration());
    put_network(out, trainer.actor().net);
    put_vec(out, trainer.actor().log_std);
    put_network(out, trainer.critic());
    put_optimizer(out, trainer.actor_optimizer());
    put_optimizer(out, trainer.critic_optimizer());
    const EnergyLedger& ledger = trainer.train_ledger();
    put<double>(out, ledger.ac_ops);
    put<double>(out, ledger.mac_ops);
    put<std::uint64_t>(out, ledger.passes);
    put(out, kCheckpointMagic);
    if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

Trainer load_checkpoint(const std::string& path, const ScenarioConfig& cfg, int obs_dim,
                        int act_dim) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
    if (get<std::uint32_t>(in) != kCheckpointMagic)
        throw std::runtime_error("checkpoint: bad magic in " + path);
    if (get<std::uint32_t>(in) != kCheckpointVersion)
        throw std::runtime_error("checkpoint: unsupported version in " + path);
    const auto hash = get<std::uint64_t>(in);
    if (hash != cfg.hash())
        throw std::runtime_error("checkpoint: config hash mismatch; refusing to resume");
    const AgentKind kind = get<std::uint8_t>(in) == 0 ? AgentKind::spiking : AgentKind::dense;
    const auto seed = get<std::uint64_t>(in);
    const auto iteration = get<std::uint64_t>(in);

    Trainer trainer(cfg, kind, seed, obs_dim, act_dim);
    trainer.set_iteration(iteration);
    trainer.actor().net = get_network(in);
    trainer.actor().log_std = get_vec(in);
    trainer.critic() = get_network(in);
    get_optimizer(in, trainer.actor_optimizer());
    get_optimizer(in, trainer.critic_optimizer());
    trainer.train_ledger().ac_ops = get<double>(in);
    trainer.train_ledger().mac_ops = get<double>(in);
    trainer.train_ledger().passes = get<std::uint64_t>(in);
    if (get<std::uint32_t>(in) != kCheckpointMagic)
        throw std::runtime_error("checkpoint: trailing marker mismatch in " + path);
    return trainer;
}

}  // namespace isacspike
