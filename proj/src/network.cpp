#include <algorithm>
#include <cmath>

#include "gainprint/model.hpp"

namespace gainprint::model {

using dataset::Clip;
using kernels::ConvShape;
using kernels::DenseShape;

void NetworkSpec::validate() const {
    for (std::size_t v : {n, c1, k1, c2, k2, d1, d2})
        if (v == 0) throw ConfigError("network: all layer sizes must be positive");
    if (classes != kNumClasses) throw ConfigError("network: output layer must have 6 classes");
    if (n < k1 + k2 - 1)
        throw ConfigError("network: window length " + std::to_string(n) + " is shorter than k1 + k2 - 1 = " +
                          std::to_string(k1 + k2 - 1));
}

ParamLayout::ParamLayout(const NetworkSpec& s) {
    std::size_t at = 0;
    const auto take = [&](std::size_t size) {
        const std::size_t off = at;
        at += size;
        return off;
    };
    conv1_w = take(s.c1 * s.input_channels() * s.k1);
    conv1_b = take(s.c1);
    conv2_w = take(s.c2 * s.c1 * s.k2);
    conv2_b = take(s.c2);
    dense1_w = take(s.d1 * s.flat_size());
    dense1_b = take(s.d1);
    dense2_w = take(s.d2 * s.d1);
    dense2_b = take(s.d2);
    dense3_w = take(s.classes * s.d2);
    dense3_b = take(s.classes);
    total = at;
}

Normalization Normalization::fit(std::span<const Clip> clips) {
    Normalization out;
    if (clips.empty()) return out;
    for (std::size_t r = 0; r < dataset::kRows; ++r) {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& c : clips)
            for (std::size_t j = 0; j < c.n; ++j) sum += c.at(r, j), ++count;
        const double mean = sum / static_cast<double>(count);
        double sq = 0.0;
        for (const auto& c : clips)
            for (std::size_t j = 0; j < c.n; ++j) sq += (c.at(r, j) - mean) * (c.at(r, j) - mean);
        out.mean[r] = mean;
        out.stddev[r] = std::max(std::sqrt(sq / static_cast<double>(count)), kMinStd);
    }
    return out;
}

Model::Model(const NetworkSpec& s) : spec(s), params(ParamLayout(s).total, 0.0) {}

void init_uniform(Model& model, Rng& rng) {
    const auto& s = model.spec;
    const ParamLayout L(s);
    auto& p = model.params;
    std::fill(p.begin(), p.end(), 0.0);
    const auto glorot = [&](std::size_t offset, std::size_t count, std::size_t fan_in, std::size_t fan_out) {
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (std::size_t i = 0; i < count; ++i) p[offset + i] = rng.uniform(-limit, limit);
    };
    glorot(L.conv1_w, L.conv1_b - L.conv1_w, s.input_channels() * s.k1, s.c1 * s.k1);
    glorot(L.conv2_w, L.conv2_b - L.conv2_w, s.c1 * s.k2, s.c2 * s.k2);
    glorot(L.dense1_w, L.dense1_b - L.dense1_w, s.flat_size(), s.d1);
    glorot(L.dense2_w, L.dense2_b - L.dense2_w, s.d1, s.d2);
    glorot(L.dense3_w, L.dense3_b - L.dense3_w, s.d2, s.classes);
}

std::vector<double> pack_batch(std::span<const Clip> clips, std::size_t n) {
    std::vector<double> out;
    out.reserve(clips.size() * dataset::kRows * n);
    for (const auto& c : clips) {
        if (c.n != n || c.values.size() != dataset::kRows * n)
            throw DomainError("pack_batch: clip window " + std::to_string(c.n) + " does not match model window " +
                              std::to_string(n));
        out.insert(out.end(), c.values.begin(), c.values.end());
    }
    return out;
}

std::vector<double> pack_batch(std::span<const Clip> clips, std::span<const std::size_t> indices, std::size_t n) {
    std::vector<double> out;
    out.reserve(indices.size() * dataset::kRows * n);
    for (std::size_t i : indices) {
        const auto& c = clips[i];
        if (c.n != n || c.values.size() != dataset::kRows * n)
            throw DomainError("pack_batch: clip window " + std::to_string(c.n) + " does not match model window " +
                              std::to_string(n));
        out.insert(out.end(), c.values.begin(), c.values.end());
    }
    return out;
}

namespace {

struct Activations {
    std::vector<double> x, a1, a2, h1, h2, logits, probs;
};

struct Shapes {
    ConvShape conv1, conv2;
    DenseShape dense1, dense2, dense3;
};

Shapes shapes_for(const NetworkSpec& s, std::size_t batch) {
    Shapes sh;
    sh.conv1 = {batch, s.input_channels(), s.n, s.c1, s.k1};
    sh.conv2 = {batch, s.c1, s.conv1_len(), s.c2, s.k2};
    sh.dense1 = {batch, s.flat_size(), s.d1};
    sh.dense2 = {batch, s.d1, s.d2};
    sh.dense3 = {batch, s.d2, s.classes};
    return sh;
}

std::span<const double> slice(const std::vector<double>& p, std::size_t from, std::size_t to) {
    return std::span<const double>(p).subspan(from, to - from);
}

void run_forward(const Model& model, std::span<const double> input, std::size_t batch, const kernels::Kernels& k,
                 Activations& act) {
    const auto& s = model.spec;
    const std::size_t width = dataset::kRows * s.n;
    if (input.size() != batch * width)
        throw DomainError("forward: input holds " + std::to_string(input.size()) + " values, expected " +
                          std::to_string(batch * width));
    if (model.params.size() != ParamLayout(s).total) throw DomainError("forward: parameter vector size mismatch");

    const ParamLayout L(s);
    const Shapes sh = shapes_for(s, batch);
    const auto& p = model.params;

    act.x.resize(input.size());
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t r = 0; r < dataset::kRows; ++r)
            for (std::size_t j = 0; j < s.n; ++j) {
                const std::size_t i = b * width + r * s.n + j;
                act.x[i] = (input[i] - model.norm.mean[r]) / model.norm.stddev[r];
            }

    act.a1.resize(sh.conv1.output_size());
    k.conv1d_forward(sh.conv1, act.x, slice(p, L.conv1_w, L.conv1_b), slice(p, L.conv1_b, L.conv2_w), act.a1);
    k.relu_forward(act.a1);
    act.a2.resize(sh.conv2.output_size());
    k.conv1d_forward(sh.conv2, act.a1, slice(p, L.conv2_w, L.conv2_b), slice(p, L.conv2_b, L.dense1_w), act.a2);
    k.relu_forward(act.a2);
    act.h1.resize(batch * s.d1);
    k.dense_forward(sh.dense1, act.a2, slice(p, L.dense1_w, L.dense1_b), slice(p, L.dense1_b, L.dense2_w), act.h1);
    k.relu_forward(act.h1);
    act.h2.resize(batch * s.d2);
    k.dense_forward(sh.dense2, act.h1, slice(p, L.dense2_w, L.dense2_b), slice(p, L.dense2_b, L.dense3_w), act.h2);
    k.relu_forward(act.h2);
    act.logits.resize(batch * s.classes);
    k.dense_forward(sh.dense3, act.h2, slice(p, L.dense3_w, L.dense3_b), slice(p, L.dense3_b, L.total), act.logits);
    act.probs.resize(act.logits.size());
    k.softmax_rows(act.logits, act.probs, batch, s.classes);
}

}  // namespace

std::vector<double> forward(const Model& model, std::span<const double> input, std::size_t batch,
                            const kernels::Kernels& k) {
    Activations act;
    run_forward(model, input, batch, k, act);
    return std::move(act.probs);
}

std::vector<double> forward(const Model& model, std::span<const Clip> clips, const kernels::Kernels& k) {
    const auto input = pack_batch(clips, model.spec.n);
    return forward(model, input, clips.size(), k);
}

double cross_entropy(std::span<const double> probs, std::span<const int> labels, std::size_t classes) {
    if (labels.empty()) throw DomainError("cross_entropy: empty batch");
    if (probs.size() != labels.size() * classes) throw DomainError("cross_entropy: shape mismatch");
    double sum = 0.0;
    for (std::size_t b = 0; b < labels.size(); ++b) {
        const int y = labels[b];
        if (y < 0 || static_cast<std::size_t>(y) >= classes) throw DomainError("cross_entropy: label out of range");
        sum += -std::log(std::max(probs[b * classes + static_cast<std::size_t>(y)], 1e-12));
    }
    return sum / static_cast<double>(labels.size());
}

std::vector<double> logit_gradient(std::span<const double> probs, std::span<const int> labels, std::size_t classes) {
    const std::size_t batch = labels.size();
    std::vector<double> g(probs.begin(), probs.end());
    const double scale = 1.0 / static_cast<double>(batch);
    for (std::size_t b = 0; b < batch; ++b) {
        g[b * classes + static_cast<std::size_t>(labels[b])] -= 1.0;
        for (std::size_t c = 0; c < classes; ++c) g[b * classes + c] *= scale;
    }
    return g;
}

double backward(const Model& model, std::span<const double> input, std::span<const int> labels, std::size_t batch,
                std::span<double> grads, const kernels::Kernels& k) {
    const auto& s = model.spec;
    const ParamLayout L(s);
    if (labels.size() != batch) throw DomainError("backward: label count does not match batch");
    if (grads.size() != L.total) throw DomainError("backward: gradient buffer size mismatch");

    Activations act;
    run_forward(model, input, batch, k, act);
    const double loss = cross_entropy(act.probs, labels, s.classes);

    const Shapes sh = shapes_for(s, batch);
    const auto& p = model.params;
    const auto g = [&](std::size_t from, std::size_t to) { return grads.subspan(from, to - from); };

    const auto dlogits = logit_gradient(act.probs, labels, s.classes);
    std::vector<double> dh2(act.h2.size());
    k.dense_backward(sh.dense3, act.h2, slice(p, L.dense3_w, L.dense3_b), dlogits, dh2, g(L.dense3_w, L.dense3_b),
                     g(L.dense3_b, L.total));
    k.relu_backward(act.h2, dh2);
    std::vector<double> dh1(act.h1.size());
    k.dense_backward(sh.dense2, act.h1, slice(p, L.dense2_w, L.dense2_b), dh2, dh1, g(L.dense2_w, L.dense2_b),
                     g(L.dense2_b, L.dense3_w));
    k.relu_backward(act.h1, dh1);
    std::vector<double> da2(act.a2.size());
    k.dense_backward(sh.dense1, act.a2, slice(p, L.dense1_w, L.dense1_b), dh1, da2, g(L.dense1_w, L.dense1_b),
                     g(L.dense1_b, L.dense2_w));
    k.relu_backward(act.a2, da2);
    std::vector<double> da1(act.a1.size());
    k.conv1d_backward(sh.conv2, act.a1, slice(p, L.conv2_w, L.conv2_b), da2, da1, g(L.conv2_w, L.conv2_b),
                      g(L.conv2_b, L.dense1_w));
    k.relu_backward(act.a1, da1);
    k.conv1d_backward(sh.conv1, act.x, slice(p, L.conv1_w, L.conv1_b), da1, {}, g(L.conv1_w, L.conv1_b),
                      g(L.conv1_b, L.conv2_w));
    return loss;
}

std::vector<int> argmax_rows(std::span<const double> probs, std::size_t classes) {
    const std::size_t rows = probs.size() / classes;
    std::vector<int> out(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < classes; ++c)
            if (probs[r * classes + c] > probs[r * classes + best]) best = c;
        out[r] = static_cast<int>(best);
    }
    return out;
}

std::vector<ActivityLabel> predict(const Model& model, std::span<const Clip> clips, const kernels::Kernels& k) {
    if (clips.empty()) return {};
    const auto probs = forward(model, clips, k);
    const auto codes = argmax_rows(probs, model.spec.classes);
    std::vector<ActivityLabel> out(codes.size());
    std::transform(codes.begin(), codes.end(), out.begin(), [](int c) { return static_cast<ActivityLabel>(c); });
    return out;
}

}  // namespace gainprint::model
