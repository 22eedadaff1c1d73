#include "sdnsync/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdnsync {

template <typename T>
Mlp<T>::Mlp(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2) throw std::invalid_argument("Mlp needs at least an input and an output layer");
    if (std::find(sizes_.begin(), sizes_.end(), 0u) != sizes_.end())
        throw std::invalid_argument("Mlp layer sizes must be positive");
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        w_offset_.push_back(offset);
        offset += sizes_[l] * sizes_[l + 1];
        b_offset_.push_back(offset);
        offset += sizes_[l + 1];
    }
    params_.assign(offset, T(0));
}

template <typename T>
void Mlp<T>::init_fan_in(Rng& rng) {
    for (std::size_t l = 0; l < num_layers(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
        for (auto& w : weights(l)) w = static_cast<T>(uniform(rng, -bound, bound));
        for (auto& b : bias(l)) b = static_cast<T>(uniform(rng, -bound, bound));
    }
}

template <typename T>
void Mlp<T>::check_input(std::span<const T> input, std::size_t batch) const {
    if (input.size() != batch * input_dim())
        throw std::invalid_argument("Mlp::forward: input has " + std::to_string(input.size()) + " values, expected " +
                                    std::to_string(batch * input_dim()));
}

template <typename T>
void Mlp<T>::forward_hidden(std::span<const T> input, std::size_t batch, Workspace& ws, kernels::Backend be) const {
    const std::size_t layers = num_layers();
    ws.batch = batch;
    ws.activations.resize(layers + 1);
    ws.activations[0].assign(input.begin(), input.end());
    for (std::size_t l = 0; l + 1 < layers; ++l) {
        auto& y = ws.activations[l + 1];
        y.resize(batch * sizes_[l + 1]);
        kernels::affine_forward<T>(be, ws.activations[l], weights(l), bias(l), y, batch, sizes_[l], sizes_[l + 1]);
        kernels::use_omp(be) ? kernels::omp::relu<T>(y) : kernels::serial::relu<T>(y);
    }
}

template <typename T>
std::span<const T> Mlp<T>::forward(std::span<const T> input, std::size_t batch, Workspace& ws,
                                   kernels::Backend be) const {
    check_input(input, batch);
    forward_hidden(input, batch, ws, be);
    const std::size_t l = num_layers() - 1;
    auto& y = ws.activations[l + 1];
    y.resize(batch * sizes_[l + 1]);
    kernels::affine_forward<T>(be, ws.activations[l], weights(l), bias(l), y, batch, sizes_[l], sizes_[l + 1]);
    return y;
}

template <typename T>
std::vector<T> Mlp<T>::forward(std::span<const T> input) const {
    Workspace ws;
    const auto out = forward(input, 1, ws, kernels::Backend::Serial);
    return {out.begin(), out.end()};
}

template <typename T>
std::span<const T> Mlp<T>::forward_selected(std::span<const T> input, std::size_t batch,
                                            std::span<const std::size_t> columns, Workspace& ws,
                                            kernels::Backend be) const {
    check_input(input, batch);
    if (columns.size() != batch) throw std::invalid_argument("Mlp::forward_selected: one column per row");
    forward_hidden(input, batch, ws, be);
    const std::size_t l = num_layers() - 1, in = sizes_[l], out = sizes_[l + 1];
    const auto w = weights(l);
    const auto b = bias(l);
    const auto& h = ws.activations[l];
    auto& y = ws.activations[l + 1];
    y.resize(batch);
    for (std::size_t j = 0; j < batch; ++j)
        if (columns[j] >= out) throw std::out_of_range("Mlp::forward_selected: column out of range");
    // G rows at a time, each still summed in ascending i.
    constexpr std::size_t G = 16;
    for (std::size_t j0 = 0; j0 < batch; j0 += G) {
        const std::size_t g = std::min(G, batch - j0);
        T acc[G];
        for (std::size_t r = 0; r < g; ++r) acc[r] = b[columns[j0 + r]];
        for (std::size_t i = 0; i < in; ++i)
            for (std::size_t r = 0; r < g; ++r) acc[r] += h[(j0 + r) * in + i] * w[i * out + columns[j0 + r]];
        for (std::size_t r = 0; r < g; ++r) y[j0 + r] = acc[r];
    }
    return y;
}

template <typename T>
void Mlp<T>::backward(Workspace& ws, std::span<const T> d_output, std::span<T> grad, kernels::Backend be) const {
    const std::size_t layers = num_layers();
    const std::size_t batch = ws.batch;
    if (ws.activations.size() != layers + 1) throw std::logic_error("Mlp::backward without a forward pass");
    if (d_output.size() != batch * output_dim()) throw std::invalid_argument("Mlp::backward: bad output gradient size");
    if (grad.size() != params_.size()) throw std::invalid_argument("Mlp::backward: bad gradient buffer size");

    std::fill(grad.begin(), grad.end(), T(0));
    ws.deltas.resize(layers + 1);
    ws.deltas[layers].assign(d_output.begin(), d_output.end());
    backward_from(ws, layers, grad, be);
}

template <typename T>
void Mlp<T>::backward_selected(Workspace& ws, std::span<const std::size_t> columns, std::span<const T> d_selected,
                               std::span<T> grad, kernels::Backend be) const {
    const std::size_t layers = num_layers();
    const std::size_t batch = ws.batch;
    if (ws.activations.size() != layers + 1) throw std::logic_error("Mlp::backward without a forward pass");
    if (columns.size() != batch || d_selected.size() != batch)
        throw std::invalid_argument("Mlp::backward_selected: one column and gradient per row");
    if (grad.size() != params_.size()) throw std::invalid_argument("Mlp::backward: bad gradient buffer size");

    std::fill(grad.begin(), grad.end(), T(0));
    ws.deltas.resize(layers + 1);
    const std::size_t l = layers - 1, in = sizes_[l], out = sizes_[l + 1];
    const auto& h = ws.activations[l];
    auto gw = grad.subspan(w_offset_[l], in * out);
    auto gb = grad.subspan(b_offset_[l], out);
    for (std::size_t j = 0; j < batch; ++j) {
        const std::size_t a = columns[j];
        const T d = d_selected[j];
        for (std::size_t i = 0; i < in; ++i) gw[i * out + a] += h[j * in + i] * d;
        gb[a] += d;
    }
    if (l == 0) return;
    const auto w = weights(l);
    auto& dx = ws.deltas[l];
    dx.resize(batch * in);
    for (std::size_t j = 0; j < batch; ++j)
        for (std::size_t i = 0; i < in; ++i) dx[j * in + i] = d_selected[j] * w[i * out + columns[j]];
    kernels::use_omp(be) ? kernels::omp::relu_backward<T>(ws.activations[l], dx)
                         : kernels::serial::relu_backward<T>(ws.activations[l], dx);
    backward_from(ws, l, grad, be);
}

// Layers below `layer`, whose output delta is already in ws.deltas[layer].
template <typename T>
void Mlp<T>::backward_from(Workspace& ws, std::size_t layer, std::span<T> grad, kernels::Backend be) const {
    const std::size_t batch = ws.batch;
    for (std::size_t l = layer; l-- > 0;) {
        const std::size_t in = sizes_[l], out = sizes_[l + 1];
        kernels::affine_backward_params<T>(be, ws.activations[l], ws.deltas[l + 1],
                                           grad.subspan(w_offset_[l], in * out), grad.subspan(b_offset_[l], out),
                                           batch, in, out);
        if (l == 0) break;
        auto& dx = ws.deltas[l];
        dx.resize(batch * in);
        ws.scratch.resize(in * out);
        kernels::affine_backward_input<T>(be, ws.deltas[l + 1], weights(l), dx, ws.scratch, batch, in, out);
        kernels::use_omp(be) ? kernels::omp::relu_backward<T>(ws.activations[l], dx)
                             : kernels::serial::relu_backward<T>(ws.activations[l], dx);
    }
}

template <typename T>
void adam_update(std::span<T> params, std::span<const T> grad, AdamState<T>& state, const AdamConfig& cfg) {
    if (state.m.size() != params.size()) {
        state.m.assign(params.size(), T(0));
        state.v.assign(params.size(), T(0));
        state.step = 0;
    }
    ++state.step;
    const T b1 = static_cast<T>(cfg.beta1);
    const T b2 = static_cast<T>(cfg.beta2);
    const T c1 = static_cast<T>(1.0 / (1.0 - std::pow(cfg.beta1, static_cast<double>(state.step))));
    const T c2 = static_cast<T>(1.0 / (1.0 - std::pow(cfg.beta2, static_cast<double>(state.step))));
    const T lr = static_cast<T>(cfg.learning_rate);
    const T eps = static_cast<T>(cfg.epsilon);
    for (std::size_t k = 0; k < params.size(); ++k) {
        const T g = grad[k];
        state.m[k] = b1 * state.m[k] + (T(1) - b1) * g;
        state.v[k] = b2 * state.v[k] + (T(1) - b2) * g * g;
        params[k] -= lr * (state.m[k] * c1) / (std::sqrt(state.v[k] * c2) + eps);
    }
}

template <typename T>
void soft_update(std::span<T> target, std::span<const T> main, double kappa) {
    if (target.size() != main.size()) throw std::invalid_argument("soft_update: shape mismatch");
    if (kappa == 1.0) {
        std::copy(main.begin(), main.end(), target.begin());
        return;
    }
    const T k = static_cast<T>(kappa);
    for (std::size_t i = 0; i < target.size(); ++i) target[i] += k * (main[i] - target[i]);
}

template class Mlp<float>;
template class Mlp<double>;
template void adam_update<float>(std::span<float>, std::span<const float>, AdamState<float>&, const AdamConfig&);
template void adam_update<double>(std::span<double>, std::span<const double>, AdamState<double>&, const AdamConfig&);
template void soft_update<float>(std::span<float>, std::span<const float>, double);
template void soft_update<double>(std::span<double>, std::span<const double>, double);

}  // namespace sdnsync
