#pragma once

// Fully connected ReLU network with a linear head, plus Adam.

#include <cstddef>
#include <span>
#include <vector>

#include "sdnsync/kernels.hpp"
#include "sdnsync/rng.hpp"

namespace sdnsync {

template <typename T>
class Mlp {
public:
    using value_type = T;

    Mlp() = default;
    /// Sizes from input to output; all parameters start at zero.
    explicit Mlp(std::vector<std::size_t> layer_sizes);

    const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
    std::size_t num_layers() const { return sizes_.empty() ? 0 : sizes_.size() - 1; }
    std::size_t input_dim() const { return sizes_.front(); }
    std::size_t output_dim() const { return sizes_.back(); }
    std::size_t num_parameters() const { return params_.size(); }

    std::span<T> parameters() { return params_; }
    std::span<const T> parameters() const { return params_; }

    /// Layer l weights, laid out [in x out].
    std::span<T> weights(std::size_t l) { return std::span<T>(params_).subspan(w_offset_[l], sizes_[l] * sizes_[l + 1]); }
    std::span<const T> weights(std::size_t l) const {
        return std::span<const T>(params_).subspan(w_offset_[l], sizes_[l] * sizes_[l + 1]);
    }
    std::span<T> bias(std::size_t l) { return std::span<T>(params_).subspan(b_offset_[l], sizes_[l + 1]); }
    std::span<const T> bias(std::size_t l) const { return std::span<const T>(params_).subspan(b_offset_[l], sizes_[l + 1]); }

    /// U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
    void init_fan_in(Rng& rng);

    struct Workspace {
        std::size_t batch = 0;
        std::vector<std::vector<T>> activations;  // [0] is the input
        std::vector<std::vector<T>> deltas;
        std::vector<T> scratch;
    };

    /// Runs `batch` rows of `input`; the returned span lives in `ws`.
    std::span<const T> forward(std::span<const T> input, std::size_t batch, Workspace& ws,
                               kernels::Backend be = kernels::Backend::OpenMP) const;

    /// Single-row convenience wrapper.
    std::vector<T> forward(std::span<const T> input) const;

    /// Gradient of sum(d_output * output) for the last forward pass in `ws`;
    /// `grad` is overwritten and has the parameter layout.
    void backward(Workspace& ws, std::span<const T> d_output, std::span<T> grad,
                  kernels::Backend be = kernels::Backend::OpenMP) const;

    /// Output column columns[j] of each row only; same values as the matching
    /// entries of forward().
    std::span<const T> forward_selected(std::span<const T> input, std::size_t batch,
                                        std::span<const std::size_t> columns, Workspace& ws,
                                        kernels::Backend be = kernels::Backend::OpenMP) const;

    /// backward() for an output gradient that is d_selected[j] at columns[j]
    /// and zero elsewhere, after forward_selected with the same columns.
    void backward_selected(Workspace& ws, std::span<const std::size_t> columns, std::span<const T> d_selected,
                           std::span<T> grad, kernels::Backend be = kernels::Backend::OpenMP) const;

    friend bool operator==(const Mlp&, const Mlp&) = default;

private:
    void check_input(std::span<const T> input, std::size_t batch) const;
    void forward_hidden(std::span<const T> input, std::size_t batch, Workspace& ws, kernels::Backend be) const;
    void backward_from(Workspace& ws, std::size_t layer, std::span<T> grad, kernels::Backend be) const;

    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> w_offset_;
    std::vector<std::size_t> b_offset_;
    std::vector<T> params_;
};

template <typename T>
struct AdamState {
    std::vector<T> m;
    std::vector<T> v;
    long long step = 0;

    friend bool operator==(const AdamState&, const AdamState&) = default;
};

struct AdamConfig {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// One bias-corrected Adam step on `params`.
template <typename T>
void adam_update(std::span<T> params, std::span<const T> grad, AdamState<T>& state, const AdamConfig& cfg);

/// target <- kappa * main + (1 - kappa) * target
template <typename T>
void soft_update(std::span<T> target, std::span<const T> main, double kappa);

}  // namespace sdnsync
