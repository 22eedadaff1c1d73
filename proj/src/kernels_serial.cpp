#include "sdnsync/kernels.hpp"

#include <algorithm>

namespace sdnsync::kernels::serial {

template <typename T>
void affine_forward(std::span<const T> x, std::span<const T> w, std::span<const T> bias, std::span<T> y,
                    std::size_t batch, std::size_t in, std::size_t out) {
    const detail::GemmShape<T> shape(w.data(), out, in);
    detail::gemm_rows(shape, 0, batch, x.data(), in, 1, w.data(), bias.data(), 0, y.data());
}

template <typename T>
void relu(std::span<T> v) {
    for (auto& e : v) e = std::max(e, T(0));
}

template <typename T>
void relu_backward(std::span<const T> activation, std::span<T> grad) {
    for (std::size_t k = 0; k < grad.size(); ++k)
        if (!(activation[k] > T(0))) grad[k] = T(0);
}

template <typename T>
void affine_backward_params(std::span<const T> x, std::span<const T> dy, std::span<T> dw, std::span<T> dbias,
                            std::size_t batch, std::size_t in, std::size_t out) {
    const detail::GemmShape<T> shape(dy.data(), out, batch);
    detail::gemm_rows<T>(shape, 0, in, x.data(), 1, in, dy.data(), nullptr, 0, dw.data());
    for (std::size_t o = 0; o < out; ++o) {
        T acc = T(0);
        for (std::size_t b = 0; b < batch; ++b) acc += dy[b * out + o];
        dbias[o] = acc;
    }
}

template <typename T>
void affine_backward_input(std::span<const T> dy, std::span<const T> w, std::span<T> dx, std::span<T> w_t,
                           std::size_t batch, std::size_t in, std::size_t out) {
    detail::transpose(w.data(), w_t.data(), in, out);
    const detail::GemmShape<T> shape(w_t.data(), in, out);
    detail::gemm_rows<T>(shape, 0, batch, dy.data(), out, 1, w_t.data(), nullptr, 0, dx.data());
}

#define SDNSYNC_INSTANTIATE(T)                                                                                   \
    template void affine_forward<T>(std::span<const T>, std::span<const T>, std::span<const T>, std::span<T>,  \
                                    std::size_t, std::size_t, std::size_t);                                     \
    template void relu<T>(std::span<T>);                                                                        \
    template void relu_backward<T>(std::span<const T>, std::span<T>);                                           \
    template void affine_backward_params<T>(std::span<const T>, std::span<const T>, std::span<T>, std::span<T>, \
                                            std::size_t, std::size_t, std::size_t);                             \
    template void affine_backward_input<T>(std::span<const T>, std::span<const T>, std::span<T>, std::span<T>,  \
                                           std::size_t, std::size_t, std::size_t);

SDNSYNC_INSTANTIATE(float)
SDNSYNC_INSTANTIATE(double)

}  // namespace sdnsync::kernels::serial
