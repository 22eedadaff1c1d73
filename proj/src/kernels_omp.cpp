#include "sdnsync/kernels.hpp"

#include <algorithm>

#include <omp.h>

namespace sdnsync::kernels::omp {

int max_threads() { return omp_get_max_threads(); }

namespace {

// Splits [0, rows) into one contiguous run of whole row blocks per thread.
template <typename Body>
void for_row_blocks(std::size_t rows, Body&& body) {
    const std::size_t blocks = (rows + detail::kRowBlock - 1) / detail::kRowBlock;
#pragma omp parallel
    {
        const auto threads = static_cast<std::size_t>(omp_get_num_threads());
        const auto id = static_cast<std::size_t>(omp_get_thread_num());
        const std::size_t b0 = blocks * id / threads;
        const std::size_t b1 = blocks * (id + 1) / threads;
        if (b0 < b1) body(b0 * detail::kRowBlock, std::min(rows, b1 * detail::kRowBlock));
    }
}

}  // namespace

template <typename T>
void affine_forward(std::span<const T> x, std::span<const T> w, std::span<const T> bias, std::span<T> y,
                    std::size_t batch, std::size_t in, std::size_t out) {
    const detail::GemmShape<T> shape(w.data(), out, in);
    for_row_blocks(batch, [&](std::size_t b0, std::size_t b1) {
        detail::gemm_rows(shape, b0, b1, x.data(), in, 1, w.data(), bias.data(), 0, y.data());
    });
}

template <typename T>
void relu(std::span<T> v) {
    const auto n = static_cast<std::ptrdiff_t>(v.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        auto& e = v[static_cast<std::size_t>(k)];
        e = std::max(e, T(0));
    }
}

template <typename T>
void relu_backward(std::span<const T> activation, std::span<T> grad) {
    const auto n = static_cast<std::ptrdiff_t>(grad.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        const auto e = static_cast<std::size_t>(k);
        if (!(activation[e] > T(0))) grad[e] = T(0);
    }
}

template <typename T>
void affine_backward_params(std::span<const T> x, std::span<const T> dy, std::span<T> dw, std::span<T> dbias,
                            std::size_t batch, std::size_t in, std::size_t out) {
    const detail::GemmShape<T> shape(dy.data(), out, batch);
    for_row_blocks(in, [&](std::size_t i0, std::size_t i1) {
        detail::gemm_rows<T>(shape, i0, i1, x.data(), 1, in, dy.data(), nullptr, 0, dw.data());
    });
    const auto cols = static_cast<std::ptrdiff_t>(out);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t o = 0; o < cols; ++o) {
        const auto c = static_cast<std::size_t>(o);
        T acc = T(0);
        for (std::size_t b = 0; b < batch; ++b) acc += dy[b * out + c];
        dbias[c] = acc;
    }
}

template <typename T>
void affine_backward_input(std::span<const T> dy, std::span<const T> w, std::span<T> dx, std::span<T> w_t,
                           std::size_t batch, std::size_t in, std::size_t out) {
    detail::transpose(w.data(), w_t.data(), in, out);
    const detail::GemmShape<T> shape(w_t.data(), in, out);
    for_row_blocks(batch, [&](std::size_t b0, std::size_t b1) {
        detail::gemm_rows<T>(shape, b0, b1, dy.data(), out, 1, w_t.data(), nullptr, 0, dx.data());
    });
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

}  // namespace sdnsync::kernels::omp
