#pragma once

// Dense kernels behind the Q-network. All matrices are row-major; weights are
// stored input-major ([in x out]).
//
// `serial` is the reference. `omp` splits the output rows across threads
// without changing any element's summation order, so both produce
// bitwise-identical results.

#include <cstddef>
#include <cstring>
#include <algorithm>
#include <span>
#include <vector>

namespace sdnsync::kernels {

enum class Backend { Serial, OpenMP };

namespace serial {

/// y[b][o] = bias[o] + sum_i x[b][i] * w[i][o]
template <typename T>
void affine_forward(std::span<const T> x, std::span<const T> w, std::span<const T> bias, std::span<T> y,
                    std::size_t batch, std::size_t in, std::size_t out);

template <typename T>
void relu(std::span<T> v);

/// g[k] *= (a[k] > 0)
template <typename T>
void relu_backward(std::span<const T> activation, std::span<T> grad);

/// dw[i][o] = sum_b x[b][i] * dy[b][o];  dbias[o] = sum_b dy[b][o]
template <typename T>
void affine_backward_params(std::span<const T> x, std::span<const T> dy, std::span<T> dw, std::span<T> dbias,
                            std::size_t batch, std::size_t in, std::size_t out);

/// dx[b][i] = sum_o dy[b][o] * w[i][o]; `w_t` is scratch of size in*out.
template <typename T>
void affine_backward_input(std::span<const T> dy, std::span<const T> w, std::span<T> dx, std::span<T> w_t,
                           std::size_t batch, std::size_t in, std::size_t out);

}  // namespace serial

namespace omp {

/// Threads an OpenMP region would get here.
int max_threads();

template <typename T>
void affine_forward(std::span<const T> x, std::span<const T> w, std::span<const T> bias, std::span<T> y,
                    std::size_t batch, std::size_t in, std::size_t out);

template <typename T>
void relu(std::span<T> v);

template <typename T>
void relu_backward(std::span<const T> activation, std::span<T> grad);

template <typename T>
void affine_backward_params(std::span<const T> x, std::span<const T> dy, std::span<T> dw, std::span<T> dbias,
                            std::size_t batch, std::size_t in, std::size_t out);

template <typename T>
void affine_backward_input(std::span<const T> dy, std::span<const T> w, std::span<T> dx, std::span<T> w_t,
                           std::size_t batch, std::size_t in, std::size_t out);

}  // namespace omp

namespace detail {

// Register-blocked C[m][n] = init[m][n] + sum_k A(m,k) * B[k][n], where
// A(m,k) = a[m * a_rs + k * a_cs] and B, C are row-major with row length n_total
// (init rows are init_rs apart; init_rs = 0 broadcasts one row, a null init
// starts from zero). Columns past the last full vector are read from a
// zero-padded copy of B (see GemmShape). Every C element accumulates k in
// ascending order whatever the tiling, and row tiles start at multiples of
// kRowBlock, so any partition of the m range on kRowBlock boundaries gives
// identical bits.
inline constexpr std::size_t kRowBlock = 8;

#if defined(__AVX512F__)
inline constexpr std::size_t kVectorBytes = 64;
#else
inline constexpr std::size_t kVectorBytes = 32;
#endif

template <typename T>
struct Lanes {
    static constexpr std::size_t width = kVectorBytes / sizeof(T);
    typedef T vec __attribute__((vector_size(kVectorBytes)));
};

template <typename T>
struct GemmShape;

template <typename T>
inline typename Lanes<T>::vec load_vec(const T* p) {
    typename Lanes<T>::vec v;
    std::memcpy(&v, p, sizeof v);
    return v;
}

template <typename T>
inline typename Lanes<T>::vec load_partial(const T* p, std::size_t count) {
    T buf[Lanes<T>::width] = {};
    for (std::size_t i = 0; i < count; ++i) buf[i] = p[i];
    return load_vec(buf);
}

template <typename T>
inline void store_partial(T* p, typename Lanes<T>::vec v, std::size_t count) {
    T buf[Lanes<T>::width];
    std::memcpy(buf, &v, sizeof v);
    for (std::size_t i = 0; i < count; ++i) p[i] = buf[i];
}

template <typename T>
struct GemmShape {
    std::size_t n_total = 0;
    std::size_t k_total = 0;
    std::size_t n_full = 0;     // columns covered by whole vectors
    std::size_t tail = 0;       // remaining columns, < width
    std::vector<T> tail_panel;  // [k_total x width], zero beyond `tail`

    GemmShape(const T* b, std::size_t n, std::size_t k) : n_total(n), k_total(k) {
        constexpr std::size_t W = Lanes<T>::width;
        n_full = n / W * W;
        tail = n - n_full;
        if (tail == 0) return;
        tail_panel.assign(k * W, T(0));
        for (std::size_t kk = 0; kk < k; ++kk)
            for (std::size_t j = 0; j < tail; ++j) tail_panel[kk * W + j] = b[kk * n + n_full + j];
    }
};

// Rows [m, m+R) and NV vectors of columns starting at n. `ap` holds A for
// these rows packed as [k][R]; B rows are b_ld apart. A Tail tile is a single
// vector of which only the first `store` columns exist in init and C.
// Accumulators are named locals: GCC keeps an array of them in memory.
template <typename T, bool Tail>
struct TileIo {
    using V = typename Lanes<T>::vec;
    static V load(const T* p, std::size_t store) {
        if constexpr (Tail) return load_partial(p, store);
        else return load_vec(p);
    }
    static void put(T* p, V v, std::size_t store) {
        if constexpr (Tail) {
            store_partial(p, v, store);
        } else {
            std::memcpy(p, &v, sizeof v);
        }
    }
};

template <typename T, std::size_t NV, std::size_t R, bool Tail = false>
inline void gemm_tile(std::size_t m, std::size_t n, std::size_t k_total, const T* __restrict ap,
                      const T* __restrict b, std::size_t b_ld, std::size_t c_ld, const T* __restrict init,
                      std::size_t init_rs, T* __restrict c, std::size_t store) {
    static_assert(R == 1 || R == 4 || R == 8);
    static_assert(NV == 1 || NV == 2);
    static_assert(!Tail || NV == 1);
    using V = typename Lanes<T>::vec;
    using Io = TileIo<T, Tail>;
    constexpr std::size_t W = Lanes<T>::width;
    auto init_of = [&](std::size_t r, std::size_t v) {
        return init && r < R && v < NV ? Io::load(init + (m + r) * init_rs + n + v * W, store) : V{};
    };
    V a00 = init_of(0, 0), a10 = init_of(1, 0), a20 = init_of(2, 0), a30 = init_of(3, 0);
    V a40 = init_of(4, 0), a50 = init_of(5, 0), a60 = init_of(6, 0), a70 = init_of(7, 0);
    V a01 = init_of(0, 1), a11 = init_of(1, 1), a21 = init_of(2, 1), a31 = init_of(3, 1);
    V a41 = init_of(4, 1), a51 = init_of(5, 1), a61 = init_of(6, 1), a71 = init_of(7, 1);
    for (std::size_t k = 0; k < k_total; ++k) {
        const V b0 = load_vec(b);
        V b1{};
        if constexpr (NV == 2) b1 = load_vec(b + W);
        b += b_ld;
        const T x0 = ap[0];
        a00 += x0 * b0;
        if constexpr (NV == 2) a01 += x0 * b1;
        if constexpr (R >= 4) {
            const T x1 = ap[1], x2 = ap[2], x3 = ap[3];
            a10 += x1 * b0;
            a20 += x2 * b0;
            a30 += x3 * b0;
            if constexpr (NV == 2) {
                a11 += x1 * b1;
                a21 += x2 * b1;
                a31 += x3 * b1;
            }
        }
        if constexpr (R == 8) {
            const T x4 = ap[4], x5 = ap[5], x6 = ap[6], x7 = ap[7];
            a40 += x4 * b0;
            a50 += x5 * b0;
            a60 += x6 * b0;
            a70 += x7 * b0;
            if constexpr (NV == 2) {
                a41 += x4 * b1;
                a51 += x5 * b1;
                a61 += x6 * b1;
                a71 += x7 * b1;
            }
        }
        ap += R;
    }
    T* c0 = c + m * c_ld + n;
    const V lo[8] = {a00, a10, a20, a30, a40, a50, a60, a70};
    const V hi[8] = {a01, a11, a21, a31, a41, a51, a61, a71};
    for (std::size_t r = 0; r < R; ++r) {
        Io::put(c0 + r * c_ld, lo[r], store);
        if constexpr (NV == 2) Io::put(c0 + r * c_ld + W, hi[r], store);
    }
}

template <typename T, std::size_t R>
inline void gemm_row_block(std::size_t m, const GemmShape<T>& s, T* __restrict pack, const T* __restrict a,
                           std::size_t a_rs, std::size_t a_cs, const T* __restrict b, const T* __restrict init,
                           std::size_t init_rs, T* __restrict c) {
    constexpr std::size_t W = Lanes<T>::width;
    for (std::size_t k = 0; k < s.k_total; ++k)
        for (std::size_t r = 0; r < R; ++r) pack[k * R + r] = a[(m + r) * a_rs + k * a_cs];
    std::size_t n = 0;
    for (; n + 2 * W <= s.n_full; n += 2 * W)
        gemm_tile<T, 2, R>(m, n, s.k_total, pack, b + n, s.n_total, s.n_total, init, init_rs, c, 2 * W);
    for (; n < s.n_full; n += W)
        gemm_tile<T, 1, R>(m, n, s.k_total, pack, b + n, s.n_total, s.n_total, init, init_rs, c, W);
    if (s.tail)
        gemm_tile<T, 1, R, true>(m, n, s.k_total, pack, s.tail_panel.data(), W, s.n_total, init, init_rs, c, s.tail);
}

template <typename T>
inline void gemm_rows(const GemmShape<T>& s, std::size_t m_begin, std::size_t m_end, const T* __restrict a,
                      std::size_t a_rs, std::size_t a_cs, const T* __restrict b, const T* __restrict init,
                      std::size_t init_rs, T* __restrict c) {
    std::vector<T> pack(s.k_total * kRowBlock);
    std::size_t m = m_begin;
    for (; m + kRowBlock <= m_end; m += kRowBlock)
        gemm_row_block<T, kRowBlock>(m, s, pack.data(), a, a_rs, a_cs, b, init, init_rs, c);
    for (; m + 4 <= m_end; m += 4) gemm_row_block<T, 4>(m, s, pack.data(), a, a_rs, a_cs, b, init, init_rs, c);
    for (; m < m_end; ++m) gemm_row_block<T, 1>(m, s, pack.data(), a, a_rs, a_cs, b, init, init_rs, c);
}

template <typename T>
inline void transpose(const T* __restrict w, T* __restrict w_t, std::size_t in, std::size_t out) {
    for (std::size_t i = 0; i < in; ++i)
        for (std::size_t o = 0; o < out; ++o) w_t[o * in + i] = w[i * out + o];
}

}  // namespace detail

/// OpenMP requested and more than one thread to run it on. The results are
/// the same either way; a single thread only pays the region overhead.
inline bool use_omp(Backend be) { return be == Backend::OpenMP && omp::max_threads() > 1; }

/// Backend-dispatching front ends used by the network.
template <typename T>
void affine_forward(Backend be, std::span<const T> x, std::span<const T> w, std::span<const T> bias, std::span<T> y,
                    std::size_t batch, std::size_t in, std::size_t out) {
    use_omp(be) ? omp::affine_forward(x, w, bias, y, batch, in, out)
                          : serial::affine_forward(x, w, bias, y, batch, in, out);
}

template <typename T>
void affine_backward_params(Backend be, std::span<const T> x, std::span<const T> dy, std::span<T> dw,
                            std::span<T> dbias, std::size_t batch, std::size_t in, std::size_t out) {
    use_omp(be) ? omp::affine_backward_params(x, dy, dw, dbias, batch, in, out)
                          : serial::affine_backward_params(x, dy, dw, dbias, batch, in, out);
}

template <typename T>
void affine_backward_input(Backend be, std::span<const T> dy, std::span<const T> w, std::span<T> dx, std::span<T> w_t,
                           std::size_t batch, std::size_t in, std::size_t out) {
    use_omp(be) ? omp::affine_backward_input(dy, w, dx, w_t, batch, in, out)
                          : serial::affine_backward_input(dy, w, dx, w_t, batch, in, out);
}

}  // namespace sdnsync::kernels
