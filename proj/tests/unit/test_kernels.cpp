#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <vector>

#include "sdnsync/kernels.hpp"
#include "sdnsync/rng.hpp"

using namespace sdnsync;
namespace k = sdnsync::kernels;

namespace {

template <typename T>
std::vector<T> random_vec(Rng& rng, std::size_t n) {
    std::vector<T> v(n);
    for (auto& x : v) x = static_cast<T>(uniform(rng, -1.0, 1.0));
    return v;
}

struct Shape {
    std::size_t batch, in, out;
};

const std::vector<Shape> kShapes = {{1, 1, 1},    {1, 12, 42},  {3, 7, 5},     {4, 16, 32},  {5, 9, 17},
                                    {17, 13, 129}, {64, 128, 128}, {256, 12, 128}, {256, 128, 42}, {33, 3, 200}};

// Runs the same kernels through both back ends with several threads and
// requires bitwise equality plus agreement with a plain double reference.
template <typename T>
void check_shape(const Shape& s, Rng& rng, double tol) {
    const auto x = random_vec<T>(rng, s.batch * s.in);
    const auto w = random_vec<T>(rng, s.in * s.out);
    const auto bias = random_vec<T>(rng, s.out);
    const auto dy = random_vec<T>(rng, s.batch * s.out);

    std::vector<T> y1(s.batch * s.out), y2(y1.size());
    k::serial::affine_forward<T>(x, w, bias, y1, s.batch, s.in, s.out);
    k::omp::affine_forward<T>(x, w, bias, y2, s.batch, s.in, s.out);
    CHECK(y1 == y2);

    std::vector<T> dw1(s.in * s.out), dw2(dw1.size()), db1(s.out), db2(s.out);
    k::serial::affine_backward_params<T>(x, dy, dw1, db1, s.batch, s.in, s.out);
    k::omp::affine_backward_params<T>(x, dy, dw2, db2, s.batch, s.in, s.out);
    CHECK(dw1 == dw2);
    CHECK(db1 == db2);

    std::vector<T> dx1(s.batch * s.in), dx2(dx1.size()), scratch(s.in * s.out);
    k::serial::affine_backward_input<T>(dy, w, dx1, scratch, s.batch, s.in, s.out);
    k::omp::affine_backward_input<T>(dy, w, dx2, scratch, s.batch, s.in, s.out);
    CHECK(dx1 == dx2);

    for (std::size_t b = 0; b < s.batch; ++b)
        for (std::size_t o = 0; o < s.out; ++o) {
            double ref = bias[o];
            for (std::size_t i = 0; i < s.in; ++i) ref += double(x[b * s.in + i]) * double(w[i * s.out + o]);
            REQUIRE(std::abs(y1[b * s.out + o] - ref) <= tol * (1.0 + std::abs(ref)));
        }
    for (std::size_t i = 0; i < s.in; ++i)
        for (std::size_t o = 0; o < s.out; ++o) {
            double ref = 0;
            for (std::size_t b = 0; b < s.batch; ++b) ref += double(x[b * s.in + i]) * double(dy[b * s.out + o]);
            REQUIRE(std::abs(dw1[i * s.out + o] - ref) <= tol * (1.0 + std::abs(ref)));
        }
    for (std::size_t o = 0; o < s.out; ++o) {
        double ref = 0;
        for (std::size_t b = 0; b < s.batch; ++b) ref += dy[b * s.out + o];
        REQUIRE(std::abs(db1[o] - ref) <= tol * (1.0 + std::abs(ref)));
    }
    for (std::size_t b = 0; b < s.batch; ++b)
        for (std::size_t i = 0; i < s.in; ++i) {
            double ref = 0;
            for (std::size_t o = 0; o < s.out; ++o) ref += double(dy[b * s.out + o]) * double(w[i * s.out + o]);
            REQUIRE(std::abs(dx1[b * s.in + i] - ref) <= tol * (1.0 + std::abs(ref)));
        }

    auto r1 = y1, r2 = y1;
    k::serial::relu<T>(r1);
    k::omp::relu<T>(r2);
    CHECK(r1 == r2);
    for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i] == (y1[i] > 0 ? y1[i] : T(0)));
    auto g1 = dy, g2 = dy;
    k::serial::relu_backward<T>(y1, g1);
    k::omp::relu_backward<T>(y1, g2);
    CHECK(g1 == g2);
    for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g1[i] == (y1[i] > 0 ? dy[i] : T(0)));
}

}  // namespace

TEST_CASE("serial and OpenMP kernels agree bitwise and match the reference") {
    const int saved = omp_get_max_threads();
    for (int threads : {1, 2, 3, 4}) {
        omp_set_num_threads(threads);
        Rng rng(static_cast<std::uint64_t>(threads));
        for (const auto& s : kShapes) {
            CAPTURE(threads);
            CAPTURE(s.batch);
            CAPTURE(s.in);
            CAPTURE(s.out);
            check_shape<float>(s, rng, 1e-4);
            check_shape<double>(s, rng, 1e-12);
        }
    }
    omp_set_num_threads(saved);
}

TEST_CASE("dispatching front ends give identical results for both back ends") {
    Rng rng(77);
    const Shape s{37, 12, 42};
    const auto x = random_vec<float>(rng, s.batch * s.in);
    const auto w = random_vec<float>(rng, s.in * s.out);
    const auto bias = random_vec<float>(rng, s.out);
    std::vector<float> a(s.batch * s.out), b(a.size());
    k::affine_forward<float>(k::Backend::Serial, x, w, bias, a, s.batch, s.in, s.out);
    k::affine_forward<float>(k::Backend::OpenMP, x, w, bias, b, s.batch, s.in, s.out);
    CHECK(a == b);
}
