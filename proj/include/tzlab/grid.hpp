#ifndef TZLAB_GRID_HPP
#define TZLAB_GRID_HPP

#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "tzlab/errors.hpp"

namespace tzlab {

// Rectangular node layout: u_i = u0 + i*du (i = 0..nu-1), v_j = v0 + j*dv.
struct GridSpec {
    int nu = 41, nv = 41;
    double u0 = -1.0, u1 = 1.0, v0 = -1.0, v1 = 1.0;

    GridSpec() = default;
    GridSpec(int nu_, int nv_, double u0_, double u1_, double v0_, double v1_)
        : nu(nu_), nv(nv_), u0(u0_), u1(u1_), v0(v0_), v1(v1_) {
        if (nu < 3 || nv < 3) throw BadArgument("grid counts must be >= 3");
        if (!(u0 < u1) || !(v0 < v1)) throw BadArgument("degenerate domain");
    }
    double du() const { return (u1 - u0) / (nu - 1); }
    double dv() const { return (v1 - v0) / (nv - 1); }
    double u(int i) const { return u0 + i * du(); }
    double v(int j) const { return v0 + j * dv(); }
    int count() const { return nu * nv; }
};

// Dense grid of T with a per-node validity mask (1 = usable).
template <class T>
struct Grid {
    GridSpec spec;
    std::vector<T> data;
    std::vector<std::uint8_t> mask;

    Grid() = default;
    explicit Grid(const GridSpec& s, const T& fill = T())
        : spec(s), data(static_cast<size_t>(s.count()), fill),
          mask(static_cast<size_t>(s.count()), 1) {}

    T& at(int i, int j) { return data[static_cast<size_t>(j) * spec.nu + i]; }
    const T& at(int i, int j) const { return data[static_cast<size_t>(j) * spec.nu + i]; }
    bool ok(int i, int j) const { return mask[static_cast<size_t>(j) * spec.nu + i] != 0; }
    void set_mask(int i, int j, bool usable) {
        mask[static_cast<size_t>(j) * spec.nu + i] = usable ? 1 : 0;
    }
    double masked_fraction() const {
        size_t bad = 0;
        for (auto m : mask) bad += (m == 0);
        return static_cast<double>(bad) / static_cast<double>(mask.size());
    }
};

// Splits row indices across at most TZLAB_THREADS workers (default: hardware).
// Chunking is by contiguous ranges; all writers touch disjoint nodes, so the
// result is identical for any thread count.
inline void parallel_rows(int nv, const std::function<void(int)>& body) {
    int want = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("TZLAB_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) want = cap;
    }
    if (want <= 1 || nv < 4) {
        for (int j = 0; j < nv; ++j) body(j);
        return;
    }
    const int workers = std::min(want, nv);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    std::exception_ptr err;
    std::mutex err_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int j = w; j < nv; j += workers) body(j);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

} // namespace tzlab

#endif // TZLAB_GRID_HPP
