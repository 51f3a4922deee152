#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace gps {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Bad user input: files, malformed cells, out-of-range options.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerically infeasible request on valid input (rank deficiency,
// divergence, step size incompatible with the data).
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Broken internal bookkeeping; always a bug.
class internal_error : public std::logic_error {
public:
    explicit internal_error(const std::string& msg) : std::logic_error(msg) {}
};

// Thread cap: GPSSELECT_THREADS if set, else hardware concurrency.
inline int max_threads() {
    if (const char* env = std::getenv("GPSSELECT_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

// Runs body(i) for i in [0, n). Results must be written to preallocated
// slots so the outcome is identical for any thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    int nthreads = max_threads();
    if (nthreads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t nt = std::min<std::size_t>(nthreads, n);
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errs(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace gps
