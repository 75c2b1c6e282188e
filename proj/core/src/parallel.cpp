#include "rholab/parallel.hpp"

#include "rholab/common.hpp"

#include <algorithm>
#include <limits>
#include <memory>

namespace rholab {

WorkerPool::WorkerPool(int workers) {
    if (workers < 1) throw ParameterError("WorkerPool: workers must be >= 1");
    threads_.reserve(workers - 1);
    for (int i = 1; i < workers; ++i) {
        threads_.emplace_back([this, i] { worker_loop(i); });
    }
}

WorkerPool::~WorkerPool() {
    {
        std::lock_guard<std::mutex> lk(mu_);
        stop_ = true;
        ++generation_;
    }
    cv_start_.notify_all();
    for (auto& t : threads_) t.join();
}

void WorkerPool::chunk_bounds(std::size_t n, int nchunks, int c, std::size_t& b,
                              std::size_t& e) {
    // Contiguous near-equal chunks; the split depends only on (n, nchunks).
    const std::size_t base = n / nchunks, rem = n % nchunks;
    const std::size_t uc = static_cast<std::size_t>(c);
    b = uc * base + std::min<std::size_t>(uc, rem);
    e = b + base + (uc < rem ? 1 : 0);
}

void WorkerPool::worker_loop(int id) {
    std::size_t seen = 0;
    for (;;) {
        Task t;
        {
            std::unique_lock<std::mutex> lk(mu_);
            cv_start_.wait(lk, [&] { return stop_ || generation_ != seen; });
            if (stop_) return;
            seen = generation_;
            t = task_;
        }
        if (t.fn && id < t.nchunks) {
            std::size_t b, e;
            chunk_bounds(t.n, t.nchunks, id, b, e);
            if (b < e) (*t.fn)(id, b, e);
        }
        {
            std::lock_guard<std::mutex> lk(mu_);
            if (--pending_ == 0) cv_done_.notify_one();
        }
    }
}

void WorkerPool::run_chunks(std::size_t n,
                            const std::function<void(int, std::size_t, std::size_t)>& fn) {
    const int nchunks = workers();
    if (nchunks == 1 || n == 0) {
        if (n > 0) fn(0, 0, n);
        return;
    }
    {
        std::lock_guard<std::mutex> lk(mu_);
        task_ = Task{&fn, n, nchunks};
        pending_ = static_cast<int>(threads_.size());
        ++generation_;
    }
    cv_start_.notify_all();
    std::size_t b, e;
    chunk_bounds(n, nchunks, 0, b, e);
    if (b < e) fn(0, b, e);
    std::unique_lock<std::mutex> lk(mu_);
    cv_done_.wait(lk, [&] { return pending_ == 0; });
    task_ = Task{};
}

void WorkerPool::parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    run_chunks(n, [&](int, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) fn(i);
    });
}

namespace {
std::unique_ptr<WorkerPool>& pool_slot() {
    static std::unique_ptr<WorkerPool> slot;
    return slot;
}
std::mutex& pool_mutex() {
    static std::mutex mu;
    return mu;
}
} // namespace

WorkerPool& global_pool() {
    std::lock_guard<std::mutex> lk(pool_mutex());
    auto& slot = pool_slot();
    if (!slot) {
        int hw = static_cast<int>(std::thread::hardware_concurrency());
        slot = std::make_unique<WorkerPool>(hw > 0 ? hw : 1);
    }
    return *slot;
}

void set_global_workers(int workers) {
    if (workers < 1) throw ParameterError("workers must be >= 1");
    std::lock_guard<std::mutex> lk(pool_mutex());
    pool_slot() = std::make_unique<WorkerPool>(workers);
}

double WorkerPool::parallel_max(std::size_t n,
                                const std::function<double(std::size_t)>& fn) {
    const int nchunks = workers();
    std::vector<double> part(nchunks, -std::numeric_limits<double>::infinity());
    run_chunks(n, [&](int c, std::size_t b, std::size_t e) {
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t i = b; i < e; ++i) m = std::max(m, fn(i));
        part[c] = m;
    });
    double m = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < nchunks; ++c) m = std::max(m, part[c]);
    return m;
}

} // namespace rholab
